#include "rab/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rab/errors.hpp"

namespace rab {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void require_geometry(const ArrayGeometry& g) {
  if (g.sensors < 2) throw InvalidInput("array geometry: need at least 2 sensors");
  if (!(g.spacing > 0.0)) throw InvalidInput("array geometry: spacing must be positive");
}

ComplexMatrix standard_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexMatrix G(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      G(i, j) = Complex(re, im);
    }
  return G;
}

}  // namespace

ComplexVector steering_vector(const ArrayGeometry& geometry, double theta_deg) {
  require_geometry(geometry);
  if (!(std::abs(theta_deg) <= 90.0)) throw InvalidInput("steering_vector: |theta| must be <= 90");
  const double phase = 2.0 * std::numbers::pi * geometry.spacing * std::sin(theta_deg * kDeg);
  ComplexVector a(geometry.sensors);
  for (int n = 0; n < geometry.sensors; ++n) a(n) = std::polar(1.0, phase * n);
  return a;
}

ComplexMatrix scattered_covariance(const ArrayGeometry& geometry, const SourceDescriptor& source,
                                   double grid_step_deg) {
  require_geometry(geometry);
  if (!(grid_step_deg > 0.0)) throw InvalidInput("scattered_covariance: grid_step must be positive");
  if (!(source.power > 0.0)) throw InvalidInput("scattered_covariance: power must be positive");
  if (!(source.spread_deg >= 0.0)) throw InvalidInput("scattered_covariance: negative spread");

  const Eigen::Index N = geometry.sensors;
  std::vector<double> theta;
  std::vector<double> weight;
  const bool point = source.density == AngularDensity::Point || source.spread_deg == 0.0;
  if (point) {
    theta.push_back(source.center_deg);
    weight.push_back(1.0);
  } else {
    const double half = source.density == AngularDensity::Gaussian ? 4.0 * source.spread_deg
                                                                    : 0.5 * source.spread_deg;
    const double lo = std::max(-90.0, source.center_deg - half);
    const double hi = std::min(90.0, source.center_deg + half);
    if (!(hi > lo)) throw InvalidInput("scattered_covariance: empty angular support");
    const auto intervals = static_cast<long>(std::ceil((hi - lo) / grid_step_deg - 1e-9));
    const double step = (hi - lo) / static_cast<double>(std::max(intervals, 1L));
    for (long k = 0; k <= intervals; ++k) {
      const double t = lo + step * static_cast<double>(k);
      double rho = 1.0;
      if (source.density == AngularDensity::Gaussian) {
        const double u = (t - source.center_deg) / source.spread_deg;
        rho = std::exp(-0.5 * u * u);
      }
      const double trap = (k == 0 || k == intervals) ? 0.5 : 1.0;
      theta.push_back(t);
      weight.push_back(rho * trap * step);
    }
  }
  ComplexMatrix R = ComplexMatrix::Zero(N, N);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const ComplexVector a = steering_vector(geometry, theta[k]);
    R.noalias() += weight[k] * (a * a.adjoint());
  }
  const double tr = R.trace().real();
  if (!(tr > 0.0)) throw InvalidInput("scattered_covariance: empty angular support");
  R *= source.power * static_cast<double>(N) / tr;
  return hermitian_part(R);
}

SnapshotSet generate_snapshots(const ComplexMatrix& Rs, const ComplexMatrix& Ri,
                               double noise_power, int T, std::uint64_t seed) {
  require_hermitian(Rs, "generate_snapshots: Rs");
  require_hermitian(Ri, "generate_snapshots: Ri");
  if (Rs.rows() != Ri.rows()) throw InvalidInput("generate_snapshots: dimension mismatch");
  if (!(noise_power > 0.0)) throw InvalidInput("generate_snapshots: noise power must be positive");
  if (T < 1) throw InvalidInput("generate_snapshots: T must be >= 1");
  const Eigen::Index N = Rs.rows();
  std::mt19937_64 rng(seed);
  const ComplexMatrix G1 = standard_gaussian(N, T, rng);
  const ComplexMatrix G2 = standard_gaussian(N, T, rng);
  const ComplexMatrix G3 = standard_gaussian(N, T, rng);
  SnapshotSet out;
  out.Y = sqrt_psd(Rs) * G1 + sqrt_psd(Ri) * G2 + std::sqrt(noise_power) * G3;
  return out;
}

ComplexMatrix sample_covariance(const SnapshotSet& snapshots) {
  if (snapshots.T() < 1) throw InvalidInput("sample_covariance: no snapshots");
  const ComplexMatrix R = snapshots.Y * snapshots.Y.adjoint() / static_cast<double>(snapshots.T());
  return hermitian_part(R);
}

ComplexMatrix factorize_signal_covariance(const ComplexMatrix& Rs_hat,
                                          std::optional<Eigen::Index> M, double threshold) {
  const EigenDecomposition ed = eig_hermitian(Rs_hat);
  const Eigen::Index N = Rs_hat.rows();
  Eigen::Index rank = 0;
  if (M) {
    if (*M < 1 || *M > N) throw InvalidInput("factorize_signal_covariance: M must be in [1, N]");
    rank = *M;
  } else {
    const double l1 = ed.eigenvalues(0);
    if (!(l1 > 0.0)) throw InvalidInput("factorize_signal_covariance: zero covariance");
    while (rank < N && ed.eigenvalues(rank) >= threshold * l1) ++rank;
  }
  const RealVector d = ed.eigenvalues.head(rank).cwiseMax(0.0).cwiseSqrt();
  return ed.eigenvectors.leftCols(rank) * d.asDiagonal();
}

}  // namespace rab

#include "rab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rab/errors.hpp"
#include "set_constraints.hpp"

namespace rab {

namespace {

ComplexMatrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexMatrix A(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      A(i, j) = Complex(re, g(rng));
    }
  return A;
}

ComplexMatrix gaussian_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  return hermitian_part(gaussian(n, n, rng));
}

// Membership with the absolute tolerance applied in units of the center's norm.
bool member(const IncSetSpec& spec, const ComplexMatrix& R) {
  const double c = std::max(1.0, detail::covariance_scale(spec));
  return contains_inc(detail::scaled(spec, c), R / c);
}

void record(CheckReport& r, double violation, const std::string& what) {
  ++r.samples;
  r.worst_violation = std::max(r.worst_violation, violation);
  if (violation > r.tolerance && r.witnesses.size() < 5) {
    std::ostringstream os;
    os.precision(6);
    os << what << " violation=" << violation;
    r.witnesses.push_back(os.str());
  }
}

void finish(CheckReport& r) { r.pass = r.worst_violation <= r.tolerance; }

double eigen_gap_ratio(const ComplexMatrix& Q, const ComplexMatrix& R1) {
  const ComplexMatrix S = inv_sqrt_psd(R1);
  const RealVector ev = eig_hermitian(hermitian_part(S * Q * Q.adjoint() * S)).eigenvalues;
  if (ev.size() < 2 || ev(0) <= 0.0) return 1.0;
  return (ev(0) - ev(1)) / ev(0);
}

ComplexVector principal_w(const ComplexMatrix& Q, const ComplexMatrix& R1) {
  return extract_beamformer(Q, R1).w;
}

}  // namespace

double f_value(const ComplexMatrix& Q, const ComplexMatrix& R1) {
  const ComplexMatrix G = Q.adjoint() * R1.ldlt().solve(Q);
  return lambda_max(hermitian_part(G));
}

double h_value(const ComplexMatrix& Q, const ComplexMatrix& R1, const ComplexVector& w) {
  return sinr(w, Q, R1);
}

double directional_derivative_Q(const ComplexMatrix& Q, const ComplexMatrix& R1,
                                const ComplexMatrix& D) {
  const ComplexVector w = principal_w(Q, R1);
  const ComplexMatrix G = 2.0 * w * (w.adjoint() * Q);
  return (G.adjoint() * D).trace().real();
}

double directional_derivative_R1(const ComplexMatrix& Q, const ComplexMatrix& R1,
                                 const ComplexMatrix& D) {
  const Beamformer b = extract_beamformer(Q, R1);
  return -b.lambda * b.w.dot(D * b.w).real();
}

ComplexMatrix sample_signal_member(const SignalSetSpec& spec, std::mt19937_64& rng,
                                   bool boundary) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (spec.radius == 0.0) return spec.center;
  ComplexMatrix D = gaussian(spec.center.rows(), spec.center.cols(), rng);
  const double frac = boundary ? 1.0 : u(rng);
  D *= frac * spec.radius / matrix_norm(D, spec.norm);
  return spec.center + D;
}

ComplexMatrix sample_inc_member(const IncSetSpec& spec, const ComplexMatrix& anchor,
                                std::mt19937_64& rng, bool boundary) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto N = spec.center.rows();
  ComplexMatrix C = spec.center;
  if (spec.radius > 0.0) {
    ComplexMatrix D = gaussian_hermitian(N, rng);
    const double frac = boundary ? 1.0 : u(rng);
    C += frac * spec.radius / matrix_norm(D, spec.norm) * D;
  }
  const EigenDecomposition ed = eig_hermitian(hermitian_part(C));
  const RealVector clipped = ed.eigenvalues.cwiseMax(spec.pd_floor);
  C = hermitian_part(ed.eigenvectors * clipped.cast<Complex>().asDiagonal() *
                     ed.eigenvectors.adjoint());
  if (spec.trace) {
    const double tr = C.trace().real();
    const double target = std::clamp(tr, spec.trace->lower, spec.trace->upper);
    C += (target - tr) / static_cast<double>(N) * ComplexMatrix::Identity(N, N);
  }
  if (member(spec, C)) return C;
  // the segment from a member stays inside by convexity
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (member(spec, anchor + mid * (C - anchor)))
      lo = mid;
    else
      hi = mid;
  }
  return hermitian_part(anchor + lo * (C - anchor));
}

CheckReport check_saddle_point(const MinimaxSolution& sol, const SignalSetSpec& signal,
                               const IncSetSpec& inc, int n_samples, std::uint64_t seed,
                               double tol) {
  CheckReport r;
  r.name = "saddle_point";
  r.tolerance = tol;
  std::mt19937_64 rng(seed);
  const auto N = sol.R1_star.rows();
  const double center = sinr(sol.w_star, sol.Q_star, sol.R1_star);
  const double scale = std::max(1.0, std::abs(center));
  // the exact maximizer over w first, then random directions
  record(r, (f_value(sol.Q_star, sol.R1_star) - center) / scale, "left principal direction");
  for (int i = 1; i < n_samples; ++i) {
    const ComplexVector w = gaussian(N, 1, rng).col(0);
    record(r, (sinr(w, sol.Q_star, sol.R1_star) - center) / scale,
           "left sample " + std::to_string(i));
  }
  // likewise the exact minimizer over both sets, then random members
  record(r, (center - worst_case_sinr(signal, inc, sol.w_star)) / scale, "right worst case");
  for (int i = 1; i < n_samples; ++i) {
    const bool boundary = i % 2 == 0;
    const ComplexMatrix Q = sample_signal_member(signal, rng, boundary);
    const ComplexMatrix R = sample_inc_member(inc, sol.R1_star, rng, boundary);
    record(r, (center - sinr(sol.w_star, Q, R)) / scale, "right sample " + std::to_string(i));
  }
  finish(r);
  return r;
}

CheckReport check_optimality_condition(const ComplexMatrix& Q_star, const ComplexMatrix& R1_star,
                                       const ComplexVector& w_star, double lambda_star,
                                       const SignalSetSpec& signal, const IncSetSpec& inc,
                                       int n_samples, std::uint64_t seed, double tol) {
  CheckReport r;
  r.name = "optimality_condition";
  r.tolerance = tol;
  std::mt19937_64 rng(seed);
  const double scale = std::max(1.0, std::abs(lambda_star));
  const ComplexVector QsW = Q_star.adjoint() * w_star;
  const double fixed = 2.0 * QsW.squaredNorm();
  for (int i = 0; i < n_samples; ++i) {
    const bool boundary = i % 2 == 0;
    const ComplexMatrix Q = sample_signal_member(signal, rng, boundary);
    const ComplexMatrix R = sample_inc_member(inc, R1_star, rng, boundary);
    const double cross = 2.0 * (QsW.dot(Q.adjoint() * w_star)).real();
    const double value = cross - lambda_star * w_star.dot((R - R1_star) * w_star).real() - fixed;
    record(r, -value / scale, "member " + std::to_string(i));
  }
  finish(r);
  return r;
}

namespace {

template <class Perturb, class Analytic>
CheckReport grad_check(const char* name, const ComplexMatrix& Q, const ComplexMatrix& R1,
                       double h_step, int directions, double tol, Perturb perturb,
                       Analytic analytic) {
  CheckReport r;
  r.name = name;
  r.tolerance = tol;
  // a relative step h moves the top eigenvalues by about h; the gap must dominate that
  const double gap = eigen_gap_ratio(Q, R1);
  if (gap < 100.0 * h_step) {
    r.skipped = true;
    char buf[96];
    std::snprintf(buf, sizeof buf, "largest eigenvalue is not simple (relative gap %.2e)", gap);
    r.note = buf;
    return r;
  }
  const double f0 = f_value(Q, R1);
  for (int d = 0; d < directions; ++d) {
    const auto [plus, minus, t, D] = perturb();
    const double fd = (plus - minus) / (2.0 * t);
    const double an = analytic(D);
    const double denom = std::max({std::abs(an), std::abs(fd), 1e-6 * std::max(1.0, f0)});
    record(r, std::abs(fd - an) / denom, "direction " + std::to_string(d));
  }
  finish(r);
  return r;
}

}  // namespace

CheckReport check_grad_Q(const ComplexMatrix& Q, const ComplexMatrix& R1, double h_step,
                         int directions, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  const double t = h_step * Q.norm();
  if (!(t > 0.0)) throw InvalidInput("check_grad_Q: Q must be nonzero");
  auto perturb = [&] {
    ComplexMatrix D = gaussian(Q.rows(), Q.cols(), rng);
    D /= D.norm();
    return std::tuple{f_value(Q + t * D, R1), f_value(Q - t * D, R1), t, D};
  };
  return grad_check("grad_Q", Q, R1, h_step, directions, tol, perturb,
                    [&](const ComplexMatrix& D) { return directional_derivative_Q(Q, R1, D); });
}

CheckReport check_grad_R1(const ComplexMatrix& Q, const ComplexMatrix& R1, double h_step,
                          int directions, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  // f varies on the scale of the smallest eigenvalue of R1
  const double t = h_step * lambda_min(R1);
  if (!(t > 0.0)) throw InvalidInput("check_grad_R1: R1 must be positive definite");
  auto perturb = [&] {
    ComplexMatrix D = gaussian_hermitian(R1.rows(), rng);
    D /= D.norm();
    return std::tuple{f_value(Q, R1 + t * D), f_value(Q, R1 - t * D), t, D};
  };
  return grad_check("grad_R1", Q, R1, h_step, directions, tol, perturb,
                    [&](const ComplexMatrix& D) { return directional_derivative_R1(Q, R1, D); });
}

CheckReport check_convexity(ConvexTarget target, const std::optional<ComplexVector>& fixed_w,
                            int n_pairs, std::uint64_t seed, Eigen::Index N, Eigen::Index M,
                            double tol) {
  CheckReport r;
  r.name = target == ConvexTarget::F ? "convexity_f" : "convexity_h";
  r.tolerance = tol;
  if (target == ConvexTarget::H && (!fixed_w || fixed_w->size() != N || fixed_w->norm() == 0.0))
    throw InvalidInput("check_convexity: h needs a nonzero w of length N");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_r = [&] {
    const ComplexMatrix A = gaussian(N, N, rng);
    ComplexMatrix R = A * A.adjoint() / static_cast<double>(N);
    if (target == ConvexTarget::F) R += 0.1 * ComplexMatrix::Identity(N, N);
    return hermitian_part(R);
  };
  auto g = [&](const ComplexMatrix& Q, const ComplexMatrix& R) {
    return target == ConvexTarget::F ? f_value(Q, R) : h_value(Q, R, *fixed_w);
  };
  for (int i = 0; i < n_pairs; ++i) {
    const ComplexMatrix Q1 = gaussian(N, M, rng), Q2 = gaussian(N, M, rng);
    const ComplexMatrix R1 = random_r(), R2 = random_r();
    const double a = i == 0 ? 0.0 : i == 1 ? 1.0 : u(rng);
    const double rhs = a * g(Q1, R1) + (1.0 - a) * g(Q2, R2);
    const double lhs = g(a * Q1 + (1.0 - a) * Q2, a * R1 + (1.0 - a) * R2);
    record(r, (lhs - rhs) / std::max(1.0, std::abs(rhs)), "pair " + std::to_string(i));
  }
  finish(r);
  return r;
}

CheckReport check_value_chain(const MinimaxSolution& sol, double tol) {
  CheckReport r;
  r.name = "value_chain";
  r.tolerance = tol;
  const double s = sinr(sol.w_star, sol.Q_star, sol.R1_star);
  record(r, std::abs(sol.lambda_star - s) / std::max(1.0, std::abs(sol.lambda_star)),
         "lambda* vs S(w*, Q*, R1*)");
  finish(r);
  return r;
}

CheckReport check_value_equivalence(double minimax_lambda, double dc_objective, double tol) {
  CheckReport r;
  r.name = "value_equivalence";
  r.tolerance = tol;
  const double v = dc_objective * dc_objective - minimax_lambda;
  record(r, v, "dc^2 vs lambda*");
  std::ostringstream os;
  os.precision(9);
  os << "gap=" << minimax_lambda - dc_objective * dc_objective;
  r.note = os.str();
  finish(r);
  return r;
}

}  // namespace rab

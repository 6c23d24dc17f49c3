#pragma once

// Uniform linear array simulation: steering vectors, locally scattered sources,
// snapshots and the covariance estimates handed to the beamformers.

#include <cstdint>
#include <optional>

#include "rab/linalg.hpp"

namespace rab {

struct ArrayGeometry {
  int sensors = 10;
  double spacing = 0.5;  // in wavelengths
};

enum class AngularDensity { Gaussian, Uniform, Point };

/// gaussian: spread is the standard deviation (truncated at +-4 sigma);
/// uniform: spread is the full width; point: spread ignored.
struct SourceDescriptor {
  AngularDensity density = AngularDensity::Point;
  double center_deg = 0.0;
  double spread_deg = 0.0;
  double power = 1.0;
};

/// Columns are snapshots y(t), t = 0..T-1.
struct SnapshotSet {
  ComplexMatrix Y;
  Eigen::Index T() const { return Y.cols(); }
};

inline constexpr double kDefaultGridStepDeg = 0.05;

/// a_n = exp(j 2 pi spacing n sin(theta)), n = 0..N-1.
ComplexVector steering_vector(const ArrayGeometry& geometry, double theta_deg);

/// Angular integral of a a^H against the source density with trapezoidal weights,
/// scaled so that tr R = power * N.
ComplexMatrix scattered_covariance(const ArrayGeometry& geometry, const SourceDescriptor& source,
                                   double grid_step_deg = kDefaultGridStepDeg);

/// y(t) = Rs^{1/2} g1 + Ri^{1/2} g2 + sqrt(noise_power) g3 with independent unit-variance
/// circular complex Gaussian vectors (real and imaginary parts of variance 1/2).
SnapshotSet generate_snapshots(const ComplexMatrix& Rs, const ComplexMatrix& Ri,
                               double noise_power, int T, std::uint64_t seed);

ComplexMatrix sample_covariance(const SnapshotSet& snapshots);

inline constexpr double kDefaultRankThreshold = 1e-8;

/// Q with Q Q^H the best rank-M approximation of Rs_hat; columns are eigenvectors scaled
/// by sqrt(eigenvalue) in descending order.  Without M, keeps eigenvalues >= threshold * lambda_1.
ComplexMatrix factorize_signal_covariance(const ComplexMatrix& Rs_hat,
                                          std::optional<Eigen::Index> M = std::nullopt,
                                          double threshold = kDefaultRankThreshold);

}  // namespace rab

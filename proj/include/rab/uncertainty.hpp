#pragma once

// Convex closed uncertainty sets for the signal factor Q and the
// interference-plus-noise covariance R1, and their worst-case quantities.

#include <optional>

#include "rab/conic/problem.hpp"
#include "rab/linalg.hpp"

namespace rab {

enum class NormKind { Frobenius, Spectral };

const char* to_string(NormKind n);

/// { Q : ||Q - center|| <= radius }
struct SignalSetSpec {
  ComplexMatrix center;
  NormKind norm = NormKind::Frobenius;
  double radius = 0.0;  // sqrt(eta)
};

struct TraceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// { R1 Hermitian : ||R1 - center|| <= radius, R1 >= pd_floor I,
///   lower <= tr R1 <= upper (if present) }
struct IncSetSpec {
  ComplexMatrix center;
  NormKind norm = NormKind::Frobenius;
  double radius = 0.0;  // sqrt(gamma)
  std::optional<TraceInterval> trace;
  double pd_floor = 0.0;
};

/// Dual variables of the worst-case power problem (x for the lower trace bound,
/// y for the upper, X for the norm ball, Y only for the spectral form).
struct DualCertificate {
  double x = 0.0;
  double y = 0.0;
  ComplexMatrix X;
  std::optional<ComplexMatrix> Y;
  double value = 0.0;
};

inline constexpr double kMembershipTol = 1e-9;

void validate(const SignalSetSpec& spec);
void validate(const IncSetSpec& spec);

double spectral_norm(const ComplexMatrix& A);
double matrix_norm(const ComplexMatrix& A, NormKind kind);

bool contains_signal(const SignalSetSpec& spec, const ComplexMatrix& Q);
bool contains_inc(const IncSetSpec& spec, const ComplexMatrix& R);

/// (max{||center^H w|| - radius ||w||, 0})^2; the same value for both norms.
double worst_case_signal_power(const SignalSetSpec& spec, const ComplexVector& w);

/// max over the set of w^H R1 w.  Closed form w^H center w + radius ||w||^2 without a
/// trace interval (and without pd_floor); otherwise a small SDP.
/// Throws InfeasibleSet when the set is empty.
double worst_case_inc_power(const IncSetSpec& spec, const ComplexVector& w,
                            const conic::SolverSettings& settings = {});

/// Solves the dual of the worst-case power problem.  Requires a trace interval.
DualCertificate dual_inc_power(const IncSetSpec& spec, const ComplexVector& w,
                               const conic::SolverSettings& settings = {});

/// Dual objective of a certificate, recomputed from its parts.
double dual_objective(const IncSetSpec& spec, const DualCertificate& cert);

/// Smallest eigenvalue of the dual LMI block [[(y-x)I -/+ ..., w], [w^H, 1]].
double dual_lmi_min_eig(const IncSetSpec& spec, const DualCertificate& cert,
                        const ComplexVector& w);

}  // namespace rab

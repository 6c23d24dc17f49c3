#include "rab/uncertainty.hpp"

#include <cmath>
#include <string>

#include "rab/conic/builder.hpp"
#include "rab/conic/solver.hpp"
#include "rab/errors.hpp"
#include "set_constraints.hpp"

namespace rab {

using conic::Index;

const char* to_string(NormKind n) {
  return n == NormKind::Frobenius ? "frobenius" : "spectral";
}

namespace {

bool finite(const ComplexMatrix& A) { return A.allFinite(); }

void require_nonzero(const ComplexVector& w, Index n, const char* what) {
  if (w.size() != n) throw InvalidInput(std::string(what) + ": dimension mismatch");
  if (!w.allFinite() || w.norm() == 0.0) throw InvalidInput(std::string(what) + ": w must be nonzero");
}

void require_optimal(const conic::ConicSolution& sol, const char* what) {
  if (sol.status == conic::SolveStatus::Optimal) return;
  throw SolverFailure(std::string(what) + ": solver returned " + conic::to_string(sol.status));
}

}  // namespace

void validate(const SignalSetSpec& spec) {
  if (spec.center.size() == 0) throw InvalidInput("signal set: empty center");
  if (!finite(spec.center)) throw InvalidInput("signal set: non-finite center");
  if (!std::isfinite(spec.radius) || spec.radius < 0.0)
    throw InvalidInput("signal set: radius must be finite and >= 0");
  if (!(spec.radius < matrix_norm(spec.center, spec.norm)))
    throw InvalidInput("signal set: radius must be below the norm of the center (0 excluded)");
}

void validate(const IncSetSpec& spec) {
  if (spec.center.size() == 0) throw InvalidInput("inc set: empty center");
  require_hermitian(spec.center, "inc set: center");
  if (!std::isfinite(spec.radius) || spec.radius < 0.0)
    throw InvalidInput("inc set: radius must be finite and >= 0");
  if (!std::isfinite(spec.pd_floor) || spec.pd_floor < 0.0)
    throw InvalidInput("inc set: pd_floor must be finite and >= 0");
  if (spec.trace) {
    const auto [lo, hi] = *spec.trace;
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || lo > hi)
      throw InvalidInput("inc set: trace interval needs 0 <= lower <= upper");
  }
  const double lmin = lambda_min(spec.center);
  if (lmin < -1e-9 * std::max(1.0, spectral_norm(spec.center)))
    throw InvalidInput("inc set: center is not PSD");
}

double spectral_norm(const ComplexMatrix& A) {
  if (A.size() == 0) return 0.0;
  return svd(A).sigma(0);
}

double matrix_norm(const ComplexMatrix& A, NormKind kind) {
  return kind == NormKind::Frobenius ? A.norm() : spectral_norm(A);
}

bool contains_signal(const SignalSetSpec& spec, const ComplexMatrix& Q) {
  if (Q.rows() != spec.center.rows() || Q.cols() != spec.center.cols())
    throw InvalidInput("contains_signal: dimension mismatch");
  return matrix_norm(Q - spec.center, spec.norm) <= spec.radius + kMembershipTol;
}

bool contains_inc(const IncSetSpec& spec, const ComplexMatrix& R) {
  if (R.rows() != spec.center.rows() || R.cols() != spec.center.cols())
    throw InvalidInput("contains_inc: dimension mismatch");
  if (!is_hermitian(R)) return false;
  const ComplexMatrix H = hermitian_part(R);
  if (matrix_norm(H - spec.center, spec.norm) > spec.radius + kMembershipTol) return false;
  if (lambda_min(H) < spec.pd_floor - kMembershipTol) return false;
  if (spec.trace) {
    const double tr = H.trace().real();
    if (tr < spec.trace->lower - kMembershipTol || tr > spec.trace->upper + kMembershipTol)
      return false;
  }
  return true;
}

double worst_case_signal_power(const SignalSetSpec& spec, const ComplexVector& w) {
  require_nonzero(w, spec.center.rows(), "worst_case_signal_power");
  const double amp = (spec.center.adjoint() * w).norm() - spec.radius * w.norm();
  return amp > 0.0 ? amp * amp : 0.0;
}

double worst_case_inc_power(const IncSetSpec& spec, const ComplexVector& w,
                            const conic::SolverSettings& settings) {
  validate(spec);
  const Index N = spec.center.rows();
  require_nonzero(w, N, "worst_case_inc_power");
  const double wn2 = w.squaredNorm();
  const bool floor_inactive = spec.pd_floor == 0.0 || lambda_min(spec.center) >= spec.pd_floor;
  if (!spec.trace && floor_inactive)
    return w.dot(spec.center * w).real() + spec.radius * wn2;

  const double sigma = detail::covariance_scale(spec);
  const IncSetSpec s = detail::scaled(spec, sigma);
  const ComplexVector u = w / std::sqrt(wn2);
  const RealVector gain = vec_hermitian(u * u.adjoint());

  conic::ConicBuilder b;
  const Index p = b.add_variables(hermitian_param_count(N));
  for (Index k = 0; k < gain.size(); ++k) b.set_objective(p + k, -gain(k));
  detail::constrain_inc(b, s, p, true);

  const auto sol = conic::solve(b.build(), settings);
  if (sol.status == conic::SolveStatus::Infeasible)
    throw InfeasibleSet("worst_case_inc_power: the covariance set is empty");
  require_optimal(sol, "worst_case_inc_power");
  return -sol.primal_objective * sigma * wn2;
}

DualCertificate dual_inc_power(const IncSetSpec& spec, const ComplexVector& w,
                               const conic::SolverSettings& settings) {
  validate(spec);
  if (!spec.trace) throw InvalidInput("dual_inc_power: a trace interval is required");
  if (spec.pd_floor > 0.0) throw InvalidInput("dual_inc_power: pd_floor is not supported");
  const Index N = spec.center.rows();
  require_nonzero(w, N, "dual_inc_power");
  const double wn2 = w.squaredNorm();
  const double sigma = detail::covariance_scale(spec);
  const IncSetSpec s = detail::scaled(spec, sigma);
  const ComplexVector u = w / std::sqrt(wn2);
  const Index np = hermitian_param_count(N);

  conic::ConicBuilder b;
  conic::HermitianLmi lmi(N + 1);
  const detail::IncDualLayout L = detail::add_inc_dual(b, s, lmi);
  for (const auto& [var, coef] : L.objective) b.set_objective(var, coef);
  for (Index i = 0; i < N; ++i) lmi.add_constant(i, N, u(i));
  lmi.add_constant(N, N, 1.0);
  lmi.emit(b);

  const auto sol = conic::solve(b.build(), settings);
  if (sol.status == conic::SolveStatus::Unbounded)
    throw InfeasibleSet("dual_inc_power: the covariance set is empty");
  require_optimal(sol, "dual_inc_power");

  DualCertificate cert;
  cert.x = wn2 * L.x(sol.x);
  cert.y = wn2 * L.y(sol.x);
  cert.X = wn2 * unvec_hermitian(sol.x.segment(L.X, np), N);
  if (s.norm == NormKind::Spectral)
    cert.Y = L.Y >= 0 ? ComplexMatrix(wn2 * unvec_hermitian(sol.x.segment(L.Y, np), N))
                      : ComplexMatrix::Zero(N, N);
  cert.value = sol.primal_objective * sigma * wn2;
  return cert;
}

double dual_objective(const IncSetSpec& spec, const DualCertificate& cert) {
  if (!spec.trace) throw InvalidInput("dual_objective: a trace interval is required");
  double v = -spec.trace->lower * cert.x + spec.trace->upper * cert.y;
  if (spec.norm == NormKind::Frobenius || !cert.Y) {
    v += spec.radius * cert.X.norm() - (spec.center * cert.X).trace().real();
  } else {
    v += spec.radius * (cert.X + *cert.Y).trace().real() +
         (spec.center * (*cert.Y - cert.X)).trace().real();
  }
  return v;
}

double dual_lmi_min_eig(const IncSetSpec& spec, const DualCertificate& cert,
                        const ComplexVector& w) {
  const Index N = spec.center.rows();
  require_nonzero(w, N, "dual_lmi_min_eig");
  ComplexMatrix L(N + 1, N + 1);
  ComplexMatrix top = (cert.y - cert.x) * ComplexMatrix::Identity(N, N) - cert.X;
  if (cert.Y) top += *cert.Y;
  L.topLeftCorner(N, N) = top;
  L.topRightCorner(N, 1) = w;
  L.bottomLeftCorner(1, N) = w.adjoint();
  L(N, N) = 1.0;
  return lambda_min(hermitian_part(L));
}

}  // namespace rab

#include "rab/minimax.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rab/conic/builder.hpp"
#include "rab/conic/solver.hpp"
#include "rab/errors.hpp"
#include "set_constraints.hpp"

namespace rab {

using conic::Index;

namespace {

void check_specs(const SignalSetSpec& signal, const IncSetSpec& inc) {
  validate(signal);
  validate(inc);
  if (signal.center.rows() != inc.center.rows())
    throw InvalidInput("minimax: signal and covariance sets have different array sizes");
}

struct ScaledSolve {
  conic::ConicSolution sol;
  double lambda;
  ComplexMatrix Q, R1;
};

// Solves in units where the covariance center has unit spectral norm; lambda
// is unchanged by that rescaling.
ScaledSolve solve_scaled(const SignalSetSpec& signal, const IncSetSpec& inc,
                         const conic::SolverSettings& settings) {
  check_specs(signal, inc);
  const double c = detail::covariance_scale(inc);
  const MinimaxLayout L = minimax_layout(signal, inc);
  const auto problem = build_minimax(detail::scaled(signal, c), detail::scaled(inc, c));
  ScaledSolve out{conic::solve(problem, settings), 0.0, {}, {}};
  const auto& sol = out.sol;
  if (sol.status == conic::SolveStatus::Infeasible)
    throw InfeasibleSet("minimax: the uncertainty sets are empty");
  if (sol.status != conic::SolveStatus::Optimal)
    throw SolverFailure(std::string("minimax: solver returned ") + conic::to_string(sol.status));
  out.lambda = sol.x(L.lambda);
  out.Q = std::sqrt(c) * unvec_isometric(sol.x.segment(L.q_first, 2 * L.N * L.M), L.N, L.M);
  out.R1 = c * unvec_hermitian(sol.x.segment(L.r_first, hermitian_param_count(L.N)), L.N);
  return out;
}

void fill_diagnostics(MinimaxSolution& m, const ScaledSolve& s) {
  m.status = s.sol.status;
  m.iterations = s.sol.iterations;
  m.residuals = s.sol.residuals;
  m.primal_objective = s.sol.primal_objective;
  m.dual_objective = s.sol.dual_objective;
  const RealVector ev = eig_hermitian(m.R1_star).eigenvalues;
  const double lmin = ev(ev.size() - 1);
  m.r1_condition = lmin > 0.0 ? ev(0) / lmin : std::numeric_limits<double>::infinity();
}

ComplexMatrix checked_inv_sqrt(const ComplexMatrix& R1) {
  try {
    return inv_sqrt_psd(R1);
  } catch (const NotPositiveDefinite& e) {
    throw NotPositiveDefinite(
        "minimax: R1* is singular to tolerance; set pd_floor > 0 in the covariance set",
        e.min_eigenvalue());
  }
}

}  // namespace

MinimaxLayout minimax_layout(const SignalSetSpec& signal, const IncSetSpec& inc) {
  MinimaxLayout L;
  L.N = signal.center.rows();
  L.M = signal.center.cols();
  L.lambda = 0;
  L.q_first = 1;
  L.r_first = 1 + 2 * L.N * L.M;
  (void)inc;
  return L;
}

conic::ConicProblem build_minimax(const SignalSetSpec& signal, const IncSetSpec& inc) {
  check_specs(signal, inc);
  const MinimaxLayout L = minimax_layout(signal, inc);
  conic::ConicBuilder b;
  b.add_variables(1 + 2 * L.N * L.M + hermitian_param_count(L.N));
  b.set_objective(L.lambda, 1.0);

  conic::HermitianLmi lmi(L.N + L.M);
  detail::add_hermitian_params(lmi, 0, L.N, L.r_first, 1.0);
  detail::add_complex_params(lmi, 0, L.N, L.N, L.M, L.q_first, 1.0);
  for (Index i = 0; i < L.M; ++i) lmi.add_term(L.N + i, L.N + i, L.lambda, 1.0);
  lmi.emit(b);

  detail::constrain_signal(b, signal, L.q_first);
  detail::constrain_inc(b, inc, L.r_first, false);
  return b.build();
}

MinimaxSolution solve_minimax(const SignalSetSpec& signal, const IncSetSpec& inc,
                              const conic::SolverSettings& settings) {
  const ScaledSolve s = solve_scaled(signal, inc, settings);
  MinimaxSolution m;
  m.lambda_star = s.lambda;
  m.Q_star = s.Q;
  m.R1_star = s.R1;
  fill_diagnostics(m, s);
  m.w_star = extract_beamformer(m.Q_star, m.R1_star).w;
  return m;
}

Beamformer extract_beamformer(const ComplexMatrix& Q, const ComplexMatrix& R1) {
  require_hermitian(R1, "extract_beamformer: R1");
  if (Q.rows() != R1.rows()) throw InvalidInput("extract_beamformer: dimension mismatch");
  const ComplexMatrix S = checked_inv_sqrt(R1);
  const ComplexMatrix B = S * Q;
  const PrincipalPair pp = principal_pair(hermitian_part(B * B.adjoint()));
  return {S * pp.u1, pp.lambda1};
}

double sinr(const ComplexVector& w, const ComplexMatrix& Q, const ComplexMatrix& R1) {
  if (w.size() != Q.rows() || w.size() != R1.rows()) throw InvalidInput("sinr: dimension mismatch");
  const double den = w.dot(R1 * w).real();
  if (!(den > 0.0)) throw InvalidInput("sinr: w^H R1 w must be positive");
  return (Q.adjoint() * w).squaredNorm() / den;
}

double worst_case_sinr(const SignalSetSpec& signal, const IncSetSpec& inc, const ComplexVector& w,
                       const conic::SolverSettings& settings) {
  const double num = worst_case_signal_power(signal, w);
  const double den = worst_case_inc_power(inc, w, settings);
  if (!(den > 0.0)) throw InvalidInput("worst_case_sinr: worst-case covariance power is zero");
  return num / den;
}

MinimaxSolution solve_rank_one(const SignalSetSpec& signal, const IncSetSpec& inc,
                               const conic::SolverSettings& settings) {
  if (signal.center.cols() != 1) throw InvalidInput("solve_rank_one: signal set must have M = 1");
  const ScaledSolve s = solve_scaled(signal, inc, settings);
  MinimaxSolution m;
  m.Q_star = s.Q;
  m.R1_star = s.R1;
  fill_diagnostics(m, s);
  const ComplexVector a = s.Q.col(0);
  const ComplexVector Ria = checked_inv_sqrt(s.R1) * a;  // R1^{-1/2} a
  const ComplexVector Ra = s.R1.ldlt().solve(a);
  m.lambda_star = Ria.squaredNorm();
  m.w_star = Ra / Ria.norm();
  m.w_star *= canonical_phase(m.w_star);
  return m;
}

}  // namespace rab

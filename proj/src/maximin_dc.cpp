#include "rab/maximin_dc.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "rab/conic/builder.hpp"
#include "rab/conic/solver.hpp"
#include "rab/errors.hpp"
#include "set_constraints.hpp"

namespace rab {

using conic::Cone;
using conic::Index;
using conic::Vector;

namespace {

double dc_value(const SignalSetSpec& s, const ComplexVector& w) {
  return (s.center.adjoint() * w).norm() - s.radius * w.norm();
}

// Variables of one linearized step: w = a + j b, then t >= ||w||.
struct StepVars {
  Index a, b, t;
};

StepVars add_step_vars(conic::ConicBuilder& B, Index N, const ComplexVector& g, double eta) {
  StepVars v;
  v.a = B.add_variables(N);
  v.b = B.add_variables(N);
  v.t = B.add_variables(1);
  // maximize Re(g^H w) - eta t
  for (Index i = 0; i < N; ++i) {
    B.set_objective(v.a + i, -g(i).real());
    B.set_objective(v.b + i, -g(i).imag());
  }
  B.set_objective(v.t, eta);
  const Index row = B.add_block(Cone::soc(2 * N + 1), Vector::Zero(2 * N + 1));
  B.add_term(row, v.t, 1.0);
  for (Index i = 0; i < N; ++i) {
    B.add_term(row + 1 + i, v.a + i, 1.0);
    B.add_term(row + 1 + N + i, v.b + i, 1.0);
  }
  return v;
}

ComplexVector read_w(const conic::ConicSolution& sol, const StepVars& v, Index N) {
  ComplexVector w(N);
  for (Index i = 0; i < N; ++i) w(i) = Complex(sol.x(v.a + i), sol.x(v.b + i));
  return w;
}

using Step = std::function<conic::ConicSolution(const ComplexVector& g, StepVars& vars)>;
using Rescale = std::function<ComplexVector(const ComplexVector& w)>;

DCResult iterate(const SignalSetSpec& signal, double c, ComplexVector w, const Step& step,
                 const Rescale& rescale, const DCSettings& settings) {
  const Index N = signal.center.rows();
  DCResult r;
  double f = dc_value(signal, w);
  r.objective_trace.push_back(f);
  for (int k = 1; k <= settings.max_iter; ++k) {
    const ComplexVector QhW = signal.center.adjoint() * w;
    const double amp = QhW.norm();
    if (amp == 0.0) break;
    const ComplexVector g = signal.center * QhW / amp;
    StepVars vars{};
    const auto sol = step(g, vars);
    r.iterations = k;
    if (sol.status != conic::SolveStatus::Optimal)
      throw SolverFailure("maximin dc: iteration " + std::to_string(k) + ": solver returned " +
                          conic::to_string(sol.status));
    const ComplexVector w_new = rescale ? rescale(read_w(sol, vars, N)) : read_w(sol, vars, N);
    const double f_new = dc_value(signal, w_new);
    if (f_new < f) {
      // no ascent left beyond solver accuracy
      r.converged = true;
      break;
    }
    const bool small = std::abs(f_new - f) <= settings.tol * std::max(std::abs(f_new), 1e-300);
    w = w_new;
    f = f_new;
    r.objective_trace.push_back(f);
    if (small) {
      r.converged = true;
      break;
    }
  }
  r.w = w / std::sqrt(c);
  r.objective = std::max(f, 0.0);
  return r;
}

ComplexVector checked_start(const SignalSetSpec& signal, const ComplexVector& w0) {
  if (w0.size() != signal.center.rows()) throw InvalidInput("maximin dc: w0 dimension mismatch");
  if (!w0.allFinite() || (signal.center.adjoint() * w0).norm() == 0.0)
    throw InvalidInput("maximin dc: degenerate start (Qc^H w0 = 0); choose another w0");
  return w0;
}

void check_pair(const SignalSetSpec& signal, const IncSetSpec& inc) {
  validate(signal);
  validate(inc);
  if (signal.center.rows() != inc.center.rows())
    throw InvalidInput("maximin dc: signal and covariance sets have different array sizes");
}

}  // namespace

ComplexVector default_start(const SignalSetSpec& signal, const IncSetSpec& inc) {
  check_pair(signal, inc);
  const Index N = inc.center.rows();
  const ComplexMatrix P = inc.center + inc.radius * ComplexMatrix::Identity(N, N);
  const ComplexVector q1 = svd(signal.center).U.col(0);
  ComplexVector w = P.ldlt().solve(q1);
  w /= std::sqrt(w.dot(P * w).real());
  return w;
}

DCResult solve_maximin_ball_dc(const SignalSetSpec& signal, const IncSetSpec& inc,
                               std::optional<ComplexVector> w0, const DCSettings& settings) {
  check_pair(signal, inc);
  if (inc.trace) throw InvalidInput("solve_maximin_ball_dc: covariance set has a trace interval");
  if (inc.pd_floor > 0.0 && lambda_min(inc.center) < inc.pd_floor)
    throw InvalidInput("solve_maximin_ball_dc: pd_floor cuts the covariance ball");
  const Index N = inc.center.rows();
  const double c = detail::covariance_scale(inc);
  const SignalSetSpec sig = detail::scaled(signal, c);
  const IncSetSpec is = detail::scaled(inc, c);
  const ComplexMatrix P = is.center + is.radius * ComplexMatrix::Identity(N, N);
  const ComplexMatrix S = sqrt_psd(P);

  ComplexVector w = std::sqrt(c) * checked_start(signal, w0 ? *w0 : default_start(signal, inc));
  w /= std::sqrt(w.dot(P * w).real());

  const Step step = [&](const ComplexVector& g, StepVars& vars) {
    conic::ConicBuilder B;
    vars = add_step_vars(B, N, g, sig.radius);
    // || P^{1/2} w || <= 1
    const Index row = B.add_block(Cone::soc(2 * N + 1), Vector::Unit(2 * N + 1, 0));
    for (Index i = 0; i < N; ++i)
      for (Index j = 0; j < N; ++j) {
        const Complex s = S(i, j);
        B.add_term(row + 1 + i, vars.a + j, s.real());
        B.add_term(row + 1 + i, vars.b + j, -s.imag());
        B.add_term(row + 1 + N + i, vars.a + j, s.imag());
        B.add_term(row + 1 + N + i, vars.b + j, s.real());
      }
    return conic::solve(B.build(), settings.solver);
  };
  // onto the ellipsoid boundary exactly, removing solver slack
  const Rescale onto = [&](const ComplexVector& v) -> ComplexVector {
    const double q = v.dot(P * v).real();
    return q > 0.0 ? ComplexVector(v / std::sqrt(q)) : v;
  };
  return iterate(sig, c, w, step, onto, settings);
}

DCResult solve_maximin_trace_dc(const SignalSetSpec& signal, const IncSetSpec& inc,
                                std::optional<ComplexVector> w0, const DCSettings& settings) {
  check_pair(signal, inc);
  if (!inc.trace) throw InvalidInput("solve_maximin_trace_dc: a trace interval is required");
  const Index N = inc.center.rows();
  const double c = detail::covariance_scale(inc);
  const SignalSetSpec sig = detail::scaled(signal, c);
  const IncSetSpec is = detail::scaled(inc, c);
  // the floor enters as pd_floor ||w||^2 on top of a floor-free set
  const IncSetSpec shifted = detail::floor_shifted(is);
  const double eps = is.pd_floor;

  ComplexVector w = std::sqrt(c) * checked_start(signal, w0 ? *w0 : default_start(signal, inc));
  w /= std::sqrt(worst_case_inc_power(is, w, settings.solver));

  const Step step = [&](const ComplexVector& g, StepVars& vars) {
    conic::ConicBuilder B;
    vars = add_step_vars(B, N, g, sig.radius);
    // worst-case power of w at most 1, through the multipliers
    conic::HermitianLmi lmi(N + 1);
    const detail::IncDualLayout L = detail::add_inc_dual(B, shifted, lmi);
    for (Index i = 0; i < N; ++i) {
      lmi.add_term(i, N, vars.a + i, 1.0);
      lmi.add_term(i, N, vars.b + i, Complex(0.0, 1.0));
    }
    lmi.add_constant(N, N, 1.0);
    lmi.emit(B);
    const Index row = B.add_block(Cone::nonneg(1), Vector::Ones(1));
    for (const auto& [var, coef] : L.objective) B.add_term(row, var, -coef);
    if (eps > 0.0) {
      // eps ||w||^2 <= s:  ||(1 - s, 2 sqrt(eps) w)|| <= 1 + s
      const Index sv = B.add_variables(1);
      B.add_term(row, sv, -1.0);
      Vector head = Vector::Zero(2 * N + 2);
      head(0) = 1.0;
      head(1) = 1.0;
      const Index cone = B.add_block(Cone::soc(2 * N + 2), head);
      B.add_term(cone, sv, 1.0);
      B.add_term(cone + 1, sv, -1.0);
      const double k = 2.0 * std::sqrt(eps);
      for (Index i = 0; i < N; ++i) {
        B.add_term(cone + 2 + i, vars.a + i, k);
        B.add_term(cone + 2 + N + i, vars.b + i, k);
      }
    }
    return conic::solve(B.build(), settings.solver);
  };
  return iterate(sig, c, w, step, nullptr, settings);
}

}  // namespace rab

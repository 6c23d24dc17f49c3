#include "set_constraints.hpp"

#include <algorithm>
#include <cmath>

#include "rab/errors.hpp"

namespace rab::detail {

using conic::Cone;
using conic::Vector;

void add_hermitian_params(conic::HermitianLmi& lmi, Index at, Index n, Index first, double sign) {
  for (Index i = 0; i < n; ++i) lmi.add_term(at + i, at + i, first + i, sign);
  const double h = sign / std::sqrt(2.0);
  Index k = first + n;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) {
      lmi.add_term(at + i, at + j, k, Complex(h, 0.0));
      lmi.add_term(at + i, at + j, k + 1, Complex(0.0, h));
      k += 2;
    }
}

void add_complex_params(conic::HermitianLmi& lmi, Index row_at, Index col_at, Index rows,
                        Index cols, Index first, double sign) {
  const Index count = rows * cols;
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const Index k = first + i + j * rows;
      lmi.add_term(row_at + i, col_at + j, k, Complex(sign, 0.0));
      lmi.add_term(row_at + i, col_at + j, k + count, Complex(0.0, sign));
    }
}

namespace {

// Equality rows var_k = value_k.
void fix_variables(conic::ConicBuilder& b, Index first, const RealVector& value) {
  const Index row = b.add_block(Cone::zero(value.size()), -value);
  for (Index k = 0; k < value.size(); ++k) b.add_term(row + k, first + k, 1.0);
}

}  // namespace

void constrain_signal(conic::ConicBuilder& b, const SignalSetSpec& spec, Index q_first) {
  const Index N = spec.center.rows(), M = spec.center.cols();
  const RealVector c = vec_isometric(spec.center);
  if (spec.radius == 0.0) {
    fix_variables(b, q_first, c);
    return;
  }
  if (spec.norm == NormKind::Frobenius) {
    Vector constant(c.size() + 1);
    constant << spec.radius, c;
    const Index row = b.add_block(Cone::soc(constant.size()), constant);
    for (Index k = 0; k < c.size(); ++k) b.add_term(row + 1 + k, q_first + k, -1.0);
    return;
  }
  // [[eta I, Q - Qc], [(Q - Qc)^H, I]] >= 0
  conic::HermitianLmi lmi(N + M);
  for (Index i = 0; i < N; ++i) lmi.add_constant(i, i, spec.radius * spec.radius);
  for (Index i = 0; i < M; ++i) lmi.add_constant(N + i, N + i, 1.0);
  for (Index j = 0; j < M; ++j)
    for (Index i = 0; i < N; ++i) lmi.add_constant(i, N + j, -spec.center(i, j));
  add_complex_params(lmi, 0, N, N, M, q_first, 1.0);
  lmi.emit(b);
}

void constrain_inc(conic::ConicBuilder& b, const IncSetSpec& spec, Index r_first,
                   bool always_psd) {
  const Index N = spec.center.rows();
  const RealVector c = vec_hermitian(spec.center);
  if (spec.radius == 0.0) {
    fix_variables(b, r_first, c);
  } else if (spec.norm == NormKind::Frobenius) {
    Vector constant(c.size() + 1);
    constant << spec.radius, c;
    const Index row = b.add_block(Cone::soc(constant.size()), constant);
    for (Index k = 0; k < c.size(); ++k) b.add_term(row + 1 + k, r_first + k, -1.0);
  } else {
    for (double sign : {1.0, -1.0}) {
      // radius I - sign (R - Rc) >= 0
      conic::HermitianLmi lmi(N);
      lmi.add_constant(spec.radius * ComplexMatrix::Identity(N, N) + sign * spec.center);
      add_hermitian_params(lmi, 0, N, r_first, -sign);
      lmi.emit(b);
    }
  }

  if (spec.trace) {
    const auto [lo, hi] = *spec.trace;
    if (lo == hi) {
      const Index row = b.add_block(Cone::zero(1), Vector::Constant(1, -lo));
      for (Index i = 0; i < N; ++i) b.add_term(row, r_first + i, 1.0);
    } else {
      Vector constant(2);
      constant << -lo, hi;
      const Index row = b.add_block(Cone::nonneg(2), constant);
      for (Index i = 0; i < N; ++i) {
        b.add_term(row, r_first + i, 1.0);
        b.add_term(row + 1, r_first + i, -1.0);
      }
    }
  }

  if (spec.pd_floor > 0.0 || always_psd) {
    conic::HermitianLmi lmi(N);
    if (spec.pd_floor > 0.0) lmi.add_constant(-spec.pd_floor * ComplexMatrix::Identity(N, N));
    add_hermitian_params(lmi, 0, N, r_first, 1.0);
    lmi.emit(b);
  }
}

double IncDualLayout::x(const RealVector& sol) const {
  if (!tight) return sol(xy);
  return sol(xy) < 0.0 ? -sol(xy) : 0.0;
}

double IncDualLayout::y(const RealVector& sol) const {
  if (!tight) return sol(xy + 1);
  return sol(xy) > 0.0 ? sol(xy) : 0.0;
}

IncDualLayout add_inc_dual(conic::ConicBuilder& b, const IncSetSpec& spec,
                           conic::HermitianLmi& lmi) {
  const Index N = spec.center.rows();
  const Index np = hermitian_param_count(N);
  const RealVector rc = vec_hermitian(spec.center);
  const auto [lo, hi] = *spec.trace;
  IncDualLayout L;
  L.tight = lo == hi;
  const bool split = spec.norm == NormKind::Spectral && spec.radius > 0.0;
  L.xy = b.add_variables(L.tight ? 1 : 2);
  L.X = b.add_variables(np);
  if (split) L.Y = b.add_variables(np);

  if (L.tight) {
    L.objective.emplace_back(L.xy, lo);
  } else {
    L.objective.emplace_back(L.xy, -lo);
    L.objective.emplace_back(L.xy + 1, hi);
    const Index row = b.add_block(Cone::nonneg(2), Vector::Zero(2));
    b.add_term(row, L.xy, 1.0);
    b.add_term(row + 1, L.xy + 1, 1.0);
  }

  if (!split) {
    for (Index k = 0; k < np; ++k) L.objective.emplace_back(L.X + k, -rc(k));
    if (spec.radius > 0.0) {
      const Index t = b.add_variables(1);
      L.objective.emplace_back(t, spec.radius);
      const Index row = b.add_block(Cone::soc(np + 1), Vector::Zero(np + 1));
      b.add_term(row, t, 1.0);
      for (Index k = 0; k < np; ++k) b.add_term(row + 1 + k, L.X + k, 1.0);
    }
  } else {
    for (Index k = 0; k < np; ++k) {
      const double tr = k < N ? spec.radius : 0.0;
      L.objective.emplace_back(L.X + k, tr - rc(k));
      L.objective.emplace_back(L.Y + k, tr + rc(k));
    }
    for (Index v : {L.X, L.Y}) {
      conic::HermitianLmi psd(N);
      add_hermitian_params(psd, 0, N, v, 1.0);
      psd.emit(b);
    }
  }

  for (Index i = 0; i < N; ++i) {
    if (L.tight) {
      lmi.add_term(i, i, L.xy, 1.0);
    } else {
      lmi.add_term(i, i, L.xy, -1.0);
      lmi.add_term(i, i, L.xy + 1, 1.0);
    }
  }
  add_hermitian_params(lmi, 0, N, L.X, -1.0);
  if (split) add_hermitian_params(lmi, 0, N, L.Y, 1.0);
  return L;
}

IncSetSpec floor_shifted(const IncSetSpec& spec) {
  const Index N = spec.center.rows();
  const double eps = spec.pd_floor;
  const double shift = static_cast<double>(N) * eps;
  if (spec.trace && spec.trace->upper < shift)
    throw InfeasibleSet("covariance set: trace upper bound below N * pd_floor");
  if (eps > lambda_min(spec.center) + 1e-12 * spec.center.norm())
    throw InvalidInput("pd_floor above the smallest eigenvalue of the center is not supported here");
  IncSetSpec out = spec;
  out.pd_floor = 0.0;
  out.center -= eps * ComplexMatrix::Identity(N, N);
  if (spec.trace) {
    // a negative lower bound is implied by R' >= 0
    out.trace = TraceInterval{std::max(0.0, spec.trace->lower - shift), spec.trace->upper - shift};
  }
  return out;
}

IncSetSpec scaled(const IncSetSpec& spec, double c) {
  IncSetSpec out = spec;
  out.center /= c;
  out.radius /= c;
  out.pd_floor /= c;
  if (out.trace) {
    out.trace->lower /= c;
    out.trace->upper /= c;
  }
  return out;
}

SignalSetSpec scaled(const SignalSetSpec& spec, double c) {
  SignalSetSpec out = spec;
  const double s = std::sqrt(c);
  out.center /= s;
  out.radius /= s;
  return out;
}

double covariance_scale(const IncSetSpec& spec) {
  const double s = spectral_norm(spec.center);
  return s > 0.0 ? s : 1.0;
}

}  // namespace rab::detail

#pragma once

// Conic encodings of the uncertainty sets shared by the worst-case power
// problem and the minimax build.  Hermitian variables use the vec_hermitian
// layout; complex matrix variables use vec_isometric.

#include <utility>
#include <vector>

#include "rab/conic/builder.hpp"
#include "rab/uncertainty.hpp"

namespace rab::detail {

using conic::Index;

/// Adds sign * H(p) to the diagonal block of lmi starting at `at`.
void add_hermitian_params(conic::HermitianLmi& lmi, Index at, Index n, Index first, double sign);

/// Adds sign * Q(q) to the off-diagonal block at (row_at, col_at); requires
/// row_at + rows <= col_at so every entry lands in the upper triangle.
void add_complex_params(conic::HermitianLmi& lmi, Index row_at, Index col_at, Index rows,
                        Index cols, Index first, double sign);

/// Ball around the signal center, on variables q (vec_isometric layout).
void constrain_signal(conic::ConicBuilder& b, const SignalSetSpec& spec, Index q_first);

/// Ball, trace interval and floor on variables p (vec_hermitian layout).  The
/// floor block is emitted when pd_floor > 0 or when `always_psd` is set.
void constrain_inc(conic::ConicBuilder& b, const IncSetSpec& spec, Index r_first,
                   bool always_psd);

/// Multipliers of the worst-case power problem max_{R1 in set} v^H R1 v.
/// add_inc_dual puts (y - x) I - X (+ Y) into the top-left n x n block of lmi;
/// the caller supplies v in the last column and 1 in the corner.
struct IncDualLayout {
  Index xy = -1;  // x, y (or one free t = y - x when the trace bounds coincide)
  Index X = -1;
  Index Y = -1;  // spectral sets with a positive radius only
  bool tight = false;
  std::vector<std::pair<Index, double>> objective;  // dual objective terms

  double x(const RealVector& sol) const;
  double y(const RealVector& sol) const;
};

/// Requires a trace interval and no floor.
IncDualLayout add_inc_dual(conic::ConicBuilder& b, const IncSetSpec& spec,
                           conic::HermitianLmi& lmi);

/// R1 = pd_floor I + R' maps the set onto a floor-free set of R' with the
/// center and trace bounds shifted.  Requires pd_floor <= lambda_min(center);
/// throws InfeasibleSet when the shifted upper trace bound is negative.
IncSetSpec floor_shifted(const IncSetSpec& spec);

/// Same sets expressed in units where the covariance is divided by c.
IncSetSpec scaled(const IncSetSpec& spec, double c);
SignalSetSpec scaled(const SignalSetSpec& spec, double c);

/// Scale that brings the covariance center to unit spectral norm (1 if zero).
double covariance_scale(const IncSetSpec& spec);

}  // namespace rab::detail

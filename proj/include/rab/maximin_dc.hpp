#pragma once

// Difference-of-convex iteration for the maximin problem
//
//   maximize ||Qc^H w|| - sqrt(eta) ||w||   s.t.  max_{R1 in set} w^H R1 w <= 1,
//
// linearizing the first norm at the current iterate.  The ball-only variant
// solves an SOCP per step; the trace-interval variant expresses the constraint
// through the multipliers of the worst-case power problem and solves an SDP.

#include <optional>
#include <vector>

#include "rab/conic/problem.hpp"
#include "rab/linalg.hpp"
#include "rab/uncertainty.hpp"

namespace rab {

struct DCSettings {
  double tol = 1e-6;  // relative objective change
  int max_iter = 50;
  conic::SolverSettings solver;
};

struct DCResult {
  ComplexVector w;
  double objective = 0.0;  // ||Qc^H w|| - sqrt(eta) ||w||, clipped at 0
  std::vector<double> objective_trace;  // unclipped, one entry per accepted iterate, w0 first
  int iterations = 0;
  bool converged = false;
};

/// (Rc + radius I)^{-1} q1 scaled so that w^H (Rc + radius I) w = 1, with q1 the
/// principal left singular vector of the signal center.
ComplexVector default_start(const SignalSetSpec& signal, const IncSetSpec& inc);

/// Requires a covariance set without trace interval.  A supplied w0 is rescaled
/// onto the constraint boundary.
DCResult solve_maximin_ball_dc(const SignalSetSpec& signal, const IncSetSpec& inc,
                               std::optional<ComplexVector> w0 = std::nullopt,
                               const DCSettings& settings = {});

/// Requires a trace interval; the norm of the covariance ball selects the
/// Frobenius or spectral multiplier form.  A pd_floor up to lambda_min of the
/// center is supported.
DCResult solve_maximin_trace_dc(const SignalSetSpec& signal, const IncSetSpec& inc,
                                std::optional<ComplexVector> w0 = std::nullopt,
                                const DCSettings& settings = {});

}  // namespace rab

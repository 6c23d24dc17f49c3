#pragma once

#include "rab/conic/problem.hpp"

namespace rab::conic {

/// Primal-dual interior-point method on the homogeneous self-dual embedding
/// with Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
///
/// Returns status Optimal when the primal, dual and gap residuals are all
/// below settings.tol.  Infeasible / Unbounded are reported with the
/// corresponding certificate in y (resp. x, s), normalised so that
/// b^T y = -1 (resp. c^T x = -1).  Throws InvalidInput when validate() fails.
ConicSolution solve(const ConicProblem& problem, const SolverSettings& settings = {});

}  // namespace rab::conic

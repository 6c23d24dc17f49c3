#pragma once

// Single-shot convex program for the minimax SINR problem:
//
//   minimize lambda  s.t.  [[R1, Q], [Q^H, lambda I]] >= 0,  Q in signal set,  R1 in inc set
//
// and extraction of the beamformer w* = R1*^{-1/2} u1*.

#include "rab/conic/problem.hpp"
#include "rab/linalg.hpp"
#include "rab/uncertainty.hpp"

namespace rab {

/// Variable layout of build_minimax: lambda, then Q (vec_isometric), then R1
/// (vec_hermitian).
struct MinimaxLayout {
  Eigen::Index lambda = 0;
  Eigen::Index q_first = 1;
  Eigen::Index r_first = 0;
  Eigen::Index N = 0, M = 0;
};

struct MinimaxSolution {
  double lambda_star = 0.0;
  ComplexMatrix Q_star;
  ComplexMatrix R1_star;
  ComplexVector w_star;

  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  int iterations = 0;
  conic::Residuals residuals;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double r1_condition = 0.0;  // lambda_max / lambda_min of R1*
};

struct Beamformer {
  ComplexVector w;
  double lambda = 0.0;
};

MinimaxLayout minimax_layout(const SignalSetSpec& signal, const IncSetSpec& inc);

/// Throws InvalidInput when either spec is invalid or the dimensions disagree.
conic::ConicProblem build_minimax(const SignalSetSpec& signal, const IncSetSpec& inc);

/// Throws SolverFailure on a non-optimal solve and NotPositiveDefinite when
/// R1* is singular to tolerance (raise pd_floor to avoid this).
MinimaxSolution solve_minimax(const SignalSetSpec& signal, const IncSetSpec& inc,
                              const conic::SolverSettings& settings = {});

/// w = R1^{-1/2} u1 with u1 the principal eigenvector of R1^{-1/2} Q Q^H R1^{-1/2};
/// lambda is the matching eigenvalue.
Beamformer extract_beamformer(const ComplexMatrix& Q, const ComplexMatrix& R1);

/// w^H Q Q^H w / w^H R1 w.
double sinr(const ComplexVector& w, const ComplexMatrix& Q, const ComplexMatrix& R1);

/// Smallest SINR of w over both sets.  Q and R1 enter separately, so this is
/// the worst signal power over the worst covariance power.
double worst_case_sinr(const SignalSetSpec& signal, const IncSetSpec& inc, const ComplexVector& w,
                       const conic::SolverSettings& settings = {});

/// Rank-one signal sets: minimizes a^H R1^{-1} a and returns the MVDR-form
/// beamformer R1*^{-1} a* / ||R1*^{-1/2} a*||.
MinimaxSolution solve_rank_one(const SignalSetSpec& signal, const IncSetSpec& inc,
                               const conic::SolverSettings& settings = {});

}  // namespace rab

#pragma once

// Sampling checks of the saddle-point, optimality, derivative and convexity
// properties on solved instances.  Violations are reported relative to
// max(1, |reference value|) unless stated otherwise.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rab/linalg.hpp"
#include "rab/minimax.hpp"
#include "rab/uncertainty.hpp"

namespace rab {

struct CheckReport {
  std::string name;
  int samples = 0;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  bool skipped = false;
  std::string note;
  std::vector<std::string> witnesses;  // at most 5
};

/// lambda_1(Q^H R1^{-1} Q).
double f_value(const ComplexMatrix& Q, const ComplexMatrix& R1);

/// ||Q^H w||^2 / (w^H R1 w).
double h_value(const ComplexMatrix& Q, const ComplexMatrix& R1, const ComplexVector& w);

/// Analytic directional derivatives of f: Re tr((2 w w^H Q)^H D) and -lambda w^H D w,
/// with w = R1^{-1/2} u1.
double directional_derivative_Q(const ComplexMatrix& Q, const ComplexMatrix& R1,
                                const ComplexMatrix& D);
double directional_derivative_R1(const ComplexMatrix& Q, const ComplexMatrix& R1,
                                 const ComplexMatrix& D);

/// Members of the sets.  A direction is drawn from a complex Gaussian, scaled
/// to a radius fraction (uniform on [0, 1], or exactly 1 for every other
/// sample), clipped to the PSD floor and moved into the trace interval.  If the
/// result still leaves the covariance set, it is pulled toward `anchor` (a known
/// member) by bisection.
ComplexMatrix sample_signal_member(const SignalSetSpec& spec, std::mt19937_64& rng,
                                   bool boundary);
ComplexMatrix sample_inc_member(const IncSetSpec& spec, const ComplexMatrix& anchor,
                                std::mt19937_64& rng, bool boundary);

/// S(w, Q*, R1*) <= S(w*, Q*, R1*) <= S(w*, Q, R1).  The first sample on each side is
/// exact (principal direction, worst-case SINR of w*); the rest are random.
CheckReport check_saddle_point(const MinimaxSolution& sol, const SignalSetSpec& signal,
                               const IncSetSpec& inc, int n_samples, std::uint64_t seed,
                               double tol = 1e-6);

/// 2 Re(w*^H Q Q*^H w*) - w*^H (lambda* (R1 - R1*) + 2 Q* Q*^H) w* >= 0 over members.
CheckReport check_optimality_condition(const ComplexMatrix& Q_star, const ComplexMatrix& R1_star,
                                       const ComplexVector& w_star, double lambda_star,
                                       const SignalSetSpec& signal, const IncSetSpec& inc,
                                       int n_samples, std::uint64_t seed, double tol = 1e-6);

/// Analytic derivative against central differences over random unit directions.
/// Steps are h ||Q||_F for Q and h lambda_min(R1) for R1.  Skipped when the relative
/// gap of the top eigenvalue of Q^H R1^{-1} Q is below 100 h.
CheckReport check_grad_Q(const ComplexMatrix& Q, const ComplexMatrix& R1, double h_step = 1e-5,
                         int directions = 20, std::uint64_t seed = 1, double tol = 1e-4);
CheckReport check_grad_R1(const ComplexMatrix& Q, const ComplexMatrix& R1, double h_step = 1e-5,
                          int directions = 20, std::uint64_t seed = 1, double tol = 1e-4);

enum class ConvexTarget { F, H };

/// Jensen inequality on random pairs: f over (Q, R1 positive definite), h over
/// (Q, R1 PSD) for a fixed w.  Pairs are N x M.
CheckReport check_convexity(ConvexTarget target, const std::optional<ComplexVector>& fixed_w,
                            int n_pairs, std::uint64_t seed, Eigen::Index N = 4,
                            Eigen::Index M = 2, double tol = 1e-9);

/// lambda* against S(w*, Q*, R1*), relative to max(1, lambda*).
CheckReport check_value_chain(const MinimaxSolution& sol, double tol = 1e-6);

/// dc_objective^2 <= minimax_lambda + tol (absolute; the DC value is a lower bound).
CheckReport check_value_equivalence(double minimax_lambda, double dc_objective,
                                    double tol = 1e-6);

}  // namespace rab

#pragma once

// Real symmetric-cone programs in the form
//
//     minimize    c^T x
//     subject to  A x + s = b,   s in K = K_1 x ... x K_p
//
// with each K_i a zero cone {0}^k, the nonnegative orthant R_+^k, a second-order
// cone {(t, v) : ||v|| <= t} of total dimension k, or the PSD cone of symmetric
// side x side matrices stored in scaled upper-triangular vectorisation (see svec).
//
// The dual problem is
//
//     maximize   -b^T y   subject to  A^T y + c = 0,   y in K*
//
// where K* replaces zero cones by free variables and is K otherwise.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rab::conic {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ConeKind { Zero, Nonneg, SecondOrder, Psd };

struct Cone {
  ConeKind kind;
  Index dim;  // zero/nonneg/soc: number of entries; psd: matrix side

  Index size() const { return kind == ConeKind::Psd ? dim * (dim + 1) / 2 : dim; }

  static Cone zero(Index k) { return {ConeKind::Zero, k}; }
  static Cone nonneg(Index k) { return {ConeKind::Nonneg, k}; }
  static Cone soc(Index k) { return {ConeKind::SecondOrder, k}; }
  static Cone psd(Index side) { return {ConeKind::Psd, side}; }
};

struct ConicProblem {
  Vector c;
  Matrix A;
  Vector b;
  std::vector<Cone> cones;

  Index num_vars() const { return c.size(); }
  Index num_rows() const { return b.size(); }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter, NumericalFailure };

const char* to_string(SolveStatus s);

struct Residuals {
  double primal = 0.0;  // ||A x + s - b|| / (1 + ||b||)
  double dual = 0.0;    // ||A^T y + c|| / (1 + ||c||)
  double gap = 0.0;     // |c^T x + b^T y| / (1 + |c^T x|)
};

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Vector x;
  Vector y;
  Vector s;
  double primal_objective = 0.0;  // c^T x
  double dual_objective = 0.0;    // -b^T y
  Residuals residuals;
  int iterations = 0;
};

struct SolverSettings {
  double tol = 1e-8;
  int max_iter = 100;
  int refinement_steps = 2;
  bool verbose = false;
};

struct ValidationIssue {
  std::string field;  // e.g. "A.rows", "cones[2].dim", "c[5]"
  std::string message;
};

/// Empty result means the problem is well formed.
std::vector<ValidationIssue> validate(const ConicProblem& problem);

/// Residuals of an arbitrary (x, y, s) against the problem; no cone membership test.
Residuals residuals(const ConicProblem& problem, const Vector& x, const Vector& y,
                    const Vector& s);
Residuals residuals(const ConicProblem& problem, const ConicSolution& solution);

// Scaled vectorisation of symmetric matrices: upper triangle, column by column
// (entry (i, j), i <= j), off-diagonal entries multiplied by sqrt(2).
Index svec_size(Index side);
Index svec_index(Index i, Index j);  // requires i <= j
Vector svec(const Matrix& S);
Matrix smat(const Eigen::Ref<const Vector>& v, Index side);

}  // namespace rab::conic

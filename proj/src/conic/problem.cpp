#include "rab/conic/problem.hpp"

#include <cmath>
#include <string>

namespace rab::conic {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

template <class Derived>
void check_finite(const Eigen::MatrixBase<Derived>& M, const std::string& name,
                  std::vector<ValidationIssue>& out, bool is_matrix) {
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i)
      if (!std::isfinite(M(i, j))) {
        std::string where = !is_matrix ? name + "[" + std::to_string(i) + "]"
                                           : name + "(" + std::to_string(i) + "," +
                                                 std::to_string(j) + ")";
        out.push_back({where, "non-finite value"});
        return;
      }
}

}  // namespace

std::vector<ValidationIssue> validate(const ConicProblem& p) {
  std::vector<ValidationIssue> out;
  if (p.A.rows() != p.b.size())
    out.push_back({"A.rows", "A has " + std::to_string(p.A.rows()) + " rows but b has " +
                                 std::to_string(p.b.size()) + " entries"});
  if (p.A.cols() != p.c.size())
    out.push_back({"A.cols", "A has " + std::to_string(p.A.cols()) + " columns but c has " +
                                 std::to_string(p.c.size()) + " entries"});
  Index total = 0;
  for (std::size_t k = 0; k < p.cones.size(); ++k) {
    const Cone& cone = p.cones[k];
    const std::string field = "cones[" + std::to_string(k) + "].dim";
    if (cone.dim < 1) out.push_back({field, "cone dimension must be positive"});
    total += cone.dim > 0 ? cone.size() : 0;
  }
  if (total != p.b.size())
    out.push_back({"cones", "cone dimensions sum to " + std::to_string(total) +
                                " but the slack has " + std::to_string(p.b.size()) + " entries"});
  check_finite(p.c, "c", out, false);
  check_finite(p.b, "b", out, false);
  check_finite(p.A, "A", out, true);
  return out;
}

Residuals residuals(const ConicProblem& p, const Vector& x, const Vector& y, const Vector& s) {
  Residuals r;
  const Vector rp = p.A * x + s - p.b;
  const Vector rd = p.A.transpose() * y + p.c;
  r.primal = rp.norm() / (1.0 + p.b.norm());
  r.dual = rd.norm() / (1.0 + p.c.norm());
  const double cx = p.c.dot(x);
  r.gap = std::abs(cx + p.b.dot(y)) / (1.0 + std::abs(cx));
  return r;
}

Residuals residuals(const ConicProblem& p, const ConicSolution& sol) {
  return residuals(p, sol.x, sol.y, sol.s);
}

Index svec_size(Index side) { return side * (side + 1) / 2; }

Index svec_index(Index i, Index j) { return j * (j + 1) / 2 + i; }

Vector svec(const Matrix& S) {
  const Index n = S.rows();
  const double r2 = std::sqrt(2.0);
  Vector v(svec_size(n));
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) v(k++) = i == j ? S(i, j) : r2 * 0.5 * (S(i, j) + S(j, i));
  return v;
}

Matrix smat(const Eigen::Ref<const Vector>& v, Index side) {
  Matrix S(side, side);
  const double ir2 = 1.0 / std::sqrt(2.0);
  Index k = 0;
  for (Index j = 0; j < side; ++j)
    for (Index i = 0; i <= j; ++i) {
      if (i == j) {
        S(i, i) = v(k++);
      } else {
        S(i, j) = S(j, i) = v(k++) * ir2;
      }
    }
  return S;
}

}  // namespace rab::conic

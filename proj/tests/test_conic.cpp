#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "conic/cones.hpp"
#include "rab/conic/builder.hpp"
#include "rab/conic/io.hpp"
#include "rab/conic/problem.hpp"
#include "rab/conic/solver.hpp"
#include "rab/errors.hpp"

using namespace rab::conic;
using detail::Block;
using detail::ConeSet;
using detail::Scaling;

namespace {

ConeSet mixed_cones() {
  // nonneg(2), soc(4), psd(3)
  return ConeSet({{ConeKind::Nonneg, 2, 0, 2},
                  {ConeKind::SecondOrder, 4, 2, 4},
                  {ConeKind::Psd, 3, 6, 6}});
}

Vector random_interior(const ConeSet& K, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector u(K.size());
  for (Index i = 0; i < u.size(); ++i) u(i) = g(rng);
  const double m = K.min_eig(u);
  K.add_identity(u, 0.5 - m);
  return u;
}

void expect_optimal(const ConicProblem& p, const ConicSolution& sol) {
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  const double scale = 1.0 + p.b.norm() + p.c.norm();
  EXPECT_LE(sol.residuals.primal, 1e-7 * scale);
  EXPECT_LE(sol.residuals.dual, 1e-7 * scale);
  EXPECT_LE(std::abs(sol.primal_objective - sol.dual_objective),
            1e-7 * (1.0 + std::abs(sol.primal_objective)));
  EXPECT_GE(sol.primal_objective, sol.dual_objective - 1e-9 * (1.0 + std::abs(sol.primal_objective)));
}

}  // namespace

TEST(Svec, IsometryAndRoundTrip) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Matrix X(4, 4), Y(4, 4);
  for (Index i = 0; i < 16; ++i) {
    X(i) = g(rng);
    Y(i) = g(rng);
  }
  X = 0.5 * (X + X.transpose()).eval();
  Y = 0.5 * (Y + Y.transpose()).eval();
  EXPECT_NEAR(svec(X).dot(svec(Y)), (X * Y).trace(), 1e-14);
  EXPECT_LT((smat(svec(X), 4) - X).norm(), 1e-15);
  EXPECT_EQ(svec_index(0, 0), 0);
  EXPECT_EQ(svec_index(0, 1), 1);
  EXPECT_EQ(svec_index(1, 1), 2);
  EXPECT_EQ(svec_index(0, 2), 3);
}

TEST(Cones, NesterovToddScalingMapsBothPointsToLambda) {
  const ConeSet K = mixed_cones();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector s = random_interior(K, rng);
    const Vector z = random_interior(K, rng);
    Scaling W;
    ASSERT_TRUE(W.compute(K, s, z));
    EXPECT_LT((W.W(z) - W.lambda()).norm(), 1e-10 * (1.0 + W.lambda().norm()));
    EXPECT_LT((W.Winvt(s) - W.lambda()).norm(), 1e-10 * (1.0 + W.lambda().norm()));
    const Vector u = random_interior(K, rng);
    EXPECT_LT((W.Winv(W.W(u)) - u).norm(), 1e-10 * u.norm());
    EXPECT_LT((W.Wt(W.Winvt(u)) - u).norm(), 1e-10 * u.norm());
    // W^T is the adjoint of W
    const Vector v = random_interior(K, rng);
    EXPECT_NEAR(W.W(u).dot(v), u.dot(W.Wt(v)), 1e-10 * u.norm() * v.norm());
  }
}

TEST(Cones, LambdaDivideInvertsJordanProduct) {
  const ConeSet K = mixed_cones();
  std::mt19937_64 rng(3);
  const Vector s = random_interior(K, rng);
  const Vector z = random_interior(K, rng);
  Scaling W;
  ASSERT_TRUE(W.compute(K, s, z));
  const Vector u = random_interior(K, rng);
  const Vector x = W.lambda_divide(u);
  EXPECT_LT((K.product(W.lambda(), x) - u).norm(), 1e-10 * u.norm());
}

TEST(Cones, MaxStepMatchesBisection) {
  const ConeSet K = mixed_cones();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = random_interior(K, rng);
    Vector d(K.size());
    for (Index i = 0; i < d.size(); ++i) d(i) = g(rng);
    const double a = detail::max_step_general(K, x, d);
    ASSERT_TRUE(std::isfinite(a));
    EXPECT_GE(K.min_eig(x + 0.999 * a * d), -1e-9);
    EXPECT_LT(K.min_eig(x + 1.001 * a * d), 1e-12);
    // scaled variant agrees when x is the scaling point
    Scaling W;
    ASSERT_TRUE(W.compute(K, x, x));
    const double b = W.max_step(d);
    const double c = detail::max_step_general(K, W.lambda(), d);
    EXPECT_NEAR(b, c, 1e-8 * (1.0 + c));
  }
}

TEST(Validate, ReportsFieldPaths) {
  ConicProblem p;
  p.c = Vector::Ones(1);
  p.A = -Matrix::Ones(1, 1);
  p.b = -Vector::Ones(1);
  p.cones = {Cone::nonneg(1)};
  EXPECT_TRUE(validate(p).empty());

  ConicProblem q = p;
  q.cones = {Cone::nonneg(2)};
  auto issues = validate(q);
  ASSERT_FALSE(issues.empty());
  EXPECT_EQ(issues.front().field, "cones");

  ConicProblem r = p;
  r.A(0, 0) = std::nan("");
  issues = validate(r);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues.front().field, "A(0,0)");
  EXPECT_THROW(solve(r), rab::InvalidInput);
}

TEST(Residuals, ExactAndPerturbed) {
  ConicProblem p;  // min x s.t. x >= 1
  p.c = Vector::Ones(1);
  p.A = -Matrix::Ones(1, 1);
  p.b = -Vector::Ones(1);
  p.cones = {Cone::nonneg(1)};
  Vector x = Vector::Ones(1), y = Vector::Ones(1), s = Vector::Zero(1);
  auto r = residuals(p, x, y, s);
  EXPECT_NEAR(r.primal, 0.0, 1e-12);
  EXPECT_NEAR(r.dual, 0.0, 1e-12);
  EXPECT_NEAR(r.gap, 0.0, 1e-12);
  x(0) += 1e-3;
  r = residuals(p, x, y, s);
  EXPECT_NEAR(r.primal, 1e-3 / 2.0, 1e-12);

  ConicProblem empty;
  empty.c.resize(0);
  empty.A.resize(0, 0);
  empty.b.resize(0);
  r = residuals(empty, Vector(0), Vector(0), Vector(0));
  EXPECT_EQ(r.primal, 0.0);
  EXPECT_EQ(r.dual, 0.0);
  EXPECT_EQ(r.gap, 0.0);
}

TEST(Solve, LinearProgram) {
  ConicProblem p;
  p.c = Vector::Ones(1);
  p.A = -Matrix::Ones(1, 1);
  p.b = -Vector::Ones(1);
  p.cones = {Cone::nonneg(1)};
  const auto sol = solve(p);
  expect_optimal(p, sol);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-7);
  EXPECT_NEAR(sol.primal_objective, 1.0, 1e-7);
}

TEST(Solve, SecondOrderCone) {
  // min t s.t. (t, 3, 4) in SOC
  ConicProblem p;
  p.c = Vector::Ones(1);
  p.A = Matrix::Zero(3, 1);
  p.A(0, 0) = -1.0;
  p.b = Vector::Zero(3);
  p.b << 0.0, 3.0, 4.0;
  p.cones = {Cone::soc(3)};
  const auto sol = solve(p);
  expect_optimal(p, sol);
  EXPECT_NEAR(sol.x(0), 5.0, 1e-6);
}

TEST(Solve, TraceWithFixedDiagonal) {
  // variables svec(X) = (x11, sqrt2 x12, x22); min tr X, X11 = 1, X22 = 2, X psd
  ConicProblem p;
  p.c = Vector::Zero(3);
  p.c << 1.0, 0.0, 1.0;
  p.A = Matrix::Zero(5, 3);
  p.b = Vector::Zero(5);
  p.A(0, 0) = 1.0;
  p.b(0) = 1.0;
  p.A(1, 2) = 1.0;
  p.b(1) = 2.0;
  p.A.bottomRows(3) = -Matrix::Identity(3, 3);
  p.cones = {Cone::zero(2), Cone::psd(2)};
  const auto sol = solve(p);
  expect_optimal(p, sol);
  EXPECT_NEAR(sol.primal_objective, 3.0, 1e-7);
  EXPECT_NEAR(sol.x(1), 0.0, 1e-6);
  // slack eigenvalues
  Eigen::SelfAdjointEigenSolver<Matrix> es(smat(sol.s.tail(3), 2));
  EXPECT_GE(es.eigenvalues()(0), -1e-8);
}

TEST(Solve, LargestEigenvalueSdp) {
  // min t s.t. t I - C psd, C = [[2,1],[1,3]]  ->  t = (5 + sqrt 5) / 2
  ConicProblem p;
  p.c = Vector::Ones(1);
  p.A = Matrix::Zero(3, 1);
  p.A(0, 0) = -1.0;
  p.A(2, 0) = -1.0;
  Matrix C(2, 2);
  C << 2.0, 1.0, 1.0, 3.0;
  p.b = -svec(C);
  p.cones = {Cone::psd(2)};
  const auto sol = solve(p);
  expect_optimal(p, sol);
  EXPECT_NEAR(sol.x(0), 3.618033988749895, 1e-7);
}

TEST(Solve, MixedConesAgainstReferenceValue) {
  // min  3 x1 + x2 + t
  // s.t. x1 + x2 = 1, ||(x1 - 2, x2)|| <= t, [[x1, 1/2],[1/2, x2 + 1/2]] psd, x >= 0.
  // Reference optimum from an independent solver; the PSD block is active.
  ConicProblem p;
  p.c = Vector::Zero(3);
  p.c << 3.0, 1.0, 1.0;
  p.A = Matrix::Zero(1 + 3 + 3 + 2, 3);
  p.b = Vector::Zero(9);
  p.A.row(0) << 1.0, 1.0, 0.0;
  p.b(0) = 1.0;
  p.A.row(1) << 0.0, 0.0, -1.0;
  p.A.row(2) << -1.0, 0.0, 0.0;
  p.b(2) = -2.0;
  p.A.row(3) << 0.0, -1.0, 0.0;
  p.A.row(4) << -1.0, 0.0, 0.0;                // X11 = x1
  p.b(5) = 0.5 * std::sqrt(2.0);                // sqrt2 X12
  p.A.row(6) << 0.0, -1.0, 0.0;                // X22 = x2 + 1/2
  p.b(6) = 0.5;
  p.A.row(7) << -1.0, 0.0, 0.0;
  p.A.row(8) << 0.0, -1.0, 0.0;
  p.cones = {Cone::zero(1), Cone::soc(3), Cone::psd(2), Cone::nonneg(2)};
  const auto sol = solve(p);
  expect_optimal(p, sol);
  EXPECT_NEAR(sol.primal_objective, 3.363644840704, 1e-6);
}

TEST(Solve, InfeasibleCertificate) {
  // x >= 1 and x <= 0
  ConicProblem p;
  p.c = Vector::Ones(1);
  p.A = Matrix(2, 1);
  p.A << -1.0, 1.0;
  p.b = Vector(2);
  p.b << -1.0, 0.0;
  p.cones = {Cone::nonneg(2)};
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::Infeasible);
  EXPECT_NEAR(p.b.dot(sol.y), -1.0, 1e-9);
  EXPECT_LE((p.A.transpose() * sol.y).norm(), 1e-8);
  EXPECT_GE(sol.y.minCoeff(), -1e-12);
}

TEST(Solve, UnboundedCertificate) {
  // min -x s.t. x >= 1
  ConicProblem p;
  p.c = -Vector::Ones(1);
  p.A = -Matrix::Ones(1, 1);
  p.b = -Vector::Ones(1);
  p.cones = {Cone::nonneg(1)};
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::Unbounded);
  EXPECT_NEAR(p.c.dot(sol.x), -1.0, 1e-9);
  EXPECT_LE((p.A * sol.x + sol.s).norm(), 1e-8);
}

TEST(Solve, Deterministic) {
  ConicProblem p;
  p.c = Vector::Ones(1);
  p.A = Matrix::Zero(3, 1);
  p.A(0, 0) = -1.0;
  p.A(2, 0) = -1.0;
  Matrix C(2, 2);
  C << 2.0, 1.0, 1.0, 3.0;
  p.b = -svec(C);
  p.cones = {Cone::psd(2)};
  const auto a = solve(p);
  const auto b = solve(p);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.s, b.s);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Solve, NoVariables) {
  ConicProblem p;
  p.c.resize(0);
  p.A.resize(1, 0);
  p.b = Vector::Ones(1);
  p.cones = {Cone::nonneg(1)};
  EXPECT_EQ(solve(p).status, SolveStatus::Optimal);
  p.b(0) = -1.0;
  EXPECT_EQ(solve(p).status, SolveStatus::Infeasible);
}

TEST(Dump, RoundTripIsExact) {
  ConicProblem p;
  p.c = Vector::Zero(3);
  p.c << 1.0 / 3.0, 0.0, -2.5e-7;
  p.A = Matrix::Zero(4, 3);
  p.A(0, 0) = 1.0;
  p.A(1, 2) = -std::sqrt(2.0);
  p.A(3, 1) = 1e300;
  p.b = Vector::Zero(4);
  p.b(2) = 0.1;
  p.cones = {Cone::zero(1), Cone::psd(2)};
  std::stringstream ss;
  write_problem(ss, p);
  const ConicProblem q = read_problem(ss);
  EXPECT_EQ(q.c, p.c);
  EXPECT_EQ(q.A, p.A);
  EXPECT_EQ(q.b, p.b);
  ASSERT_EQ(q.cones.size(), 2u);
  EXPECT_EQ(q.cones[1].kind, ConeKind::Psd);
  EXPECT_EQ(q.cones[1].dim, 2);
}

TEST(Dump, MalformedInputNamesLine) {
  std::stringstream ss("CONIC 1\nVAR 1\nCON 1\nCONES 1\nX 1\n");
  try {
    read_problem(ss);
    FAIL();
  } catch (const rab::InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos);
  }
}

TEST(Builder, HermitianLmiSmallestLoading) {
  // min t s.t. [[t, 1+j], [1-j, t]] >= 0 has optimum |1+j| = sqrt(2)
  ConicBuilder b;
  const auto t = b.add_variables(1);
  b.set_objective(t, 1.0);
  HermitianLmi lmi(2);
  lmi.add_constant(0, 1, {1.0, 1.0});
  lmi.add_term(0, 0, t, 1.0);
  lmi.add_term(1, 1, t, 1.0);
  const auto row = lmi.emit(b);
  const auto p = b.build();
  EXPECT_EQ(p.cones.size(), 1u);
  EXPECT_EQ(p.cones[0].dim, 4);
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.x(t), std::sqrt(2.0), 1e-7);
  const Eigen::MatrixXcd S = lmi.read_matrix(sol.s.segment(row, 10));
  EXPECT_NEAR(S(0, 1).real(), 1.0, 1e-9);
  EXPECT_NEAR(S(0, 1).imag(), 1.0, 1e-9);
  EXPECT_NEAR(S(1, 0).imag(), -1.0, 1e-9);
}

TEST(Builder, LowerTriangleTermsAreConjugated) {
  HermitianLmi upper(2), lower(2);
  upper.add_constant(0, 1, {0.0, 2.0});
  lower.add_constant(1, 0, {0.0, -2.0});
  ConicBuilder b1, b2;
  upper.emit(b1);
  lower.emit(b2);
  EXPECT_TRUE(b1.build().b.isApprox(b2.build().b));
}

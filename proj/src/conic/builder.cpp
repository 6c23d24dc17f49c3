#include "rab/conic/builder.hpp"

#include <cmath>

#include "rab/errors.hpp"

namespace rab::conic {

Index ConicBuilder::add_variables(Index count) {
  const Index first = n_;
  n_ += count;
  objective_.resize(static_cast<std::size_t>(n_), 0.0);
  return first;
}

void ConicBuilder::set_objective(Index var, double coef) {
  objective_.at(static_cast<std::size_t>(var)) = coef;
}

Index ConicBuilder::add_block(const Cone& cone, const Vector& constant) {
  if (constant.size() != cone.size())
    throw InvalidInput("ConicBuilder: constant size does not match the cone");
  const Index first = num_rows();
  for (Index i = 0; i < constant.size(); ++i) constant_.push_back(constant(i));
  cones_.push_back(cone);
  return first;
}

void ConicBuilder::add_term(Index row, Index var, double coef) {
  if (coef == 0.0) return;
  entries_.push_back({row, var, coef});
}

ConicProblem ConicBuilder::build() const {
  ConicProblem p;
  p.c = Eigen::Map<const Vector>(objective_.data(), n_);
  p.b = Eigen::Map<const Vector>(constant_.data(), num_rows());
  p.A = Matrix::Zero(num_rows(), n_);
  for (const Entry& e : entries_) p.A(e.row, e.var) -= e.coef;
  p.cones = cones_;
  return p;
}

HermitianLmi::HermitianLmi(Index n) : n_(n), constant_(Eigen::MatrixXcd::Zero(n, n)) {}

void HermitianLmi::add_constant(Index i, Index j, std::complex<double> value) {
  if (i == j) {
    constant_(i, i) += value.real();
  } else {
    if (i > j) {
      std::swap(i, j);
      value = std::conj(value);
    }
    constant_(i, j) += value;
    constant_(j, i) += std::conj(value);
  }
}

void HermitianLmi::add_constant(const Eigen::MatrixXcd& C) {
  for (Index j = 0; j < C.cols(); ++j)
    for (Index i = 0; i <= j; ++i) add_constant(i, j, C(i, j));
}

void HermitianLmi::add_term(Index i, Index j, Index var, std::complex<double> coef) {
  if (coef == 0.0) return;
  if (i > j) {
    std::swap(i, j);
    coef = std::conj(coef);
  }
  terms_.push_back({i, j, var, coef});
}

namespace {

// Adds value * (e_p e_q^T + e_q e_p^T) / (p == q ? 2 : 1) to an svec-indexed sink.
template <class Sink>
void add_symmetric(Index p, Index q, double value, Sink&& sink) {
  if (value == 0.0) return;
  if (p == q) {
    sink(svec_index(p, p), value);
  } else {
    if (p > q) std::swap(p, q);
    sink(svec_index(p, q), std::sqrt(2.0) * value);
  }
}

// Real embedding of the Hermitian pattern with H_ij = v (i < j) or H_ii = Re v.
template <class Sink>
void embed_entry(Index n, Index i, Index j, std::complex<double> v, Sink&& sink) {
  if (i == j) {
    add_symmetric(i, i, v.real(), sink);
    add_symmetric(n + i, n + i, v.real(), sink);
    return;
  }
  add_symmetric(i, j, v.real(), sink);
  add_symmetric(n + i, n + j, v.real(), sink);
  // lower-left block carries Im H: E(n+i, j) = Im H_ij, E(n+j, i) = Im H_ji
  add_symmetric(n + i, j, v.imag(), sink);
  add_symmetric(n + j, i, -v.imag(), sink);
}

}  // namespace

Index HermitianLmi::emit(ConicBuilder& builder) const {
  const Index side = 2 * n_;
  Vector constant = Vector::Zero(svec_size(side));
  for (Index j = 0; j < n_; ++j)
    for (Index i = 0; i <= j; ++i)
      embed_entry(n_, i, j, constant_(i, j), [&](Index k, double v) { constant(k) += v; });
  const Index first = builder.add_block(Cone::psd(side), constant);
  for (const Term& t : terms_)
    embed_entry(n_, t.i, t.j, t.coef,
                [&](Index k, double v) { builder.add_term(first + k, t.var, v); });
  return first;
}

Eigen::MatrixXcd HermitianLmi::read_matrix(const Eigen::Ref<const Vector>& block) const {
  const Matrix E = smat(block, 2 * n_);
  const Matrix re = 0.5 * (E.topLeftCorner(n_, n_) + E.bottomRightCorner(n_, n_));
  const Matrix im = 0.5 * (E.bottomLeftCorner(n_, n_) - E.topRightCorner(n_, n_));
  Eigen::MatrixXcd H(n_, n_);
  H.real() = re;
  H.imag() = im;
  return 0.5 * (H + H.adjoint());
}

}  // namespace rab::conic

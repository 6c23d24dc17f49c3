#pragma once

// Incremental construction of ConicProblem instances.  Every cone block is
// described by its slack s = constant + sum_k coef_k * x_k, which becomes the
// rows b = constant, A = -coef of the standard form.

#include <complex>
#include <vector>

#include "rab/conic/problem.hpp"

namespace rab::conic {

class ConicBuilder {
public:
  /// Returns the index of the first new variable.
  Index add_variables(Index count);
  Index num_vars() const { return n_; }

  void set_objective(Index var, double coef);

  /// Appends a cone block; returns the row of its first slack entry.
  Index add_block(const Cone& cone, const Vector& constant);
  void add_term(Index row, Index var, double coef);

  Index num_rows() const { return static_cast<Index>(constant_.size()); }

  ConicProblem build() const;

private:
  struct Entry {
    Index row;
    Index var;
    double coef;
  };
  Index n_ = 0;
  std::vector<double> objective_;
  std::vector<double> constant_;
  std::vector<Entry> entries_;
  std::vector<Cone> cones_;
};

/// Affine Hermitian matrix H(x) = C + sum_k x_k C_k of side n whose real
/// embedding [[Re H, -Im H], [Im H, Re H]] is constrained to be PSD.
/// Entries are given for i <= j; the lower triangle follows by conjugation.
class HermitianLmi {
public:
  explicit HermitianLmi(Index n);

  Index size() const { return n_; }

  void add_constant(Index i, Index j, std::complex<double> value);
  void add_constant(const Eigen::MatrixXcd& C);  // Hermitian, upper triangle used
  void add_term(Index i, Index j, Index var, std::complex<double> coef);

  /// Emits a PSD block of side 2n; returns its first row.
  Index emit(ConicBuilder& builder) const;

  /// Hermitian matrix encoded by a slack or dual vector of an emitted block
  /// (the two embedded copies are averaged).
  Eigen::MatrixXcd read_matrix(const Eigen::Ref<const Vector>& block) const;

private:
  struct Term {
    Index i, j, var;
    std::complex<double> coef;
  };
  Index n_;
  Eigen::MatrixXcd constant_;
  std::vector<Term> terms_;
};

}  // namespace rab::conic

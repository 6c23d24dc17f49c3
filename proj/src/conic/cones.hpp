#pragma once

// Cone algebra and Nesterov-Todd scalings for the interior-point solver.
// Only the non-zero cones live here; zero-cone rows are handled as equalities.

#include <vector>

#include "rab/conic/problem.hpp"

namespace rab::conic::detail {

struct Block {
  ConeKind kind;  // Nonneg, SecondOrder or Psd
  Index dim;      // entries, or matrix side for Psd
  Index offset;   // first row inside the stacked cone vector
  Index size;     // rows occupied
};

class ConeSet {
public:
  explicit ConeSet(std::vector<Block> blocks);

  const std::vector<Block>& blocks() const { return blocks_; }
  Index size() const { return size_; }
  Index degree() const { return degree_; }

  Vector identity() const;
  Vector product(const Vector& u, const Vector& v) const;  // Jordan product u o v
  // Smallest "eigenvalue" per the cone's spectral decomposition, minimised over blocks.
  double min_eig(const Vector& u) const;
  void add_identity(Vector& u, double a) const;  // u += a e

private:
  std::vector<Block> blocks_;
  Index size_ = 0;
  Index degree_ = 0;
};

// Nesterov-Todd scaling W with W z = W^{-T} s = lambda.
//  nonneg : W = diag(d), d = sqrt(s / z)
//  soc    : W = beta * Wbar, Wbar the hyperbolic rotation built from wbar
//  psd    : W(u) = r^T u r
class Scaling {
public:
  static Scaling identity(const ConeSet& cones);
  // Returns false if (s, z) is not strictly interior.
  bool compute(const ConeSet& cones, const Vector& s, const Vector& z);

  const Vector& lambda() const { return lambda_; }

  // Each operator acts on the columns of a matrix with cones.size() rows.
  void apply_W(Matrix& U) const;
  void apply_Wt(Matrix& U) const;
  void apply_Winv(Matrix& U) const;
  void apply_Winvt(Matrix& U) const;

  Vector W(const Vector& u) const;
  Vector Wt(const Vector& u) const;
  Vector Winv(const Vector& u) const;
  Vector Winvt(const Vector& u) const;

  // W^{-T} on the rows of one block.
  void apply_Winvt_block(std::size_t block, Eigen::Ref<Matrix> Ub) const;
  // P = r^{-T} r^{-1} of a psd block, so <W^{-T}u, W^{-T}v> = tr(smat(u) P smat(v) P).
  Matrix psd_inverse_gram(std::size_t block) const;

  // x with lambda o x = u.
  Vector lambda_divide(const Vector& u) const;
  // Largest alpha with lambda + alpha * d inside the cone (may be +inf).
  double max_step(const Vector& d) const;

private:
  struct SocData {
    double beta = 1.0;
    Vector wbar;
  };
  struct PsdData {
    Matrix r;
    Matrix rinv;
    Vector eigs;  // diagonal of lambda
  };

  const ConeSet* cones_ = nullptr;
  Vector lambda_;
  std::vector<Vector> nonneg_;  // d per nonneg block
  std::vector<SocData> soc_;
  std::vector<PsdData> psd_;

  enum class Op { W, Wt, Winv, Winvt };
  void apply(Matrix& U, Op op) const;
  void apply_block(std::size_t block, Eigen::Ref<Matrix> Ub, Op op) const;
  std::size_t kind_index(std::size_t block) const;
};

// Largest alpha with x + alpha * d in the cone for a general interior x (used in tests).
double max_step_general(const ConeSet& cones, const Vector& x, const Vector& d);

}  // namespace rab::conic::detail

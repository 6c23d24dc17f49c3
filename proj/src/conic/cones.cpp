#include "cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace rab::conic::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double soc_jdot(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
  return u(0) * v(0) - u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

// Wbar u for the columns of U (k x n).
void wbar_apply(const Vector& wbar, Eigen::Ref<Matrix> U) {
  const Index k = wbar.size();
  const double w0 = wbar(0);
  const auto w1 = wbar.tail(k - 1);
  Eigen::RowVectorXd t = w1.transpose() * U.bottomRows(k - 1);  // w1^T u1
  Eigen::RowVectorXd u0 = U.row(0);
  U.row(0) = w0 * u0 + t;
  const Eigen::RowVectorXd coef = u0 + t / (1.0 + w0);
  U.bottomRows(k - 1).noalias() += w1 * coef;
}

void flip(Eigen::Ref<Matrix> U) { U.bottomRows(U.rows() - 1) *= -1.0; }

// Columns of U become svec(L smat(u) L^T).  Zero columns are skipped; the rest are
// stacked side by side so the congruence runs as two wide products.
void psd_congruence_columns(const Matrix& L, Eigen::Ref<Matrix> U, Index side) {
  std::vector<Index> live;
  for (Index c = 0; c < U.cols(); ++c)
    if (!U.col(c).isZero(0.0)) live.push_back(c);
  if (live.empty()) return;
  const auto k = static_cast<Index>(live.size());
  Matrix S(side, side * k);
  for (Index j = 0; j < k; ++j) S.middleCols(j * side, side) = smat(U.col(live[j]), side);
  const Matrix T = L * S;  // blocks L S_j
  for (Index j = 0; j < k; ++j) S.middleCols(j * side, side) = T.middleCols(j * side, side).transpose();
  const Matrix C = L * S;  // blocks L S_j L^T
  for (Index j = 0; j < k; ++j) U.col(live[j]) = svec(C.middleCols(j * side, side));
}

double soc_max_step(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& d) {
  const Index k = x.size();
  if (k == 1) return d(0) < 0.0 ? -x(0) / d(0) : kInf;
  const double nx = std::sqrt(std::max(soc_jdot(x, x), 0.0));
  if (!(nx > 0.0)) return 0.0;
  const Vector xb = x / nx;
  const Vector db = d / nx;
  const double rho0 = soc_jdot(xb, db);
  const Vector rho1 =
      db.tail(k - 1) - ((rho0 + db(0)) / (xb(0) + 1.0)) * xb.tail(k - 1);
  const double t = rho1.norm() - rho0;
  return t > 0.0 ? 1.0 / t : kInf;
}

double psd_max_step(const Matrix& X, const Matrix& D) {
  Eigen::LLT<Matrix> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix Li = llt.matrixL().solve(Matrix::Identity(X.rows(), X.cols()));
  const Matrix M = Li * D * Li.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  const double m = es.eigenvalues()(0);
  return m < 0.0 ? -1.0 / m : kInf;
}

}  // namespace

ConeSet::ConeSet(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  for (const Block& b : blocks_) {
    size_ += b.size;
    degree_ += b.kind == ConeKind::SecondOrder ? 1 : b.dim;
  }
}

Vector ConeSet::identity() const {
  Vector e = Vector::Zero(size_);
  add_identity(e, 1.0);
  return e;
}

void ConeSet::add_identity(Vector& u, double a) const {
  for (const Block& b : blocks_) {
    switch (b.kind) {
      case ConeKind::Nonneg: u.segment(b.offset, b.size).array() += a; break;
      case ConeKind::SecondOrder: u(b.offset) += a; break;
      case ConeKind::Psd:
        for (Index i = 0; i < b.dim; ++i) u(b.offset + svec_index(i, i)) += a;
        break;
      case ConeKind::Zero: break;
    }
  }
}

Vector ConeSet::product(const Vector& u, const Vector& v) const {
  Vector out(size_);
  for (const Block& b : blocks_) {
    const auto ub = u.segment(b.offset, b.size);
    const auto vb = v.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::Nonneg: out.segment(b.offset, b.size) = ub.cwiseProduct(vb); break;
      case ConeKind::SecondOrder:
        out(b.offset) = ub.dot(vb);
        out.segment(b.offset + 1, b.size - 1) =
            ub(0) * vb.tail(b.size - 1) + vb(0) * ub.tail(b.size - 1);
        break;
      case ConeKind::Psd: {
        const Matrix U = smat(ub, b.dim);
        const Matrix V = smat(vb, b.dim);
        const Matrix P = U * V;
        out.segment(b.offset, b.size) = svec(0.5 * (P + P.transpose()));
        break;
      }
      case ConeKind::Zero: break;
    }
  }
  return out;
}

double ConeSet::min_eig(const Vector& u) const {
  double m = kInf;
  for (const Block& b : blocks_) {
    const auto ub = u.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::Nonneg: m = std::min(m, ub.minCoeff()); break;
      case ConeKind::SecondOrder: m = std::min(m, ub(0) - ub.tail(b.size - 1).norm()); break;
      case ConeKind::Psd: {
        Eigen::SelfAdjointEigenSolver<Matrix> es(smat(ub, b.dim), Eigen::EigenvaluesOnly);
        m = std::min(m, es.eigenvalues()(0));
        break;
      }
      case ConeKind::Zero: break;
    }
  }
  return m;
}

Scaling Scaling::identity(const ConeSet& cones) {
  Scaling sc;
  sc.cones_ = &cones;
  sc.lambda_ = cones.identity();
  for (const Block& b : cones.blocks()) {
    switch (b.kind) {
      case ConeKind::Nonneg: sc.nonneg_.push_back(Vector::Ones(b.size)); break;
      case ConeKind::SecondOrder: {
        SocData d;
        d.wbar = Vector::Zero(b.size);
        d.wbar(0) = 1.0;
        sc.soc_.push_back(d);
        break;
      }
      case ConeKind::Psd: {
        PsdData d;
        d.r = Matrix::Identity(b.dim, b.dim);
        d.rinv = d.r;
        d.eigs = Vector::Ones(b.dim);
        sc.psd_.push_back(d);
        break;
      }
      case ConeKind::Zero: break;
    }
  }
  return sc;
}

bool Scaling::compute(const ConeSet& cones, const Vector& s, const Vector& z) {
  cones_ = &cones;
  nonneg_.clear();
  soc_.clear();
  psd_.clear();
  lambda_.resize(cones.size());
  for (const Block& b : cones.blocks()) {
    const auto sb = s.segment(b.offset, b.size);
    const auto zb = z.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::Nonneg: {
        if ((sb.array() <= 0.0).any() || (zb.array() <= 0.0).any()) return false;
        nonneg_.push_back((sb.array() / zb.array()).sqrt().matrix());
        lambda_.segment(b.offset, b.size) = (sb.array() * zb.array()).sqrt().matrix();
        break;
      }
      case ConeKind::SecondOrder: {
        const double ss = soc_jdot(sb, sb);
        const double zz = soc_jdot(zb, zb);
        if (!(ss > 0.0) || !(zz > 0.0) || sb(0) <= 0.0 || zb(0) <= 0.0) return false;
        const double as = std::sqrt(ss);
        const double az = std::sqrt(zz);
        const Vector sbar = sb / as;
        Vector zbar = zb / az;
        const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
        zbar.tail(b.size - 1) *= -1.0;  // J zbar
        SocData d;
        d.beta = std::sqrt(as / az);
        d.wbar = (sbar + zbar) / (2.0 * gamma);
        // lambda = W z
        Matrix v = zb;
        wbar_apply(d.wbar, v);
        lambda_.segment(b.offset, b.size) = d.beta * v;
        soc_.push_back(std::move(d));
        break;
      }
      case ConeKind::Psd: {
        const Matrix S = smat(sb, b.dim);
        const Matrix Z = smat(zb, b.dim);
        Eigen::LLT<Matrix> ls(S), lz(Z);
        if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
        const Matrix Ls = ls.matrixL();
        const Matrix Lz = lz.matrixL();
        Eigen::JacobiSVD<Matrix> sv(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vector sig = sv.singularValues();
        if (!(sig.minCoeff() > 0.0)) return false;
        PsdData d;
        const Vector isq = sig.cwiseSqrt().cwiseInverse();
        d.r = Ls * sv.matrixV() * isq.asDiagonal();
        d.rinv = isq.asDiagonal() * sv.matrixU().transpose() * Lz.transpose();
        d.eigs = sig;
        Vector lam = Vector::Zero(b.size);
        for (Index i = 0; i < b.dim; ++i) lam(svec_index(i, i)) = sig(i);
        lambda_.segment(b.offset, b.size) = lam;
        psd_.push_back(std::move(d));
        break;
      }
      case ConeKind::Zero: break;
    }
  }
  return true;
}

void Scaling::apply(Matrix& U, Op op) const {
  const auto& blocks = cones_->blocks();
  for (std::size_t k = 0; k < blocks.size(); ++k)
    apply_block(k, U.middleRows(blocks[k].offset, blocks[k].size), op);
}

std::size_t Scaling::kind_index(std::size_t block) const {
  const auto& blocks = cones_->blocks();
  std::size_t idx = 0;
  for (std::size_t k = 0; k < block; ++k) idx += blocks[k].kind == blocks[block].kind ? 1 : 0;
  return idx;
}

void Scaling::apply_block(std::size_t block, Eigen::Ref<Matrix> Ub, Op op) const {
  const Block& b = cones_->blocks()[block];
  const std::size_t idx = kind_index(block);
  switch (b.kind) {
    case ConeKind::Nonneg: {
      const Vector& d = nonneg_[idx];
      if (op == Op::W || op == Op::Wt)
        Ub = d.asDiagonal() * Ub;
      else
        Ub = d.cwiseInverse().asDiagonal() * Ub;
      break;
    }
    case ConeKind::SecondOrder: {
      const SocData& d = soc_[idx];
      if (op == Op::W || op == Op::Wt) {
        wbar_apply(d.wbar, Ub);
        Ub *= d.beta;
      } else {
        flip(Ub);
        wbar_apply(d.wbar, Ub);
        flip(Ub);
        Ub /= d.beta;
      }
      break;
    }
    case ConeKind::Psd: {
      const PsdData& d = psd_[idx];
      // W(u) = r^T u r, W^T(u) = r u r^T, W^{-1}(u) = r^{-T} u r^{-1}, W^{-T}(u) = r^{-1} u r^{-T}
      Matrix L;
      switch (op) {
        case Op::W: L = d.r.transpose(); break;
        case Op::Wt: L = d.r; break;
        case Op::Winv: L = d.rinv.transpose(); break;
        case Op::Winvt: L = d.rinv; break;
      }
      psd_congruence_columns(L, Ub, b.dim);
      break;
    }
    case ConeKind::Zero: break;
  }
}

void Scaling::apply_Winvt_block(std::size_t block, Eigen::Ref<Matrix> Ub) const {
  apply_block(block, Ub, Op::Winvt);
}

Matrix Scaling::psd_inverse_gram(std::size_t block) const {
  const PsdData& d = psd_[kind_index(block)];
  return d.rinv.transpose() * d.rinv;
}

void Scaling::apply_W(Matrix& U) const { apply(U, Op::W); }
void Scaling::apply_Wt(Matrix& U) const { apply(U, Op::Wt); }
void Scaling::apply_Winv(Matrix& U) const { apply(U, Op::Winv); }
void Scaling::apply_Winvt(Matrix& U) const { apply(U, Op::Winvt); }

Vector Scaling::W(const Vector& u) const {
  Matrix m = u;
  apply(m, Op::W);
  return m.col(0);
}
Vector Scaling::Wt(const Vector& u) const {
  Matrix m = u;
  apply(m, Op::Wt);
  return m.col(0);
}
Vector Scaling::Winv(const Vector& u) const {
  Matrix m = u;
  apply(m, Op::Winv);
  return m.col(0);
}
Vector Scaling::Winvt(const Vector& u) const {
  Matrix m = u;
  apply(m, Op::Winvt);
  return m.col(0);
}

Vector Scaling::lambda_divide(const Vector& u) const {
  Vector x(u.size());
  std::size_t is = 0;
  for (const Block& b : cones_->blocks()) {
    const auto lb = lambda_.segment(b.offset, b.size);
    const auto ub = u.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::Nonneg: x.segment(b.offset, b.size) = ub.cwiseQuotient(lb); break;
      case ConeKind::SecondOrder: {
        const Index k = b.size;
        const double l0 = lb(0);
        const auto l1 = lb.tail(k - 1);
        const double x0 = (l0 * ub(0) - l1.dot(ub.tail(k - 1))) / soc_jdot(lb, lb);
        x(b.offset) = x0;
        x.segment(b.offset + 1, k - 1) = (ub.tail(k - 1) - x0 * l1) / l0;
        break;
      }
      case ConeKind::Psd: {
        const Vector& e = psd_[is++].eigs;
        for (Index j = 0; j < b.dim; ++j)
          for (Index i = 0; i <= j; ++i) {
            const Index k = b.offset + svec_index(i, j);
            x(k) = 2.0 * u(k) / (e(i) + e(j));
          }
        break;
      }
      case ConeKind::Zero: break;
    }
  }
  return x;
}

double Scaling::max_step(const Vector& d) const {
  double alpha = kInf;
  std::size_t is = 0;
  for (const Block& b : cones_->blocks()) {
    const auto lb = lambda_.segment(b.offset, b.size);
    const auto db = d.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::Nonneg:
        for (Index i = 0; i < b.size; ++i)
          if (db(i) < 0.0) alpha = std::min(alpha, -lb(i) / db(i));
        break;
      case ConeKind::SecondOrder: alpha = std::min(alpha, soc_max_step(lb, db)); break;
      case ConeKind::Psd: {
        const Vector isq = psd_[is++].eigs.cwiseSqrt().cwiseInverse();
        const Matrix M = isq.asDiagonal() * smat(db, b.dim) * isq.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
        const double m = es.eigenvalues()(0);
        if (m < 0.0) alpha = std::min(alpha, -1.0 / m);
        break;
      }
      case ConeKind::Zero: break;
    }
  }
  return alpha;
}

double max_step_general(const ConeSet& cones, const Vector& x, const Vector& d) {
  double alpha = kInf;
  for (const Block& b : cones.blocks()) {
    const auto xb = x.segment(b.offset, b.size);
    const auto db = d.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::Nonneg:
        for (Index i = 0; i < b.size; ++i)
          if (db(i) < 0.0) alpha = std::min(alpha, -xb(i) / db(i));
        break;
      case ConeKind::SecondOrder: alpha = std::min(alpha, soc_max_step(xb, db)); break;
      case ConeKind::Psd:
        alpha = std::min(alpha, psd_max_step(smat(xb, b.dim), smat(db, b.dim)));
        break;
      case ConeKind::Zero: break;
    }
  }
  return alpha;
}

}  // namespace rab::conic::detail

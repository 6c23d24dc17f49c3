#include "rab/conic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include <Eigen/SparseCore>

#include "cones.hpp"
#include "rab/errors.hpp"

namespace rab::conic {

namespace {

using detail::Block;
using detail::ConeSet;
using detail::Scaling;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Internal split: equality rows  A_eq x = b_eq  and cone rows  G x + s = h.
struct Split {
  Matrix Aeq;
  Vector beq;
  Matrix G;
  Vector h;
  SparseMatrix Aeq_sparse, G_sparse;
  std::vector<Index> eq_rows;    // original row of each equality
  std::vector<Index> cone_rows;  // original row of each cone row
  std::vector<Block> blocks;
};

Split split_problem(const ConicProblem& p) {
  Split sp;
  Index row = 0;
  Index off = 0;
  for (const Cone& c : p.cones) {
    const Index k = c.size();
    if (c.kind == ConeKind::Zero) {
      for (Index i = 0; i < k; ++i) sp.eq_rows.push_back(row + i);
    } else {
      sp.blocks.push_back({c.kind, c.dim, off, k});
      for (Index i = 0; i < k; ++i) sp.cone_rows.push_back(row + i);
      off += k;
    }
    row += k;
  }
  const Index n = p.num_vars();
  sp.Aeq.resize(static_cast<Index>(sp.eq_rows.size()), n);
  sp.beq.resize(sp.Aeq.rows());
  for (Index i = 0; i < sp.Aeq.rows(); ++i) {
    sp.Aeq.row(i) = p.A.row(sp.eq_rows[i]);
    sp.beq(i) = p.b(sp.eq_rows[i]);
  }
  sp.G.resize(static_cast<Index>(sp.cone_rows.size()), n);
  sp.h.resize(sp.G.rows());
  for (Index i = 0; i < sp.G.rows(); ++i) {
    sp.G.row(i) = p.A.row(sp.cone_rows[i]);
    sp.h(i) = p.b(sp.cone_rows[i]);
  }
  sp.Aeq_sparse = sp.Aeq.sparseView();
  sp.G_sparse = sp.G.sparseView();
  return sp;
}

// Cholesky with growing diagonal regularisation.
bool robust_llt(const Matrix& M, Eigen::LLT<Matrix>& llt) {
  const double scale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
  double delta = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    if (delta == 0.0) {
      llt.compute(M);
    } else {
      Matrix Mr = M;
      Mr.diagonal().array() += delta;
      llt.compute(Mr);
    }
    if (llt.info() == Eigen::Success) return true;
    delta = delta == 0.0 ? 1e-14 * scale : delta * 10.0;
  }
  return false;
}

// Solves  [0 A^T G^T; A 0 0; G 0 -W^T W] [ux; uy; uz] = [bx; by; bz].
// The normal matrix G^T W^{-1} W^{-T} G is accumulated block by block over the columns
// each block touches; psd blocks use the sparse entries of those columns directly.
class KktSolver {
public:
  KktSolver(const Matrix& A, const SparseMatrix& As, const SparseMatrix& Gs,
            const std::vector<Block>& blocks, int refinement)
      : A_(A), As_(As), Gs_(Gs), refinement_(refinement) {
    std::vector<std::size_t> owner(static_cast<std::size_t>(Gs.rows()));
    for (std::size_t k = 0; k < blocks.size(); ++k)
      for (Index r = 0; r < blocks[k].size; ++r)
        owner[static_cast<std::size_t>(blocks[k].offset + r)] = k;
    parts_.resize(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) parts_[k].block = blocks[k];
    for (Index c = 0; c < Gs.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator e(Gs, c); e; ++e) {
        if (e.value() == 0.0) continue;
        Part& part = parts_[owner[static_cast<std::size_t>(e.row())]];
        if (part.cols.empty() || part.cols.back() != c) {
          part.cols.push_back(c);
          part.entries.emplace_back();
        }
        part.entries.back().push_back({e.row() - part.block.offset, e.value()});
      }
    }
    for (Part& part : parts_) {
      if (part.block.kind == ConeKind::Psd) {
        for (auto& col : part.entries) part.sym.push_back(symmetric_entries(col, part.block.dim));
      } else {
        part.dense = Matrix::Zero(part.block.size, static_cast<Index>(part.cols.size()));
        for (std::size_t j = 0; j < part.cols.size(); ++j)
          for (const auto& [row, v] : part.entries[j]) part.dense(row, static_cast<Index>(j)) = v;
      }
    }
  }

  bool factor(const Scaling& W) {
    W_ = &W;
    const Index n = Gs_.cols();
    Matrix K1 = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      const Part& part = parts_[k];
      if (part.cols.empty()) continue;
      const auto nc = part.cols.size();
      if (part.block.kind == ConeKind::Psd) {
        const Matrix P = W.psd_inverse_gram(k);
        for (std::size_t a = 0; a < nc; ++a) {
          for (std::size_t b = 0; b <= a; ++b) {
            // tr(Ga P Gb P) over the nonzeros of both columns
            double t = 0.0;
            for (const Sym& ea : part.sym[a])
              for (const Sym& eb : part.sym[b]) t += ea.v * eb.v * P(ea.j, eb.i) * P(eb.j, ea.i);
            K1(part.cols[a], part.cols[b]) += t;
          }
        }
      } else {
        Matrix Gt = part.dense;
        W.apply_Winvt_block(k, Gt);
        const Matrix B = Gt.transpose() * Gt;
        for (std::size_t a = 0; a < nc; ++a)
          for (std::size_t b = 0; b <= a; ++b)
            K1(part.cols[a], part.cols[b]) += B(static_cast<Index>(a), static_cast<Index>(b));
      }
    }
    if (A_.rows() > 0) K1.selfadjointView<Eigen::Lower>().rankUpdate(A_.transpose());
    K1 = K1.selfadjointView<Eigen::Lower>();
    if (!robust_llt(K1, k1_)) return false;
    if (A_.rows() > 0) {
      Y_ = k1_.solve(A_.transpose());
      const Matrix S = A_ * Y_;
      if (!robust_llt(0.5 * (S + S.transpose()), s_)) return false;
    }
    return true;
  }

  void solve(const Vector& bx, const Vector& by, const Vector& bz, Vector& ux, Vector& uy,
             Vector& uz) const {
    solve_once(bx, by, bz, ux, uy, uz);
    for (int it = 0; it < refinement_; ++it) {
      const Vector rx = bx - As_.transpose() * uy - Gs_.transpose() * uz;
      const Vector ry = by - As_ * ux;
      const Vector rz = bz - (Gs_ * ux - W_->Wt(W_->W(uz)));
      Vector cx, cy, cz;
      solve_once(rx, ry, rz, cx, cy, cz);
      ux += cx;
      uy += cy;
      uz += cz;
    }
  }

private:
  void solve_once(const Vector& bx, const Vector& by, const Vector& bz, Vector& ux, Vector& uy,
                  Vector& uz) const {
    const Vector wbz = W_->Winvt(bz);
    Vector rhs = bx + Gs_.transpose() * W_->Winv(wbz);
    if (A_.rows() > 0) {
      const Vector v = k1_.solve(rhs + As_.transpose() * by);
      uy = s_.solve(As_ * v - by);
      ux = v - Y_ * uy;
    } else {
      ux = k1_.solve(rhs);
      uy.resize(0);
    }
    uz = W_->Winv(W_->Winvt(Gs_ * ux) - wbz);
  }

  struct Entry {
    Index row;  // within the block
    double v;
  };
  struct Sym {  // one entry of smat(column), both triangles listed
    Index i, j;
    double v;
  };
  struct Part {
    Block block;
    std::vector<Index> cols;                  // columns with nonzeros in the block
    std::vector<std::vector<Entry>> entries;  // per column
    std::vector<std::vector<Sym>> sym;        // psd only
    Matrix dense;                             // other cones: block rows x cols
  };

  static std::vector<Sym> symmetric_entries(const std::vector<Entry>& col, Index side) {
    std::vector<Sym> out;
    for (const Entry& e : col) {
      // invert svec_index(i, j) = j (j + 1) / 2 + i, i <= j
      Index j = 0;
      while ((j + 1) * (j + 2) / 2 <= e.row) ++j;
      const Index i = e.row - j * (j + 1) / 2;
      if (i >= side || j >= side) continue;
      if (i == j) {
        out.push_back({i, i, e.v});
      } else {
        const double v = e.v / std::sqrt(2.0);
        out.push_back({i, j, v});
        out.push_back({j, i, v});
      }
    }
    return out;
  }

  const Matrix& A_;
  const SparseMatrix& As_;
  const SparseMatrix& Gs_;
  int refinement_;
  const Scaling* W_ = nullptr;
  std::vector<Part> parts_;
  Matrix Y_;
  Eigen::LLT<Matrix> k1_;
  Eigen::LLT<Matrix> s_;
};

struct Iterate {
  Vector x, y, z, s;
  double tau = 1.0;
  double kappa = 1.0;
};

ConicSolution assemble(const ConicProblem& p, const Split& sp, const Vector& x, const Vector& y,
                       const Vector& z, const Vector& s) {
  ConicSolution sol;
  sol.x = x;
  sol.y = Vector::Zero(p.num_rows());
  sol.s = Vector::Zero(p.num_rows());
  for (std::size_t i = 0; i < sp.eq_rows.size(); ++i) sol.y(sp.eq_rows[i]) = y(i);
  for (std::size_t i = 0; i < sp.cone_rows.size(); ++i) {
    sol.y(sp.cone_rows[i]) = z(i);
    sol.s(sp.cone_rows[i]) = s(i);
  }
  sol.primal_objective = p.c.dot(sol.x);
  sol.dual_objective = -p.b.dot(sol.y);
  sol.residuals = residuals(p, sol);
  return sol;
}

ConicSolution solve_trivial(const ConicProblem& p, const Split& sp, const ConeSet& cones) {
  // No variables: the only candidate is s = b.
  ConicSolution sol = assemble(p, sp, Vector(0), Vector::Zero(sp.beq.size()),
                               Vector::Zero(sp.h.size()), sp.h);
  const bool eq_ok = sp.beq.size() == 0 || sp.beq.cwiseAbs().maxCoeff() == 0.0;
  const bool cone_ok = sp.h.size() == 0 || cones.min_eig(sp.h) >= 0.0;
  sol.status = eq_ok && cone_ok ? SolveStatus::Optimal : SolveStatus::Infeasible;
  return sol;
}

}  // namespace

ConicSolution solve(const ConicProblem& p, const SolverSettings& settings) {
  const auto issues = validate(p);
  if (!issues.empty())
    throw InvalidInput("conic problem: " + issues.front().field + ": " + issues.front().message);

  const Split sp = split_problem(p);
  const ConeSet cones(sp.blocks);
  if (p.num_vars() == 0) return solve_trivial(p, sp, cones);

  const Index n = p.num_vars();
  const Index neq = sp.Aeq.rows();
  const Index m = sp.G.rows();
  const Vector& c = p.c;
  const Vector& b = sp.beq;
  const Vector& h = sp.h;
  const double degree = static_cast<double>(cones.degree());
  const double bnorm = 1.0 + p.b.norm();
  const double cnorm = 1.0 + p.c.norm();
  const double tol = settings.tol;

  KktSolver kkt(sp.Aeq, sp.Aeq_sparse, sp.G_sparse, sp.blocks, settings.refinement_steps);

  // Starting point from two least-squares problems (identity scaling).
  Iterate it;
  {
    const Scaling id = Scaling::identity(cones);
    if (!kkt.factor(id)) {
      ConicSolution sol = assemble(p, sp, Vector::Zero(n), Vector::Zero(neq), Vector::Zero(m),
                                   Vector::Zero(m));
      sol.status = SolveStatus::NumericalFailure;
      return sol;
    }
    Vector ux, uy, uz;
    kkt.solve(Vector::Zero(n), b, h, ux, uy, uz);
    it.x = ux;
    it.s = -uz;
    kkt.solve(-c, Vector::Zero(neq), Vector::Zero(m), ux, uy, uz);
    it.y = uy;
    it.z = uz;
    if (m > 0) {
      const double ts = -cones.min_eig(it.s);
      if (ts >= -1e-8 * std::max(1.0, it.s.norm())) cones.add_identity(it.s, 1.0 + ts);
      const double tz = -cones.min_eig(it.z);
      if (tz >= -1e-8 * std::max(1.0, it.z.norm())) cones.add_identity(it.z, 1.0 + tz);
    }
  }

  struct Best {
    Iterate it;
    double score = std::numeric_limits<double>::infinity();
    int iter = 0;
    bool set = false;
  } best;

  Scaling W;
  ConicSolution out;
  SolveStatus status = SolveStatus::MaxIter;
  int iter = 0;

  for (iter = 0; iter <= settings.max_iter; ++iter) {
    const Vector Atx = sp.Aeq_sparse.transpose() * it.y + sp.G_sparse.transpose() * it.z;
    const Vector hrx = -Atx;  // -(A^T y + G^T z)
    const Vector r1 = Atx + c * it.tau;
    const Vector hry = sp.Aeq_sparse * it.x;
    const Vector r2 = -hry + b * it.tau;
    const Vector hrz = it.s + sp.G_sparse * it.x;
    const Vector r3 = hrz - h * it.tau;
    const double cx = c.dot(it.x);
    const double by = b.dot(it.y);
    const double hz = h.dot(it.z);
    const double r4 = it.kappa + cx + by + hz;
    const double gap = m > 0 ? it.s.dot(it.z) : 0.0;
    const double mu = (gap + it.kappa * it.tau) / (degree + 1.0);

    const double pcost = cx / it.tau;
    const double dcost = -(by + hz) / it.tau;
    const double pres = std::sqrt(r2.squaredNorm() + r3.squaredNorm()) / it.tau / bnorm;
    const double dres = r1.norm() / it.tau / cnorm;
    const double relgap = std::abs(pcost - dcost) / (1.0 + std::abs(pcost));
    const double compl_gap = gap / (it.tau * it.tau) / (1.0 + std::abs(pcost));

    if (settings.verbose)
      std::fprintf(stderr, "%3d pcost %+.9e dcost %+.9e pres %.2e dres %.2e gap %.2e k/t %.2e\n",
                   iter, pcost, dcost, pres, dres, relgap, it.kappa / it.tau);

    const double score = std::max({pres, dres, relgap, compl_gap});
    if (score < best.score) {
      best.it = it;
      best.score = score;
      best.iter = iter;
      best.set = true;
    }

    if (pres <= tol && dres <= tol && relgap <= tol && compl_gap <= tol) {
      status = SolveStatus::Optimal;
      break;
    }
    if (by + hz < 0.0) {
      const double pinf = hrx.norm() / std::max(1.0, c.norm()) / (-(by + hz));
      if (pinf <= tol) {
        const double scale = -(by + hz);
        out = assemble(p, sp, Vector::Zero(n), it.y / scale, it.z / scale, Vector::Zero(m));
        out.status = SolveStatus::Infeasible;
        out.iterations = iter;
        return out;
      }
    }
    if (cx < 0.0) {
      const double dinf =
          std::sqrt(hry.squaredNorm() + hrz.squaredNorm()) / std::max(1.0, p.b.norm()) / (-cx);
      if (dinf <= tol) {
        out = assemble(p, sp, it.x / -cx, Vector::Zero(neq), Vector::Zero(m), it.s / -cx);
        out.status = SolveStatus::Unbounded;
        out.iterations = iter;
        return out;
      }
    }
    if (iter == settings.max_iter) break;

    if (!W.compute(cones, it.s, it.z) || !kkt.factor(W)) {
      status = SolveStatus::NumericalFailure;
      break;
    }
    const Vector& lam = W.lambda();
    const Vector lamsq = cones.product(lam, lam);

    Vector x1, y1, z1;
    kkt.solve(-c, b, h, x1, y1, z1);
    const double wz1 = m > 0 ? W.W(z1).squaredNorm() : 0.0;
    const double denom = -it.kappa / it.tau - wz1;

    Vector dx, dy, dz, ds_tilde, dz_tilde;
    double dtau = 0.0, dkappa = 0.0;
    Vector dsa, dza;
    double dtaua = 0.0, dkappaa = 0.0;
    double sigma = 0.0;
    double alpha = 0.0;
    bool failed = false;

    for (int pass = 0; pass < 2; ++pass) {
      Vector d_s = -lamsq;
      double d_kappa = -it.kappa * it.tau;
      if (pass == 1) {
        cones.add_identity(d_s, sigma * mu);
        d_s -= cones.product(dsa, dza);
        d_kappa += sigma * mu - dtaua * dkappaa;
      }
      const Vector ld = m > 0 ? W.lambda_divide(d_s) : Vector(Vector::Zero(0));
      const double f = 1.0 - sigma;
      Vector bz = -f * r3;
      if (m > 0) bz -= W.Wt(ld);
      Vector x2, y2, z2;
      kkt.solve(-f * r1, f * r2, bz, x2, y2, z2);
      const double num = -f * r4 - d_kappa / it.tau - (c.dot(x2) + b.dot(y2) + h.dot(z2));
      dtau = num / denom;
      dx = x2 + dtau * x1;
      dy = y2 + dtau * y1;
      dz = z2 + dtau * z1;
      dkappa = (d_kappa - it.kappa * dtau) / it.tau;
      if (m > 0) {
        dz_tilde = W.W(dz);
        ds_tilde = ld - dz_tilde;
      }
      if (!dx.allFinite() || !std::isfinite(dtau)) {
        failed = true;
        break;
      }

      double amax = std::numeric_limits<double>::infinity();
      if (m > 0) amax = std::min({amax, W.max_step(ds_tilde), W.max_step(dz_tilde)});
      if (dtau < 0.0) amax = std::min(amax, -it.tau / dtau);
      if (dkappa < 0.0) amax = std::min(amax, -it.kappa / dkappa);

      if (pass == 0) {
        const double aa = std::min(1.0, amax);
        sigma = std::pow(1.0 - aa, 3);
        dsa = ds_tilde;
        dza = dz_tilde;
        dtaua = dtau;
        dkappaa = dkappa;
      } else {
        alpha = std::min(1.0, 0.99 * amax);
      }
    }
    if (failed || !(alpha > 0.0)) {
      status = SolveStatus::NumericalFailure;
      break;
    }

    it.x += alpha * dx;
    it.y += alpha * dy;
    it.z += alpha * dz;
    if (m > 0) it.s += alpha * W.Wt(ds_tilde);
    it.tau += alpha * dtau;
    it.kappa += alpha * dkappa;
  }

  const Iterate& fin = status == SolveStatus::Optimal || !best.set ? it : best.it;
  out = assemble(p, sp, fin.x / fin.tau, fin.y / fin.tau, fin.z / fin.tau, fin.s / fin.tau);
  out.status = status;
  out.iterations = std::min(iter, settings.max_iter);
  return out;
}

}  // namespace rab::conic

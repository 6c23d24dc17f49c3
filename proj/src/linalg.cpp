#include "rab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rab/errors.hpp"

namespace rab {

namespace {

bool all_finite(const ComplexMatrix& A) {
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      if (!std::isfinite(A(i, j).real()) || !std::isfinite(A(i, j).imag())) return false;
  return true;
}

// Replace the eigenvectors of a degenerate cluster [first, first + count) by the
// Gram-Schmidt basis of the projected unit vectors.
void canonicalise_cluster(ComplexMatrix& V, Eigen::Index first, Eigen::Index count) {
  const Eigen::Index n = V.rows();
  const ComplexMatrix Vc = V.middleCols(first, count);
  std::vector<ComplexVector> picked;
  while (static_cast<Eigen::Index>(picked.size()) < count) {
    // residuals of P e_i after removing the already chosen directions
    std::vector<ComplexVector> residuals(n);
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      ComplexVector r = Vc * Vc.row(i).adjoint();
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& p : picked) r -= p * p.dot(r);
      residuals[i] = r;
      best = std::max(best, r.squaredNorm());
    }
    if (best <= 1e-24) break;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (residuals[i].squaredNorm() >= 0.5 * best) {
        picked.push_back(residuals[i] / residuals[i].norm());
        break;
      }
    }
  }
  if (static_cast<Eigen::Index>(picked.size()) != count) return;
  for (Eigen::Index k = 0; k < count; ++k) V.col(first + k) = picked[k];
}

}  // namespace

bool is_hermitian(const ComplexMatrix& H, double rel_tol) {
  if (H.rows() != H.cols() || H.rows() == 0) return false;
  const double scale = std::max(1.0, H.norm());
  return (H - H.adjoint()).norm() <= rel_tol * scale;
}

void require_hermitian(const ComplexMatrix& H, const char* what) {
  if (H.rows() == 0 || H.rows() != H.cols())
    throw InvalidInput(std::string(what) + ": expected a nonempty square matrix");
  if (!all_finite(H)) throw InvalidInput(std::string(what) + ": non-finite entry");
  if (!is_hermitian(H)) throw InvalidInput(std::string(what) + ": matrix is not Hermitian");
}

ComplexMatrix hermitian_part(const ComplexMatrix& H) { return 0.5 * (H + H.adjoint()); }

Complex canonical_phase(const ComplexVector& v) {
  if (v.size() == 0) return {1.0, 0.0};
  const double vmax = v.cwiseAbs().maxCoeff();
  if (vmax == 0.0) return {1.0, 0.0};
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= vmax * (1.0 - 1e-12)) {
      idx = i;
      break;
    }
  }
  return std::conj(v(idx)) / std::abs(v(idx));
}

EigenDecomposition eig_hermitian(const ComplexMatrix& H) {
  require_hermitian(H, "eig_hermitian");
  const Eigen::Index n = H.rows();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(H));
  if (solver.info() != Eigen::Success) throw InvalidInput("eig_hermitian: eigensolver failed");

  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();

  const double scale = std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
  const double tie = 1e-10 * scale;
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i + 1;
    while (j < n && out.eigenvalues(i) - out.eigenvalues(j) <= tie) ++j;
    if (j - i > 1) canonicalise_cluster(out.eigenvectors, i, j - i);
    i = j;
  }
  for (Eigen::Index k = 0; k < n; ++k)
    out.eigenvectors.col(k) *= canonical_phase(out.eigenvectors.col(k));
  return out;
}

SvdResult svd(const ComplexMatrix& A) {
  if (!all_finite(A)) throw InvalidInput("svd: non-finite entry");
  SvdResult out;
  const Eigen::Index k = std::min(A.rows(), A.cols());
  if (k == 0) {
    out.U.resize(A.rows(), 0);
    out.V.resize(A.cols(), 0);
    return out;
  }
  Eigen::JacobiSVD<ComplexMatrix> solver(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.U = solver.matrixU();
  out.sigma = solver.singularValues();
  out.V = solver.matrixV();
  for (Eigen::Index c = 0; c < k; ++c) {
    const Complex ph = canonical_phase(out.V.col(c));
    out.V.col(c) *= ph;
    out.U.col(c) *= ph;  // keeps U diag(sigma) V^H unchanged
  }
  return out;
}

double default_pd_floor(const ComplexMatrix& R) {
  return 1e-10 * std::max(std::abs(lambda_max(R)), std::abs(lambda_min(R)));
}

ComplexMatrix inv_sqrt_psd(const ComplexMatrix& R, double floor) {
  const EigenDecomposition ed = eig_hermitian(R);
  if (floor < 0.0) floor = 1e-10 * ed.eigenvalues.cwiseAbs().maxCoeff();
  const double lmin = ed.eigenvalues(ed.eigenvalues.size() - 1);
  if (!(lmin >= floor) || lmin <= 0.0)
    throw NotPositiveDefinite("inv_sqrt_psd: smallest eigenvalue " + std::to_string(lmin) +
                                  " is below the positive-definiteness floor " +
                                  std::to_string(floor),
                              lmin);
  const RealVector d = ed.eigenvalues.cwiseSqrt().cwiseInverse();
  const ComplexMatrix M = ed.eigenvectors * d.asDiagonal() * ed.eigenvectors.adjoint();
  return hermitian_part(M);
}

ComplexMatrix sqrt_psd(const ComplexMatrix& R) {
  const EigenDecomposition ed = eig_hermitian(R);
  const RealVector d = ed.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return hermitian_part(ed.eigenvectors * d.asDiagonal() * ed.eigenvectors.adjoint());
}

PrincipalPair principal_pair(const ComplexMatrix& H) {
  const EigenDecomposition ed = eig_hermitian(H);
  return {ed.eigenvalues(0), ed.eigenvectors.col(0)};
}

double lambda_max(const ComplexMatrix& H) {
  require_hermitian(H, "lambda_max");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(H), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(H.rows() - 1);
}

double lambda_min(const ComplexMatrix& H) {
  require_hermitian(H, "lambda_min");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(H), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

RealMatrix embed_hermitian(const ComplexMatrix& H) {
  const Eigen::Index n = H.rows();
  RealMatrix E(2 * n, 2 * n);
  E.topLeftCorner(n, n) = H.real();
  E.topRightCorner(n, n) = -H.imag();
  E.bottomLeftCorner(n, n) = H.imag();
  E.bottomRightCorner(n, n) = H.real();
  return E;
}

RealVector vec_isometric(const ComplexMatrix& A) {
  const Eigen::Index n = A.size();
  RealVector v(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    v(k) = A(k % A.rows(), k / A.rows()).real();
    v(n + k) = A(k % A.rows(), k / A.rows()).imag();
  }
  return v;
}

ComplexMatrix unvec_isometric(const Eigen::Ref<const RealVector>& v, Eigen::Index rows,
                              Eigen::Index cols) {
  const Eigen::Index n = rows * cols;
  if (v.size() != 2 * n) throw InvalidInput("unvec_isometric: size mismatch");
  ComplexMatrix A(rows, cols);
  for (Eigen::Index k = 0; k < n; ++k) A(k % rows, k / rows) = Complex(v(k), v(n + k));
  return A;
}

RealVector vec_hermitian(const ComplexMatrix& H) {
  const Eigen::Index n = H.rows();
  RealVector v(n * n);
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = H(i, i).real();
  Eigen::Index k = n;
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      v(k++) = r2 * H(i, j).real();
      v(k++) = r2 * H(i, j).imag();
    }
  }
  return v;
}

ComplexMatrix unvec_hermitian(const Eigen::Ref<const RealVector>& v, Eigen::Index n) {
  if (v.size() != n * n) throw InvalidInput("unvec_hermitian: size mismatch");
  ComplexMatrix H = ComplexMatrix::Zero(n, n);
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) H(i, i) = v(i);
  Eigen::Index k = n;
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const Complex z(v(k) / r2, v(k + 1) / r2);
      k += 2;
      H(i, j) = z;
      H(j, i) = std::conj(z);
    }
  }
  return H;
}

}  // namespace rab

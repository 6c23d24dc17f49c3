#pragma once

// Dense complex linear algebra used throughout the beamforming toolkit.
//
// Conventions:
//  * eigenvalues are returned in descending order;
//  * inside a cluster of (numerically) equal eigenvalues the basis is the
//    Gram-Schmidt orthonormalisation of the projected unit vectors e_1, e_2, ...,
//    so identity-like inputs give identity-like bases;
//  * every eigenvector / right singular vector has its largest-magnitude entry
//    real and nonnegative (lowest index wins ties).

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace rab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct EigenDecomposition {
  RealVector eigenvalues;     // descending
  ComplexMatrix eigenvectors; // unitary, columns match eigenvalues
};

struct SvdResult {
  ComplexMatrix U;  // N x k, orthonormal columns
  RealVector sigma; // k = min(N, M), descending, nonnegative
  ComplexMatrix V;  // M x k, orthonormal columns
};

struct PrincipalPair {
  double lambda1;
  ComplexVector u1;
};

/// Relative Hermitian tolerance: ||H - H^H||_F <= 1e-12 * max(1, ||H||_F).
bool is_hermitian(const ComplexMatrix& H, double rel_tol = 1e-12);

/// Throws InvalidInput unless H is square, finite and Hermitian.
void require_hermitian(const ComplexMatrix& H, const char* what);

/// (H + H^H) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& H);

EigenDecomposition eig_hermitian(const ComplexMatrix& H);

SvdResult svd(const ComplexMatrix& A);

/// Default positive-definiteness floor: 1e-10 * ||R||_2.
double default_pd_floor(const ComplexMatrix& R);

/// R^{-1/2}; throws NotPositiveDefinite when lambda_min(R) < floor.
/// A negative floor selects default_pd_floor(R).
ComplexMatrix inv_sqrt_psd(const ComplexMatrix& R, double floor = -1.0);

/// R^{1/2} of a PSD matrix (negative eigenvalues are clipped to zero).
ComplexMatrix sqrt_psd(const ComplexMatrix& R);

PrincipalPair principal_pair(const ComplexMatrix& H);

/// Largest eigenvalue only.
double lambda_max(const ComplexMatrix& H);
double lambda_min(const ComplexMatrix& H);

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of side 2*dim.
RealMatrix embed_hermitian(const ComplexMatrix& H);

/// Stacks Re(A) then Im(A) (column-major each); ||result||_2 == ||A||_F.
RealVector vec_isometric(const ComplexMatrix& A);
ComplexMatrix unvec_isometric(const Eigen::Ref<const RealVector>& v, Eigen::Index rows,
                              Eigen::Index cols);

/// Number of real parameters of an n x n Hermitian matrix (n^2).
inline Eigen::Index hermitian_param_count(Eigen::Index n) { return n * n; }

/// Isometric real coordinates of a Hermitian matrix: diagonal entries as-is,
/// then for each i < j (column-major over the strict upper triangle)
/// sqrt(2) Re H_ij followed by sqrt(2) Im H_ij.  ||result|| == ||H||_F.
RealVector vec_hermitian(const ComplexMatrix& H);
ComplexMatrix unvec_hermitian(const Eigen::Ref<const RealVector>& v, Eigen::Index n);

/// Unit-magnitude phase making the largest-magnitude entry of v real >= 0.
Complex canonical_phase(const ComplexVector& v);

}  // namespace rab

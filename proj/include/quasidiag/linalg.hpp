#pragma once

//
// Module      : linalg
// Description : small dense complex linear algebra used by the certification
//               pipeline (operator norm, Hermitian functional calculus,
//               Cholesky and polar factorizations)
//

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "quasidiag/errors.hpp"

namespace qd {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Operator (spectral) norm: largest singular value, computed as the square
/// root of the top eigenvalue of A^†A. Deterministic, no iteration seeds.
inline double operator_norm(const Matrix& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.adjoint() * A);
  const double top = es.eigenvalues().maxCoeff();
  return top <= 0.0 ? 0.0 : std::sqrt(top);
}

/// Smallest eigenvalue of a Hermitian matrix (the matrix is symmetrized
/// first so roundoff in the caller's assembly cannot leak in).
inline double min_eigenvalue_hermitian(const Matrix& A) {
  Matrix H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  return es.eigenvalues().minCoeff();
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues below -tol are rejected; tiny negative dust is clamped to 0.
inline Matrix hermitian_sqrt(const Matrix& A, double tol = 1e-10) {
  Matrix H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  Vector d = es.eigenvalues().cast<cdouble>();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double x = d(i).real();
    if (x < -tol) throw NotPositiveDefinite();
    d(i) = std::sqrt(std::max(x, 0.0));
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// Inverse principal square root; eigenvalues must stay above tol.
inline Matrix hermitian_inv_sqrt(const Matrix& A, double tol = 1e-12) {
  Matrix H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  Vector d = es.eigenvalues().cast<cdouble>();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double x = d(i).real();
    if (x <= tol) throw NotPositiveDefinite();
    d(i) = 1.0 / std::sqrt(x);
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// Upper-triangular Cholesky factor: A = U^† U with U upper triangular.
inline Matrix cholesky_upper(const Matrix& A) {
  Matrix H = 0.5 * (A + A.adjoint());
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite();
  return llt.matrixU();
}

/// Unitary factor of the polar decomposition A = U P (P >= 0), from the SVD.
/// Requires A invertible; near-singular input is refused rather than patched.
inline Matrix polar_unitary(const Matrix& A, double sigma_tol = 1e-10) {
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() <= sigma_tol) throw SingularV();
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// Distance of a square matrix from its own polar unitary, = max |sigma_j - 1|.
inline double polar_gap(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> svd(A);
  double gap = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    gap = std::max(gap, std::abs(svd.singularValues()(i) - 1.0));
  return gap;
}

}  // namespace qd

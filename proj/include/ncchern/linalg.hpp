// Thin wrappers over LAPACKE/CBLAS for the dense kernels that dominate
// runtime. Everything is column-major, matching Eigen's default layout.
#pragma once

#include "ncchern/common.hpp"

namespace ncchern::linalg {

// Eigendecomposition of a Hermitian matrix. A is replaced by the
// eigenvectors (column k pairs with the k-th ascending eigenvalue).
RVector hermitian_eig_inplace(Matrix& A);

// C = A * B.
void gemm_into(const Matrix& A, const Matrix& B, Matrix& C);
Matrix gemm(const Matrix& A, const Matrix& B);

// V * V^H, both triangles filled.
Matrix herk(const Matrix& V);

// |f|^s = (f f^H)^{s/2} via eigendecomposition, eigenvalues floored at 0.
Matrix abs_pow(const Matrix& f, double s);

// Diagonal of |f|^s, same construction, without forming the full power.
RVector abs_pow_diag(const Matrix& f, double s);

// Largest singular value.
double spectral_norm(const Matrix& A);

// Singular values of an anti-Hermitian matrix (|eigenvalues of iK|),
// descending.
RVector anti_hermitian_singvals(const Matrix& K);

}  // namespace ncchern::linalg

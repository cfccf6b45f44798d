#include "ncchern/linalg.hpp"

#include <algorithm>
#include <cmath>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <cblas.h>
#include <lapacke.h>

namespace ncchern::linalg {

RVector hermitian_eig_inplace(Matrix& A) {
  if (A.rows() != A.cols()) throw DimensionError("hermitian_eig: square matrix required");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  RVector evals(n);
  if (n == 0) return evals;
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, A.data(),
                                   n, evals.data());
  if (info != 0)
    throw PrecisionError("zheevd failed to converge, info=" + std::to_string(info));
  return evals;
}

void gemm_into(const Matrix& A, const Matrix& B, Matrix& C) {
  if (A.cols() != B.rows()) throw DimensionError("gemm: inner dimensions differ");
  const auto m = static_cast<blasint>(A.rows());
  const auto k = static_cast<blasint>(A.cols());
  const auto n = static_cast<blasint>(B.cols());
  C.resize(m, n);
  if (m == 0 || n == 0) return;
  if (k == 0) {
    C.setZero();
    return;
  }
  const cxd one(1.0, 0.0), zero(0.0, 0.0);
  cblas_zgemm3m(CblasColMajor, CblasNoTrans, CblasNoTrans, m, n, k, &one,
                A.data(), m, B.data(), k, &zero, C.data(), m);
}

Matrix gemm(const Matrix& A, const Matrix& B) {
  Matrix C;
  gemm_into(A, B, C);
  return C;
}

Matrix herk(const Matrix& V) {
  const auto n = static_cast<blasint>(V.rows());
  const auto k = static_cast<blasint>(V.cols());
  Matrix C = Matrix::Zero(n, n);
  if (n == 0) return C;
  if (k > 0)
    cblas_zherk(CblasColMajor, CblasLower, CblasNoTrans, n, k, 1.0, V.data(),
                n, 0.0, C.data(), n);
  C.triangularView<Eigen::StrictlyUpper>() = C.adjoint();
  return C;
}

Matrix abs_pow(const Matrix& f, double s) {
  Matrix G = herk(f);
  RVector lam = hermitian_eig_inplace(G);  // G now holds eigenvectors
  const auto n = lam.size();
  RVector p(n);
  for (Eigen::Index i = 0; i < n; ++i)
    p[i] = std::pow(std::max(lam[i], 0.0), 0.5 * s);
  return G * p.asDiagonal() * G.adjoint();
}

RVector abs_pow_diag(const Matrix& f, double s) {
  Matrix G = herk(f);
  RVector lam = hermitian_eig_inplace(G);
  const auto n = lam.size();
  RVector p(n);
  for (Eigen::Index i = 0; i < n; ++i)
    p[i] = std::pow(std::max(lam[i], 0.0), 0.5 * s);
  RVector d(n);
  for (Eigen::Index r = 0; r < n; ++r)
    d[r] = (G.row(r).cwiseAbs2() * p.asDiagonal()).sum();
  return d;
}

double spectral_norm(const Matrix& A) {
  Matrix G = herk(A);
  RVector lam = hermitian_eig_inplace(G);
  if (lam.size() == 0) return 0.0;
  return std::sqrt(std::max(lam[lam.size() - 1], 0.0));
}

RVector anti_hermitian_singvals(const Matrix& K) {
  Matrix H = cxd(0.0, 1.0) * K;
  RVector lam = hermitian_eig_inplace(H);
  RVector s = lam.cwiseAbs();
  std::sort(s.data(), s.data() + s.size(), std::greater<double>());
  return s;
}

}  // namespace ncchern::linalg

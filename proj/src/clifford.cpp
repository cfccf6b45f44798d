#include "ncchern/clifford.hpp"

#include <cmath>

namespace ncchern {

namespace {

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

Matrix pauli(int k) {
  Matrix s(2, 2);
  switch (k) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, cxd(0, -1), cxd(0, 1), 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

}  // namespace

cxd unit_imag_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

CliffordRep build_clifford(int n) {
  if (n < 1 || n > 4)
    throw DimensionError("build_clifford: n must be in [1,4], got " +
                         std::to_string(n));
  CliffordRep rep;
  rep.n = n;
  rep.dim = 1 << n;
  rep.gamma = {pauli(1), pauli(2)};
  for (int level = 2; level <= n; ++level) {
    const Matrix id = Matrix::Identity(1 << (level - 1), 1 << (level - 1));
    std::vector<Matrix> next;
    next.reserve(2 * level);
    for (const Matrix& g : rep.gamma) next.push_back(kron(g, pauli(3)));
    next.push_back(kron(id, pauli(1)));
    next.push_back(kron(id, pauli(2)));
    rep.gamma = std::move(next);
  }

  Matrix prod = Matrix::Identity(rep.dim, rep.dim);
  for (const Matrix& g : rep.gamma) prod = prod * g;
  rep.gamma0 = -unit_imag_pow(-n) * prod;

  // Measure the orientation on the standard basis.
  std::vector<RVector> basis;
  for (int i = 0; i < 2 * n; ++i) {
    RVector e = RVector::Zero(2 * n);
    e[i] = 1.0;
    basis.push_back(e);
  }
  rep.orientation = 0;  // graded_trace_closed_form must not consult it yet
  const cxd measured = graded_trace(rep, basis);
  const cxd reference = -unit_imag_pow(-n) * std::pow(2.0, n);
  const cxd ratio = measured / reference;
  if (std::abs(ratio.imag()) > 1e-12 ||
      std::abs(std::abs(ratio.real()) - 1.0) > 1e-12)
    throw PrecisionError("clifford orientation measurement not a unit sign");
  rep.orientation = ratio.real() > 0 ? 1 : -1;
  return rep;
}

Matrix gamma_dot(const CliffordRep& rep, const RVector& v) {
  if (v.size() != 2 * rep.n)
    throw DimensionError("gamma_dot: vector must have 2n components");
  Matrix out = Matrix::Zero(rep.dim, rep.dim);
  for (int i = 0; i < 2 * rep.n; ++i)
    if (v[i] != 0.0) out += v[i] * rep.gamma[i];
  return out;
}

cxd graded_trace(const CliffordRep& rep, const std::vector<RVector>& ys) {
  Matrix acc = rep.gamma0;
  for (const RVector& y : ys) acc = acc * gamma_dot(rep, y);
  return acc.trace();
}

cxd graded_trace_closed_form(const CliffordRep& rep,
                             const std::vector<RVector>& ys) {
  if (static_cast<int>(ys.size()) != 2 * rep.n)
    throw DimensionError("closed form needs exactly 2n vectors");
  Eigen::MatrixXd M(2 * rep.n, 2 * rep.n);
  for (int j = 0; j < 2 * rep.n; ++j) M.col(j) = ys[j];
  const double sign = rep.orientation ? rep.orientation : 1;
  return sign * -unit_imag_pow(-rep.n) * std::pow(2.0, rep.n) *
         M.determinant();
}

}  // namespace ncchern

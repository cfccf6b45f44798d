#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ncchern/clifford.hpp"

#include <random>

using namespace ncchern;

namespace {

double op_norm(const Matrix& A) { return A.cwiseAbs().maxCoeff(); }

RVector random_vec(std::mt19937_64& gen, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RVector v(d);
  for (int i = 0; i < d; ++i) v[i] = u(gen);
  return v;
}

}  // namespace

TEST_CASE("generators are Hermitian unitaries") {
  for (int n = 1; n <= 4; ++n) {
    const CliffordRep rep = build_clifford(n);
    REQUIRE(rep.dim == (1 << n));
    REQUIRE(static_cast<int>(rep.gamma.size()) == 2 * n);
    const Matrix id = Matrix::Identity(rep.dim, rep.dim);
    for (const Matrix& g : rep.gamma) {
      CHECK(op_norm(g - g.adjoint()) < 1e-14);
      CHECK(op_norm(g * g - id) < 1e-14);
    }
  }
}

TEST_CASE("anticommutation relations") {
  for (int n = 1; n <= 3; ++n) {
    const CliffordRep rep = build_clifford(n);
    const Matrix id = Matrix::Identity(rep.dim, rep.dim);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j < 2 * n; ++j) {
        const Matrix anti = rep.gamma[i] * rep.gamma[j] + rep.gamma[j] * rep.gamma[i];
        const Matrix want = (i == j) ? Matrix(2.0 * id) : Matrix(Matrix::Zero(rep.dim, rep.dim));
        CHECK(op_norm(anti - want) < 1e-14);
      }
  }
}

TEST_CASE("chirality element") {
  for (int n = 1; n <= 3; ++n) {
    const CliffordRep rep = build_clifford(n);
    const Matrix id = Matrix::Identity(rep.dim, rep.dim);
    CHECK(op_norm(rep.gamma0 - rep.gamma0.adjoint()) < 1e-14);
    CHECK(op_norm(rep.gamma0 * rep.gamma0 - id) < 1e-14);
    for (const Matrix& g : rep.gamma)
      CHECK(op_norm(rep.gamma0 * g + g * rep.gamma0) < 1e-14);
    // product form: gamma0 = -i^{-n} gamma_1 ... gamma_{2n}
    Matrix prod = id;
    for (const Matrix& g : rep.gamma) prod = prod * g;
    CHECK(op_norm(rep.gamma0 - cxd(-1.0, 0.0) * unit_imag_pow(-n) * prod) < 1e-13);
    CHECK((rep.orientation == 1 || rep.orientation == -1));
  }
}

TEST_CASE("graded trace of too few factors vanishes") {
  std::mt19937_64 gen(7);
  for (int n = 1; n <= 3; ++n) {
    const CliffordRep rep = build_clifford(n);
    for (int k = 0; k < 2 * n; ++k) {
      std::vector<RVector> ys;
      for (int i = 0; i < k; ++i) ys.push_back(random_vec(gen, 2 * n));
      CHECK(std::abs(graded_trace(rep, ys)) < 1e-12);
    }
  }
}

TEST_CASE("graded trace equals the determinant form: 100 random tuples") {
  std::mt19937_64 gen(11);
  for (int n = 1; n <= 3; ++n) {
    const CliffordRep rep = build_clifford(n);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      std::vector<RVector> ys;
      for (int i = 0; i < 2 * n; ++i) ys.push_back(random_vec(gen, 2 * n));
      const cxd got = graded_trace(rep, ys);
      const cxd want = graded_trace_closed_form(rep, ys);
      worst = std::max(worst, std::abs(got - want));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("square of a contraction is the squared norm") {
  std::mt19937_64 gen(13);
  for (int n = 1; n <= 3; ++n) {
    const CliffordRep rep = build_clifford(n);
    const Matrix id = Matrix::Identity(rep.dim, rep.dim);
    const RVector v = random_vec(gen, 2 * n);
    const Matrix vg = gamma_dot(rep, v);
    CHECK(op_norm(vg * vg - v.squaredNorm() * id) < 1e-14);
  }
}

TEST_CASE("unit imaginary powers") {
  CHECK(unit_imag_pow(0) == cxd(1.0, 0.0));
  CHECK(unit_imag_pow(1) == cxd(0.0, 1.0));
  CHECK(unit_imag_pow(2) == cxd(-1.0, 0.0));
  CHECK(unit_imag_pow(3) == cxd(0.0, -1.0));
  CHECK(unit_imag_pow(4) == cxd(1.0, 0.0));
  CHECK(unit_imag_pow(-1) == cxd(0.0, -1.0));
  CHECK(unit_imag_pow(-2) == cxd(-1.0, 0.0));
  CHECK(unit_imag_pow(-6) == unit_imag_pow(2));
}

TEST_CASE("representation bounds") {
  CHECK_THROWS_AS(build_clifford(0), DimensionError);
  CHECK_THROWS_AS(build_clifford(5), DimensionError);
  const CliffordRep rep = build_clifford(1);
  RVector bad(3);
  bad << 1, 2, 3;
  CHECK_THROWS_AS(gamma_dot(rep, bad), DimensionError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ncchern/model.hpp"
#include "ncchern/nctorus.hpp"
#include "ncchern/volume.hpp"

#include <random>

using namespace ncchern;

namespace {

double op_norm(const Matrix& A) { return A.cwiseAbs().maxCoeff(); }

Matrix random_hermitian(std::mt19937_64& gen, std::int64_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix A(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) A(i, j) = cxd(u(gen), u(gen));
  return 0.5 * (A + A.adjoint());
}

}  // namespace

TEST_CASE("scheme parsing and defaults") {
  CHECK(parse_scheme("open-commutator", 0).kind == DerivationKind::OpenCommutator);
  CHECK(parse_scheme("periodic-phase", 8).L == 8);
  CHECK(parse_scheme("periodic-min-image", 8).kind ==
        DerivationKind::PeriodicMinImage);
  CHECK_THROWS_AS(parse_scheme("bogus", 8), LookupError);
  CHECK(scheme_for(make_volume(2, 6, 1, Boundary::Open)).kind ==
        DerivationKind::OpenCommutator);
  CHECK(scheme_for(make_volume(2, 6, 1, Boundary::Periodic)).kind ==
        DerivationKind::PeriodicMinImage);
}

TEST_CASE("scheme/volume mismatch is refused") {
  const FiniteVolume open_vol = make_volume(2, 4, 1, Boundary::Open);
  const FiniteVolume torus = make_volume(2, 4, 1, Boundary::Periodic);
  const Matrix f = Matrix::Identity(open_vol.dofs(), open_vol.dofs());
  CHECK_THROWS_AS(derivation(f, 1, open_vol, DerivationScheme::periodic_phase(4)),
                  SchemeError);
  CHECK_THROWS_AS(derivation(f, 1, torus, DerivationScheme::open_commutator()),
                  SchemeError);
  CHECK_THROWS_AS(derivation(f, 1, torus, DerivationScheme::periodic_phase(6)),
                  SchemeError);
  CHECK_THROWS_AS(derivation(f, 0, open_vol, DerivationScheme::open_commutator()),
                  DimensionError);
  CHECK_THROWS_AS(derivation(f, 3, open_vol, DerivationScheme::open_commutator()),
                  DimensionError);
}

TEST_CASE("open derivation is the commutator with position") {
  std::mt19937_64 gen(3);
  const FiniteVolume vol = make_volume(2, 4, 2, Boundary::Open);
  const Matrix f = random_hermitian(gen, vol.dofs());
  for (int dir = 1; dir <= 2; ++dir) {
    Matrix X = Matrix::Zero(vol.dofs(), vol.dofs());
    for (std::int64_t s = 0; s < vol.sites(); ++s)
      for (int q = 0; q < vol.Q; ++q)
        X(vol.dof(s, q), vol.dof(s, q)) = vol.position(s)[dir - 1];
    const Matrix want = cxd(0, 1) * (X * f - f * X);
    CHECK(op_norm(derivation(f, dir, vol, DerivationScheme::open_commutator()) -
                  want) < 1e-13);
  }
}

TEST_CASE("derivations annihilate diagonal operators and obey the product rule") {
  std::mt19937_64 gen(5);
  const FiniteVolume vol = make_volume(2, 5, 1, Boundary::Periodic);
  const DerivationScheme sch = DerivationScheme::periodic_min_image(5);
  Matrix diag = Matrix::Zero(vol.dofs(), vol.dofs());
  for (std::int64_t i = 0; i < vol.dofs(); ++i) diag(i, i) = cxd(0.3 * double(i), 0.1);
  CHECK(op_norm(derivation(diag, 1, vol, sch)) == 0.0);

  // product rule holds exactly for min-image on short-range factors whose
  // product stays short-range: use strictly one-hop operators on L=5
  const HoppingModel m = model_zoo("hofstadter2d");
  const FiniteVolume hv = make_volume(2, 5, 1, Boundary::Periodic);
  const Matrix H = build_hamiltonian(m, hv, MagneticField::zero(2),
                                     DisorderRealization::none());
  const DerivationScheme hs = DerivationScheme::periodic_min_image(5);
  const Matrix lhs = derivation(H * H, 1, hv, hs);
  const Matrix rhs = derivation(H, 1, hv, hs) * H + H * derivation(H, 1, hv, hs);
  CHECK(op_norm(lhs - rhs) < 1e-12);
}

TEST_CASE("derivations in different directions commute") {
  std::mt19937_64 gen(9);
  for (auto kind : {DerivationKind::PeriodicPhase, DerivationKind::PeriodicMinImage}) {
    const FiniteVolume vol = make_volume(2, 4, 1, Boundary::Periodic);
    const DerivationScheme sch{kind, 4};
    const Matrix f = random_hermitian(gen, vol.dofs());
    const Matrix d12 = derivation(derivation(f, 1, vol, sch), 2, vol, sch);
    const Matrix d21 = derivation(derivation(f, 2, vol, sch), 1, vol, sch);
    CHECK(op_norm(d12 - d21) < 1e-13);
  }
}

TEST_CASE("derivation of a Hermitian operator is Hermitian") {
  std::mt19937_64 gen(21);
  const FiniteVolume vol = make_volume(2, 5, 1, Boundary::Periodic);
  const Matrix f = random_hermitian(gen, vol.dofs());
  for (auto kind : {DerivationKind::PeriodicPhase, DerivationKind::PeriodicMinImage}) {
    const Matrix df = derivation(f, 2, vol, DerivationScheme{kind, 5});
    CHECK(op_norm(df - df.adjoint()) < 1e-13);
  }
}

TEST_CASE("phase derivation approaches the min-image one as L grows") {
  // one-hop kernel: the phase factor carries an O(1/L) argument error,
  // so the gap halves per doubling of L
  const HoppingModel m = model_zoo("hofstadter2d");
  double prev = 1e9;
  for (int L : {8, 16, 32}) {
    const FiniteVolume vol = make_volume(2, L, 1, Boundary::Periodic);
    const Matrix H = build_hamiltonian(m, vol, MagneticField::zero(2),
                                       DisorderRealization::none());
    const Matrix dphase =
        derivation(H, 1, vol, DerivationScheme::periodic_phase(L));
    const Matrix dexact =
        derivation(H, 1, vol, DerivationScheme::periodic_min_image(L));
    const double err = op_norm(dphase - dexact);
    CHECK(err < 0.7 * prev);
    prev = err;
  }
}

TEST_CASE("trace per volume averages diagonal blocks over the core") {
  const FiniteVolume vol = make_volume(2, 4, 2, Boundary::Periodic);
  Matrix f = Matrix::Zero(vol.dofs(), vol.dofs());
  for (std::int64_t i = 0; i < vol.dofs(); ++i) f(i, i) = 2.5;
  const auto core = central_core(vol, 0.5);
  CHECK(trace_per_volume(f, vol, core).real() == doctest::Approx(5.0));  // Q=2
  CHECK_THROWS_AS(trace_per_volume(f, vol, {}), ConfigError);
  CHECK_THROWS_AS(trace_per_volume(f, vol, {999}), GeometryError);
}

TEST_CASE("core selection respects the fraction") {
  const FiniteVolume vol = make_volume(2, 8, 1, Boundary::Open);
  CHECK(central_core(vol, 0.5).size() == 16);  // 4x4
  CHECK(central_core(vol, 1.0).size() == 64);
  CHECK(central_core(vol, 0.01).size() == 1);
}

TEST_CASE("ls norms are monotone in s") {
  // the trace is volume-normalized, so higher s weights the large
  // eigenvalues more: ||f||_2 <= ||f||_4
  std::mt19937_64 gen(17);
  const FiniteVolume vol = make_volume(2, 4, 1, Boundary::Periodic);
  Matrix f = random_hermitian(gen, vol.dofs());
  f /= (2.0 * op_norm(f));
  const auto core = central_core(vol, 1.0);
  const double n2 = ls_norm(f, 2.0, vol, core);
  const double n4 = ls_norm(f, 4.0, vol, core);
  CHECK(n4 >= n2);
  CHECK(n4 > 0.0);
  CHECK_THROWS_AS(ls_norm(f, 0.5, vol, core), ConfigError);
}

TEST_CASE("sobolev norm vanishes only for the zero operator") {
  const FiniteVolume vol = make_volume(2, 5, 1, Boundary::Periodic);
  const auto core = central_core(vol, 1.0);
  const DerivationScheme sch = scheme_for(vol);
  const Matrix z = Matrix::Zero(vol.dofs(), vol.dofs());
  CHECK(sobolev_norm(z, 1, vol, core, sch) == 0.0);
  std::mt19937_64 gen(23);
  const Matrix f = random_hermitian(gen, vol.dofs());
  CHECK(sobolev_norm(f, 1, vol, core, sch) > 0.0);
  const FiniteVolume vol4 = make_volume(4, 3, 1, Boundary::Periodic);
  const Matrix g = Matrix::Identity(vol4.dofs(), vol4.dofs());
  CHECK_THROWS_AS(
      sobolev_norm(g, 1, vol4, central_core(vol4, 1.0), scheme_for(vol4)),
      DimensionError);
}

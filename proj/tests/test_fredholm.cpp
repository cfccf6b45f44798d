#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ncchern/clifford.hpp"
#include "ncchern/fredholm.hpp"
#include "ncchern/model.hpp"
#include "ncchern/volume.hpp"

#include <cmath>

using namespace ncchern;

namespace {

FermiProjector clean_projector(const FiniteVolume& vol, double m) {
  const HoppingModel model = model_zoo("chern2d", {{"m", m}});
  const Matrix H = build_hamiltonian(model, vol, MagneticField::zero(2),
                                     DisorderRealization::none());
  return fermi_projector(H, 0.0);
}

}  // namespace

TEST_CASE("dirac phase is a Hermitian unitary, diagonal over sites") {
  const FiniteVolume vol = make_volume(2, 7, 2, Boundary::Open);
  const CliffordRep rep = build_clifford(1);
  const DiracPhase ph = dirac_phase(vol, rep, RVector::Zero(2));
  const Eigen::Index dim = ph.Dhat.rows();
  REQUIRE(dim == vol.dofs() * 2);
  CHECK((ph.Dhat - ph.Dhat.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((ph.Dhat * ph.Dhat - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() <
        1e-13);
  // spinor blocks must not couple distinct sites: the (site 0, site 1)
  // rectangle is zero
  const int w = 2 * 2;  // Q * 2^n
  CHECK(ph.Dhat.block(0, w, w, w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("site blocks follow the unit position vector") {
  const FiniteVolume vol = make_volume(2, 5, 1, Boundary::Open);
  const CliffordRep rep = build_clifford(1);
  const DiracPhase ph = dirac_phase(vol, rep, RVector::Zero(2));
  const std::int64_t site = vol.site_at_position({2, -1});
  REQUIRE(site >= 0);
  RVector x(2);
  x << 2.0, -1.0;
  const Matrix want = gamma_dot(rep, x / x.norm());
  const Matrix got = ph.Dhat.block(2 * site, 2 * site, 2, 2);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("each insertion fills the zero site with a unit vector choice") {
  const FiniteVolume vol = make_volume(2, 5, 1, Boundary::Open);
  const CliffordRep rep = build_clifford(1);
  const std::int64_t zero_site = vol.site_of(vol.origin());
  {
    const DiracPhase ph = dirac_phase(vol, rep, RVector::Zero(2),
                                      DiracInsertion::SymmetricSum);
    RVector v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const Matrix want = gamma_dot(rep, v);
    CHECK((ph.Dhat.block(2 * zero_site, 2 * zero_site, 2, 2) - want)
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
  {
    const DiracPhase ph = dirac_phase(vol, rep, RVector::Zero(2),
                                      DiracInsertion::FirstGenerator);
    CHECK((ph.Dhat.block(2 * zero_site, 2 * zero_site, 2, 2) - rep.gamma[0])
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
}

TEST_CASE("supertrace extrapolation names the clean integer") {
  const FiniteVolume vol = make_volume(2, 18, 2, Boundary::Open);
  const FermiProjector P = clean_projector(vol, 1.0);
  const IndexEstimate est = index_estimate(P, vol, build_clifford(1),
                                           RVector::Zero(2), {3.8, 5.1, 6.8});
  CHECK(est.nearest_integer == -1);
  CHECK(est.converged);
  CHECK(std::abs(est.imag_part) < 1e-10);
  CHECK(est.distance < 0.1);
  REQUIRE(est.values.size() == 3);
}

TEST_CASE("trivial mass gives index zero") {
  const FiniteVolume vol = make_volume(2, 14, 2, Boundary::Open);
  const FermiProjector P = clean_projector(vol, 3.0);
  const IndexEstimate est = index_estimate(P, vol, build_clifford(1),
                                           RVector::Zero(2), {3.0, 4.0, 5.5});
  CHECK(est.nearest_integer == 0);
  CHECK(est.distance < 0.1);
}

TEST_CASE("offset and insertion leave the integer alone") {
  const FiniteVolume vol = make_volume(2, 14, 2, Boundary::Open);
  const FermiProjector P = clean_projector(vol, 1.0);
  const CliffordRep rep = build_clifford(1);
  const std::vector<double> radii = {3.0, 4.0, 5.5};
  const IndexEstimate centered =
      index_estimate(P, vol, rep, RVector::Zero(2), radii);
  const IndexEstimate shifted = index_estimate(
      P, vol, rep, RVector::Constant(2, 0.5), radii);
  const IndexEstimate other_fill =
      index_estimate(P, vol, rep, RVector::Zero(2), radii,
                     DiracInsertion::FirstGenerator);
  CHECK(centered.nearest_integer == -1);
  CHECK(shifted.nearest_integer == centered.nearest_integer);
  CHECK(other_fill.nearest_integer == centered.nearest_integer);
}

TEST_CASE("commutator Schatten norms are ordered and volume-stable") {
  const CliffordRep rep = build_clifford(1);
  const RVector x0 = RVector::Zero(2);
  double s3_small = 0.0, s3_large = 0.0;
  {
    const FiniteVolume vol = make_volume(2, 10, 2, Boundary::Open);
    const FermiProjector P = clean_projector(vol, 1.0);
    const double s1 = commutator_schatten(P, vol, rep, x0, 1.0);
    s3_small = commutator_schatten(P, vol, rep, x0, 3.0);
    CHECK(s1 >= s3_small);  // Schatten norms decrease in q
  }
  {
    const FiniteVolume vol = make_volume(2, 14, 2, Boundary::Open);
    const FermiProjector P = clean_projector(vol, 1.0);
    s3_large = commutator_schatten(P, vol, rep, x0, 3.0);
  }
  // the 2n+1 Schatten norm is the one the index formula needs to stay
  // finite as the volume grows
  CHECK(std::abs(s3_large - s3_small) / s3_small < 0.10);
}

TEST_CASE("index estimation refuses malformed requests") {
  const FiniteVolume vol = make_volume(2, 10, 2, Boundary::Open);
  const FermiProjector P = clean_projector(vol, 1.0);
  const CliffordRep rep = build_clifford(1);
  CHECK_THROWS_AS(index_estimate(P, vol, rep, RVector::Zero(2), {}),
                  ConfigError);
  CHECK_THROWS_AS(index_estimate(P, vol, rep, RVector::Zero(2), {3.0, 2.0}),
                  ConfigError);
  CHECK_THROWS_AS(index_estimate(P, vol, rep, RVector::Zero(2), {3.0, 99.0}),
                  ConfigError);
  CHECK_THROWS_AS(index_estimate(P, vol, rep, RVector::Constant(2, 1.5), {3.0}),
                  ConfigError);
  CHECK_THROWS_AS(
      index_estimate(P, vol, build_clifford(2), RVector::Zero(4), {3.0}),
      DimensionError);
  CHECK_THROWS_AS(commutator_schatten(P, vol, rep, RVector::Zero(2), -1.0),
                  ConfigError);
}

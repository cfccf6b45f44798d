#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ncchern/localization.hpp"
#include "ncchern/model.hpp"
#include "ncchern/nctorus.hpp"
#include "ncchern/volume.hpp"

#include <cmath>
#include <map>
#include <string>

using namespace ncchern;

namespace {

double clean_length(const char* name, int L, double fermi = 0.0) {
  std::map<std::string, double> params;
  if (name == std::string("chern2d")) params["m"] = 1.0;
  const HoppingModel model = model_zoo(name, params);
  const FiniteVolume vol = make_volume(2, L, model.Q, Boundary::Periodic);
  const Matrix H = build_hamiltonian(model, vol, MagneticField::zero(2),
                                     DisorderRealization::none());
  return localization_length(fermi_projector(H, fermi), vol, 1,
                             scheme_for(vol), central_core(vol, 0.5));
}

}  // namespace

TEST_CASE("clean localization length is volume-stable") {
  const double a = clean_length("chern2d", 12);
  const double b = clean_length("chern2d", 16);
  CHECK(a > 0.5);
  CHECK(std::abs(a - b) / b < 0.02);
}

TEST_CASE("the atomic projector has exactly zero localization length") {
  // strictly on-site projector: every derivation annihilates it
  CHECK(clean_length("atomic", 10) < 1e-14);
}

TEST_CASE("localization length checks the dimension pairing") {
  const HoppingModel model = model_zoo("chern2d", {{"m", 1.0}});
  const FiniteVolume vol = make_volume(2, 8, 2, Boundary::Periodic);
  const Matrix H = build_hamiltonian(model, vol, MagneticField::zero(2),
                                     DisorderRealization::none());
  CHECK_THROWS_AS(localization_length(fermi_projector(H, 0.0), vol, 2,
                                      scheme_for(vol), central_core(vol, 0.5)),
                  DimensionError);
}

TEST_CASE("fractional moments vanish identically in the atomic limit") {
  const HoppingModel model = model_zoo("atomic", {});
  const FiniteVolume vol = make_volume(2, 12, 2, Boundary::Periodic);
  const FracMomentFit fit =
      fractional_moment_fit(model, vol, MagneticField::zero(2), 4.0, 0.0, 0.5,
                            1e-3, {1, 2}, {2, 3, 4, 5});
  CHECK(fit.exact_zero);
  CHECK(std::isinf(fit.beta));
  CHECK(fit.residual == 0.0);
  CHECK_FALSE(fit.delocalized);
  for (double m : fit.moments) CHECK(m == 0.0);
}

TEST_CASE("strong bond disorder resolves as decay, clean band center does not") {
  const HoppingModel model = model_zoo("chern2d", {{"m", 1.0}});
  const FiniteVolume vol = make_volume(2, 20, 2, Boundary::Periodic);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  const std::vector<int> dist = {2, 3, 4, 5, 6, 7, 8};
  const FracMomentFit strong = fractional_moment_fit(
      model, vol, MagneticField::zero(2), 8.0, 0.0, 0.5, 0.01, seeds, dist);
  CHECK(strong.beta > 0.0);
  CHECK(strong.decay_tstat > 2.0);
  CHECK_FALSE(strong.delocalized);
  const FracMomentFit clean = fractional_moment_fit(
      model, vol, MagneticField::zero(2), 0.0, 2.0, 0.5, 0.01, {1}, dist);
  CHECK(clean.delocalized);
}

TEST_CASE("fractional moment fit refuses malformed requests") {
  const HoppingModel model = model_zoo("chern2d", {{"m", 1.0}});
  const FiniteVolume vol = make_volume(2, 12, 2, Boundary::Periodic);
  const MagneticField B = MagneticField::zero(2);
  const std::vector<int> dist = {2, 3, 4, 5};
  CHECK_THROWS_AS(fractional_moment_fit(model, vol, B, 1.0, 0.0, 1.2, 1e-3,
                                        {1}, dist),
                  ConfigError);
  CHECK_THROWS_AS(fractional_moment_fit(model, vol, B, 1.0, 0.0, 0.5, -1.0,
                                        {1}, dist),
                  ConfigError);
  CHECK_THROWS_AS(fractional_moment_fit(model, vol, B, 1.0, 0.0, 0.5, 1e-3,
                                        {1}, {2, 3, 4}),
                  ConfigError);
  CHECK_THROWS_AS(fractional_moment_fit(model, vol, B, 1.0, 0.0, 0.5, 1e-3,
                                        {1}, {2, 3, 4, 50}),
                  ConfigError);
  CHECK_THROWS_AS(fractional_moment_fit(model, vol, B, 1.0, 0.0, 0.5, 1e-3, {},
                                        dist),
                  ConfigError);
}

TEST_CASE("projector deformation distance: zero at zero, crossing flagged") {
  const HoppingModel model = model_zoo("atomic", {});
  const FiniteVolume vol = make_volume(2, 8, 2, Boundary::Periodic);
  // on-site levels sit at +-1; a sup-norm 1.5 deformation pushes some level
  // through the Fermi energy, a 0.3 one cannot
  const SobolevTable tab = sobolev_continuity(
      model, vol, MagneticField::zero(2), 0.0, 0.0, {1.5, 0.3, 0.0}, 1, {3},
      scheme_for(vol), 1.0, 777);
  REQUIRE(tab.rows.size() == 3);
  CHECK(tab.rows[0].delta_h == 1.5);
  CHECK(tab.rows[0].crossing);
  CHECK_FALSE(tab.rows[1].crossing);
  CHECK(tab.rows[1].norm > 0.0);
  CHECK(tab.rows[2].norm == 0.0);
  CHECK_FALSE(tab.rows[2].crossing);
  // only one usable positive row: no slope is fitted
  CHECK(tab.loglog_slope == 0.0);
}

TEST_CASE("projector deformation distance shrinks with the deformation") {
  const HoppingModel model = model_zoo("chern2d", {{"m", 1.0}});
  const FiniteVolume vol = make_volume(2, 10, 2, Boundary::Periodic);
  const SobolevTable tab = sobolev_continuity(
      model, vol, MagneticField::zero(2), 0.0, 0.0, {0.2, 0.1, 0.05}, 1, {1},
      scheme_for(vol), 0.5, 777);
  REQUIRE(tab.rows.size() == 3);
  for (std::size_t i = 1; i < tab.rows.size(); ++i) {
    CHECK_FALSE(tab.rows[i].crossing);
    CHECK(tab.rows[i].norm < tab.rows[i - 1].norm);
  }
  CHECK(tab.loglog_slope > 0.5);
}

TEST_CASE("deformation scan refuses malformed requests") {
  const HoppingModel model = model_zoo("chern2d", {{"m", 1.0}});
  const FiniteVolume vol = make_volume(2, 8, 2, Boundary::Periodic);
  const MagneticField B = MagneticField::zero(2);
  CHECK_THROWS_AS(sobolev_continuity(model, vol, B, 1.0, 0.0, {}, 1, {1},
                                     scheme_for(vol)),
                  ConfigError);
  CHECK_THROWS_AS(sobolev_continuity(model, vol, B, 1.0, 0.0, {-0.1}, 1, {1},
                                     scheme_for(vol)),
                  ConfigError);
  CHECK_THROWS_AS(sobolev_continuity(model, vol, B, 1.0, 0.0, {0.1}, 1, {},
                                     scheme_for(vol)),
                  ConfigError);
}

TEST_CASE("contour projector agrees with the eigendecomposition when gapped") {
  const HoppingModel model = model_zoo("chern2d", {{"m", 1.0}});
  const FiniteVolume vol = make_volume(2, 6, 2, Boundary::Periodic);
  const Matrix H = build_hamiltonian(model, vol, MagneticField::zero(2),
                                     DisorderRealization::none());
  const FermiProjector P = fermi_projector(H, 0.0);
  const double d32 = (contour_projector(H, 0.0, 32) - P.P).cwiseAbs().maxCoeff();
  const double d64 = (contour_projector(H, 0.0, 64) - P.P).cwiseAbs().maxCoeff();
  CHECK(d64 < 1e-10);
  CHECK(d64 < d32);
  CHECK_THROWS_AS(contour_projector(H, 0.0, 4), ConfigError);
}

#include "ncchern/nctorus.hpp"

#include "ncchern/linalg.hpp"

#include <cmath>

namespace ncchern {

DerivationScheme DerivationScheme::open_commutator() {
  return {DerivationKind::OpenCommutator, 0};
}

DerivationScheme DerivationScheme::periodic_phase(int L) {
  return {DerivationKind::PeriodicPhase, L};
}

DerivationScheme DerivationScheme::periodic_min_image(int L) {
  return {DerivationKind::PeriodicMinImage, L};
}

DerivationScheme parse_scheme(const std::string& name, int L) {
  if (name == "open-commutator") return DerivationScheme::open_commutator();
  if (name == "periodic-phase") return DerivationScheme::periodic_phase(L);
  if (name == "periodic-min-image")
    return DerivationScheme::periodic_min_image(L);
  throw LookupError("unknown derivation scheme '" + name + "'");
}

std::string scheme_name(const DerivationScheme& s) {
  switch (s.kind) {
    case DerivationKind::OpenCommutator: return "open-commutator";
    case DerivationKind::PeriodicPhase: return "periodic-phase";
    case DerivationKind::PeriodicMinImage: return "periodic-min-image";
  }
  return "?";
}

// min-image converges in L far faster than the phase factors, which deform
// the longest hops heavily on small tori
DerivationScheme scheme_for(const FiniteVolume& vol) {
  return vol.boundary == Boundary::Open
             ? DerivationScheme::open_commutator()
             : DerivationScheme::periodic_min_image(vol.L);
}

namespace {

void require_match(const FiniteVolume& vol, const DerivationScheme& s) {
  const bool periodic_kind = s.kind != DerivationKind::OpenCommutator;
  if (periodic_kind && vol.boundary != Boundary::Periodic)
    throw SchemeError(scheme_name(s) + " requires a periodic volume");
  if (!periodic_kind && vol.boundary != Boundary::Open)
    throw SchemeError("open-commutator requires an open volume");
  if (periodic_kind && s.L != vol.L)
    throw SchemeError("scheme wrap length " + std::to_string(s.L) +
                      " does not match volume L=" + std::to_string(vol.L));
}

}  // namespace

Matrix derivation(const Matrix& f, int direction, const FiniteVolume& vol,
                  const DerivationScheme& scheme) {
  if (direction < 1 || direction > vol.d)
    throw DimensionError("derivation direction " + std::to_string(direction) +
                         " outside 1.." + std::to_string(vol.d));
  if (f.rows() != vol.dofs() || f.cols() != vol.dofs())
    throw DimensionError("operator size does not match the volume");
  require_match(vol, scheme);

  const int i = direction - 1;
  const std::int64_t nd = vol.dofs();
  // per-dof centered coordinate in the chosen direction
  std::vector<int> xi(static_cast<std::size_t>(nd));
  for (std::int64_t s = 0; s < vol.sites(); ++s) {
    const int p = vol.position(s)[i];
    for (int q = 0; q < vol.Q; ++q) xi[static_cast<std::size_t>(vol.dof(s, q))] = p;
  }

  Matrix out(nd, nd);
  const cxd iu(0.0, 1.0);
  switch (scheme.kind) {
    case DerivationKind::OpenCommutator: {
      for (std::int64_t c = 0; c < nd; ++c) {
        const int xc = xi[static_cast<std::size_t>(c)];
        for (std::int64_t r = 0; r < nd; ++r)
          out(r, c) = iu * double(xi[static_cast<std::size_t>(r)] - xc) * f(r, c);
      }
      break;
    }
    case DerivationKind::PeriodicPhase: {
      // (L/2pi)(e^{i theta (x_r - x_c)} - 1), theta = 2pi/L; the difference
      // x_r - x_c only enters mod L, so the factor is wrap-consistent.
      const double theta = 2.0 * kPi / scheme.L;
      const double scale = scheme.L / (2.0 * kPi);
      std::vector<cxd> factor(static_cast<std::size_t>(2 * vol.L + 1));
      for (int dlt = -vol.L; dlt <= vol.L; ++dlt)
        factor[static_cast<std::size_t>(dlt + vol.L)] =
            scale * (std::polar(1.0, theta * dlt) - 1.0);
      for (std::int64_t c = 0; c < nd; ++c) {
        const int xc = xi[static_cast<std::size_t>(c)];
        for (std::int64_t r = 0; r < nd; ++r)
          out(r, c) =
              factor[static_cast<std::size_t>(xi[static_cast<std::size_t>(r)] - xc + vol.L)] *
              f(r, c);
      }
      break;
    }
    case DerivationKind::PeriodicMinImage: {
      const int L = vol.L;
      auto wrap = [L](int dlt) {
        dlt %= L;
        if (dlt > L / 2) dlt -= L;
        if (dlt <= -(L + 1) / 2) dlt += L;
        return dlt;
      };
      std::vector<double> factor(static_cast<std::size_t>(2 * L + 1));
      for (int dlt = -L; dlt <= L; ++dlt)
        factor[static_cast<std::size_t>(dlt + L)] = wrap(dlt);
      for (std::int64_t c = 0; c < nd; ++c) {
        const int xc = xi[static_cast<std::size_t>(c)];
        for (std::int64_t r = 0; r < nd; ++r)
          out(r, c) =
              iu * factor[static_cast<std::size_t>(xi[static_cast<std::size_t>(r)] - xc + L)] *
              f(r, c);
      }
      break;
    }
  }
  return out;
}

cxd trace_per_volume(const Matrix& f, const FiniteVolume& vol,
                     const std::vector<std::int64_t>& core_sites) {
  if (core_sites.empty()) throw ConfigError("empty core region");
  if (f.rows() != vol.dofs() || f.cols() != vol.dofs())
    throw DimensionError("operator size does not match the volume");
  cxd acc = 0.0;
  for (std::int64_t s : core_sites) {
    if (s < 0 || s >= vol.sites())
      throw GeometryError("core site outside the volume");
    for (int q = 0; q < vol.Q; ++q) {
      const std::int64_t k = vol.dof(s, q);
      acc += f(k, k);
    }
  }
  return acc / double(core_sites.size());
}

double ls_norm(const Matrix& f, double s, const FiniteVolume& vol,
               const std::vector<std::int64_t>& core_sites) {
  if (s < 1.0) throw ConfigError("L^s norm needs s >= 1");
  if (core_sites.empty()) throw ConfigError("empty core region");
  const RVector diag = linalg::abs_pow_diag(f, s);
  double acc = 0.0;
  for (std::int64_t site : core_sites) {
    if (site < 0 || site >= vol.sites())
      throw GeometryError("core site outside the volume");
    for (int q = 0; q < vol.Q; ++q) acc += diag[vol.dof(site, q)];
  }
  acc /= double(core_sites.size());
  return std::pow(std::max(acc, 0.0), 1.0 / s);
}

double sobolev_norm(const Matrix& f, int n, const FiniteVolume& vol,
                    const std::vector<std::int64_t>& core_sites,
                    const DerivationScheme& scheme) {
  if (vol.d != 2 * n)
    throw DimensionError("Sobolev norm needs vol.d = 2n");
  const double s = 2.0 * n;
  double acc = ls_norm(f, s, vol, core_sites);
  for (int i = 1; i <= vol.d; ++i)
    acc += ls_norm(derivation(f, i, vol, scheme), s, vol, core_sites);
  return acc;
}

}  // namespace ncchern

#include "ncchern/volume.hpp"

namespace ncchern {

std::int64_t FiniteVolume::sites() const {
  std::int64_t s = 1;
  for (int k = 0; k < d; ++k) s *= L;
  return s;
}

std::int64_t FiniteVolume::site_of(const IVec& x) const {
  std::int64_t s = 0;
  for (int k = d - 1; k >= 0; --k) s = s * L + x[k];
  return s;
}

IVec FiniteVolume::coords_of(std::int64_t site) const {
  IVec x(d);
  for (int k = 0; k < d; ++k) {
    x[k] = static_cast<int>(site % L);
    site /= L;
  }
  return x;
}

IVec FiniteVolume::origin() const { return IVec(d, L / 2); }

IVec FiniteVolume::position(std::int64_t site) const {
  IVec x = coords_of(site);
  for (int k = 0; k < d; ++k) x[k] -= L / 2;
  return x;
}

std::int64_t FiniteVolume::neighbor(std::int64_t site, const IVec& u) const {
  IVec x = coords_of(site);
  for (int k = 0; k < d; ++k) {
    x[k] += u[k];
    if (boundary == Boundary::Periodic) {
      x[k] %= L;
      if (x[k] < 0) x[k] += L;
    } else if (x[k] < 0 || x[k] >= L) {
      return -1;
    }
  }
  return site_of(x);
}

std::int64_t FiniteVolume::site_at_position(const IVec& p) const {
  IVec x(d);
  for (int k = 0; k < d; ++k) {
    x[k] = p[k] + L / 2;
    if (boundary == Boundary::Periodic) {
      x[k] %= L;
      if (x[k] < 0) x[k] += L;
    } else if (x[k] < 0 || x[k] >= L) {
      return -1;
    }
  }
  return site_of(x);
}

IVec FiniteVolume::min_image(const IVec& x, const IVec& y) const {
  IVec u(d);
  for (int k = 0; k < d; ++k) {
    int delta = x[k] - y[k];
    if (boundary == Boundary::Periodic) {
      delta %= L;
      if (delta < 0) delta += L;
      if (2 * delta > L) delta -= L;  // representative in (-L/2, L/2]
    }
    u[k] = delta;
  }
  return u;
}

void FiniteVolume::check_dim(std::int64_t dim, const char* what) const {
  if (dim > dim_cap)
    throw ResourceError(std::string(what) + ": dimension " +
                        std::to_string(dim) + " exceeds cap " +
                        std::to_string(dim_cap) + " (approx " +
                        std::to_string(dim * dim * 16 / (1 << 20)) +
                        " MiB dense); raise dim_cap to proceed");
}

FiniteVolume make_volume(int d, int L, int Q, Boundary b) {
  if (d < 2 || d % 2 != 0)
    throw DimensionError("volume dimension must be even and >= 2");
  if (L < 1 || Q < 1) throw DimensionError("volume needs L >= 1, Q >= 1");
  FiniteVolume v;
  v.d = d;
  v.L = L;
  v.Q = Q;
  v.boundary = b;
  return v;
}

std::vector<std::int64_t> central_core(const FiniteVolume& v, double fraction) {
  int side = static_cast<int>(std::lround(v.L * fraction));
  side = std::max(1, std::min(side, v.L));
  const int start = (v.L - side) / 2;
  std::vector<std::int64_t> sites;
  IVec x(v.d, start);
  while (true) {
    sites.push_back(v.site_of(x));
    int k = 0;
    for (; k < v.d; ++k) {
      if (++x[k] < start + side) break;
      x[k] = start;
    }
    if (k == v.d) break;
  }
  std::sort(sites.begin(), sites.end());
  return sites;
}

std::vector<std::int64_t> core_dofs(const FiniteVolume& v,
                                    const std::vector<std::int64_t>& sites) {
  std::vector<std::int64_t> out;
  out.reserve(sites.size() * v.Q);
  for (std::int64_t s : sites)
    for (int a = 0; a < v.Q; ++a) out.push_back(v.dof(s, a));
  return out;
}

}  // namespace ncchern

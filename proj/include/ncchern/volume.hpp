// Finite sample geometry: a hypercubic box of L^d sites with Q orbitals,
// open or periodic, origin at the box center.
#pragma once

#include "ncchern/common.hpp"

#include <cstdint>

namespace ncchern {

enum class Boundary { Open, Periodic };

struct FiniteVolume {
  int d = 0;
  int L = 0;
  int Q = 1;
  Boundary boundary = Boundary::Open;
  std::int64_t dim_cap = 20000;  // refuse matrices above this dimension

  std::int64_t sites() const;
  std::int64_t dofs() const { return sites() * Q; }

  // Lexicographic site linearization, coordinate 0 fastest.
  std::int64_t site_of(const IVec& x) const;
  IVec coords_of(std::int64_t site) const;

  // Integer position relative to the center floor(L/2) in each direction.
  IVec position(std::int64_t site) const;
  IVec origin() const;

  std::int64_t dof(std::int64_t site, int orbital) const {
    return site * Q + orbital;
  }
  std::int64_t site_of_dof(std::int64_t dof) const { return dof / Q; }
  int orbital_of_dof(std::int64_t dof) const { return static_cast<int>(dof % Q); }

  // Site displaced by u; -1 when it leaves an open volume.
  std::int64_t neighbor(std::int64_t site, const IVec& u) const;

  // Site whose position is p (periodic wrap applies); -1 if outside open box.
  std::int64_t site_at_position(const IVec& p) const;

  // Minimal-image integer displacement between positions (x minus y).
  IVec min_image(const IVec& x, const IVec& y) const;

  void check_dim(std::int64_t dim, const char* what) const;
};

FiniteVolume make_volume(int d, int L, int Q, Boundary b);

// Sites of the centered sub-box with side round(L*fraction), minimum 1.
std::vector<std::int64_t> central_core(const FiniteVolume& v,
                                       double fraction = 0.5);

std::vector<std::int64_t> core_dofs(const FiniteVolume& v,
                                    const std::vector<std::int64_t>& sites);

}  // namespace ncchern

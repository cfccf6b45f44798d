// Finite-volume surrogate of the non-commutative calculus on the disordered
// torus: position derivations, trace per unit volume over a core region, and
// the L^s / Sobolev norms built from them.
#pragma once

#include "ncchern/common.hpp"
#include "ncchern/volume.hpp"

#include <cstdint>

namespace ncchern {

enum class DerivationKind {
  OpenCommutator,   // i[X_i, f], open boundary
  PeriodicPhase,    // first-order phase conjugation, periodic boundary
  PeriodicMinImage  // i * wrap(x_i - y_i) * f_xy, periodic boundary
};

struct DerivationScheme {
  DerivationKind kind = DerivationKind::OpenCommutator;
  int L = 0;  // periodic kinds only

  static DerivationScheme open_commutator();
  static DerivationScheme periodic_phase(int L);
  static DerivationScheme periodic_min_image(int L);
};

DerivationScheme parse_scheme(const std::string& name, int L);
std::string scheme_name(const DerivationScheme& s);

// Default scheme for the volume's boundary.
DerivationScheme scheme_for(const FiniteVolume& vol);

// dF/dx_i of an operator kernel; direction is 1-based.
//
// OpenCommutator:   (df)_xy = i (x_i - y_i) f_xy, positions origin-centered.
// PeriodicPhase:    (L/2pi) (e^{+2pi i X_i/L} f e^{-2pi i X_i/L} - f), which
//                   is entrywise (L/2pi)(e^{2pi i (x_i-y_i)/L} - 1} f_xy and
//                   tends to i[X_i, f] for kernels concentrated near the
//                   diagonal.
// PeriodicMinImage: i * wrap(x_i - y_i) * f_xy with the minimal-image
//                   displacement; exact on finite-range kernels.
Matrix derivation(const Matrix& f, int direction, const FiniteVolume& vol,
                  const DerivationScheme& scheme);

// (1/|core|) sum_{x in core} sum_alpha <x,alpha| f |x,alpha>.
cxd trace_per_volume(const Matrix& f, const FiniteVolume& vol,
                     const std::vector<std::int64_t>& core_sites);

// T(|f|^s)^{1/s} with |f| = (f f^dagger)^{1/2}.
double ls_norm(const Matrix& f, double s, const FiniteVolume& vol,
               const std::vector<std::int64_t>& core_sites);

// T(|f|^{2n})^{1/2n} + sum_{i=1}^{2n} T(|df/dx_i|^{2n})^{1/2n}.
double sobolev_norm(const Matrix& f, int n, const FiniteVolume& vol,
                    const std::vector<std::int64_t>& core_sites,
                    const DerivationScheme& scheme);

}  // namespace ncchern

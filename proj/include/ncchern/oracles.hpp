// Standalone numerical checks of the analytic identities the main formulas
// rest on: the graded-trace integral identity, the simplex-volume determinant
// form, and the log-scaling density formula for weighted diagonal operators.
#pragma once

#include "ncchern/clifford.hpp"
#include "ncchern/common.hpp"

#include <cstdint>
#include <functional>

namespace ncchern {

struct Simplex {
  std::vector<RVector> vertices;  // d+1 vertices in R^d
};

// Signed volume det(v_1-v_0, ..., v_d-v_0)/d!.
double simplex_volume(const Simplex& s);

struct QuadratureResult {
  cxd value;
  double error_estimate = 0.0;
  std::int64_t evaluations = 0;
};

struct Lemma3Options {
  double inner_radius = 0.0;      // 0 -> per-n default
  double max_outer_radius = 0.0;  // 0 -> per-n default
  double inner_tolerance = 0.0;   // absolute; 0 -> per-n default
  double tail_target = 0.0;       // absolute; 0 -> per-n default
  int max_depth = 0;              // adaptive split depth; 0 -> per-n default
};

// RHS of the integral identity: -(2 pi)^n / (i^n n!) det(x_1,...,x_2n),
// rows x_i, times the calibrated orientation of the representation.
cxd lemma3_rhs(const CliffordRep& rep, const std::vector<RVector>& points);

// LHS: integral over R^{2n} of tr{gamma_0 prod_i (unit(x_i+x) -
// unit(x_{i+1}+x)).gamma} with x_{2n+1} = 0. Adaptive cartesian quadrature
// near the kinks plus dyadic box frames for the |x|^{-(2n+1)} tail. Throws
// a precision error when the tail cannot be brought under the target within
// max_outer_radius.
QuadratureResult lemma3_lhs(const CliffordRep& rep,
                            const std::vector<RVector>& points,
                            const Lemma3Options& opt = {});

struct DixmierEstimate {
  std::vector<std::int64_t> checkpoints;  // partial-sum lengths N
  std::vector<double> ratios;             // S_N / log N
  double limit = 0.0;                     // 1/log N extrapolation
};

// Partial sums of the descending rearrangement of f(x) phi(x/|x|) / |x|^{2n}
// over lattice points 0 < |x| <= R_max, divided by log of the count. The
// disorder dependence of f enters through the closure (f receives the
// lattice translation x).
DixmierEstimate dixmier_estimate(const std::function<double(const IVec&)>& f,
                                 const std::function<double(const RVector&)>& phi,
                                 int n, int R_max);

}  // namespace ncchern

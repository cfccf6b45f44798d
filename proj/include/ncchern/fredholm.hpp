// Dirac phase operator on the spinor-augmented volume and the truncated
// supertrace that estimates the Fredholm index of the projector-compressed
// phase.
#pragma once

#include "ncchern/clifford.hpp"
#include "ncchern/common.hpp"
#include "ncchern/model.hpp"
#include "ncchern/volume.hpp"

#include <cstdint>

namespace ncchern {

// Value of the phase block at the one site where the position sum vanishes.
enum class DiracInsertion {
  SymmetricSum,   // (1/sqrt(2n)) sum_i gamma_i
  FirstGenerator  // gamma_1
};

struct DiracPhase {
  CliffordRep rep;
  RVector x0;  // offset in [0,1]^{2n}
  DiracInsertion insertion = DiracInsertion::SymmetricSum;
  Matrix Dhat;  // Hermitian unitary, block diagonal over sites
};

// Site block (x + x0)/|x + x0| . gamma, with the insertion at x + x0 = 0.
// Augmented index convention: (dof, spinor) -> dof * 2^n + spinor.
DiracPhase dirac_phase(const FiniteVolume& vol, const CliffordRep& rep,
                       const RVector& x0,
                       DiracInsertion insertion = DiracInsertion::SymmetricSum);

struct IndexEstimate {
  std::vector<double> radii;
  std::vector<double> values;  // truncated supertrace per radius
  double extrapolated = 0.0;   // c from a c + a/R fit on the last points
  int nearest_integer = 0;
  double distance = 0.0;  // |extrapolated - nearest_integer|
  bool converged = true;
  double imag_part = 0.0;
};

// (1/2) Tr_R{ Gamma [Dhat, P (x) 1]^{2n+1} Dhat } over increasing radii R,
// with Gamma = 1 (x) gamma_0 and the trace restricted to sites |x + x0| <= R.
IndexEstimate index_estimate(const FermiProjector& P, const FiniteVolume& vol,
                             const CliffordRep& rep, const RVector& x0,
                             const std::vector<double>& radii,
                             DiracInsertion insertion =
                                 DiracInsertion::SymmetricSum);

// Schatten q-norm of [Dhat, P (x) 1] on the finite volume.
double commutator_schatten(const FermiProjector& P, const FiniteVolume& vol,
                           const CliffordRep& rep, const RVector& x0, double q);

}  // namespace ncchern

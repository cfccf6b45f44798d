// Localization diagnostics: the derivation-norm localization length, the
// fractional-moment decay fit of disorder-averaged resolvents, and the
// Sobolev-norm continuity of the Fermi projector under small deformations.
#pragma once

#include "ncchern/common.hpp"
#include "ncchern/model.hpp"
#include "ncchern/nctorus.hpp"
#include "ncchern/volume.hpp"

#include <cstdint>

namespace ncchern {

// Lambda_n = sum_{i=1}^{2n} T(|dP/dx_i|^{2n})^{1/2n}; units of lattice
// spacing.
double localization_length(const FermiProjector& P, const FiniteVolume& vol,
                           int n, const DerivationScheme& scheme,
                           const std::vector<std::int64_t>& core_sites);

struct FracMomentFit {
  double s = 0.5;
  double beta = 0.0;      // decay rate; +infinity when moments vanish exactly
  double C_s = 0.0;       // prefactor
  double residual = 0.0;  // rms misfit of log(moment) vs distance
  double decay_tstat = 0.0;  // fitted slope over its standard error
  std::vector<int> distances;
  std::vector<double> moments;  // seed/direction-averaged, per distance
  bool delocalized = false;  // no decay resolvable above the fit scatter
  bool exact_zero = false;   // all moments vanish to machine precision
};

// Averages |resolvent block(0 -> r e_i)|^s at fermi_energy + i delta over
// seeds and the 2d axis directions, then fits log(moment) = log(C_s) -
// s beta r by least squares. A non-decaying fit is a valid, flagged result.
FracMomentFit fractional_moment_fit(const HoppingModel& model,
                                    const FiniteVolume& vol,
                                    const MagneticField& B, double lambda,
                                    double fermi_energy, double s, double delta,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::vector<int>& distances,
                                    int workers = 1);

struct SobolevRow {
  double delta_h = 0.0;
  double norm = 0.0;   // seed-averaged ||p' - p||_W
  bool crossing = false;  // Fermi-level crossing voided this row
};

struct SobolevTable {
  std::vector<SobolevRow> rows;
  double loglog_slope = 0.0;  // over clean positive rows
};

// Deforms every hopping by a fixed-direction bounded pattern of sup-norm
// delta_h on top of the lambda-disordered Hamiltonian, recomputes the Fermi
// projector, and reports the Sobolev norm of the difference.
SobolevTable sobolev_continuity(const HoppingModel& model,
                                const FiniteVolume& vol,
                                const MagneticField& B, double lambda,
                                double fermi_energy,
                                const std::vector<double>& deltas, int n,
                                const std::vector<std::uint64_t>& seeds,
                                const DerivationScheme& scheme,
                                double core_fraction = 0.5,
                                std::uint64_t direction_seed = 777,
                                int workers = 1);

// Fermi projector through numerical contour quadrature of (i/2pi)
// closed-integral (H - xi)^{-1} d xi around the occupied spectrum;
// cross-check for the eigendecomposition path on small instances.
Matrix contour_projector(const Matrix& H, double fermi_energy, int nodes);

}  // namespace ncchern

// The topological invariant, measured three independent ways: momentum-space
// curvature sums for clean models, the real-space derivation/trace formula
// for disordered ones, and seed-ensemble averaging on top.
#pragma once

#include "ncchern/common.hpp"
#include "ncchern/model.hpp"
#include "ncchern/nctorus.hpp"
#include "ncchern/volume.hpp"

#include <cstdint>

namespace ncchern {

struct ChernEstimate {
  double value = 0.0;
  int n = 0;
  std::string method;  // "kspace" | "realspace"
  int grid = 0;        // kspace points per axis
  int L = 0;           // realspace volume side
  int realizations = 1;
  double std_error = 0.0;
  double imag_part = 0.0;         // magnitude of the discarded imaginary part
  double core_sensitivity = 0.0;  // inner-core vs full-core drift
  bool degenerate_warning = false;
  std::vector<double> per_seed;
};

enum class KspaceMethod {
  Auto,         // plaquette for n=1, analytic-derivative curvature for n>=2
  Plaquette,    // gauge-invariant link-variable field strength (n=1 only)
  CentralDiff,  // finite-difference projector curvature
  Analytic      // exact projector derivative via first-order perturbation
};

// Brillouin-zone sum over an N^{2n} grid for a clean model at the given
// Fermi energy. Throws a gap error when a sampled point comes within 1e-8
// of the Fermi level.
ChernEstimate kspace_chern(const HoppingModel& model, double fermi_energy,
                           int n, int N,
                           KspaceMethod method = KspaceMethod::Auto);

// Real-space formula: (2 pi i)^n/n! sum_{perm} (-1)^perm T(P dP...dP) with
// the trace averaged over the core sites.
ChernEstimate realspace_chern(const FermiProjector& P, const FiniteVolume& vol,
                              int n, const DerivationScheme& scheme,
                              const std::vector<std::int64_t>& core_sites);

// One realspace estimate per seed; mean, standard error, and the per-seed
// values are reported.
ChernEstimate disorder_averaged_chern(const HoppingModel& model,
                                      const FiniteVolume& vol,
                                      const MagneticField& B, double lambda,
                                      double fermi_energy, int n,
                                      const std::vector<std::uint64_t>& seeds,
                                      const DerivationScheme& scheme,
                                      double core_fraction = 0.5,
                                      int workers = 1);

struct PhasePoint {
  double m = 0.0;
  double lambda = 0.0;
};

struct PhaseRow {
  double m = 0.0;
  double lambda = 0.0;
  bool ok = false;
  std::string error;  // failure note when !ok
  ChernEstimate est;
};

struct EnsembleSettings {
  FiniteVolume vol;
  MagneticField B;
  double fermi_energy = 0.0;
  int n = 1;
  std::vector<std::uint64_t> seeds;
  DerivationScheme scheme;
  double core_fraction = 0.5;
  int workers = 1;
  std::string mass_param = "m";  // model parameter swept by PhasePoint.m
};

// Independent disorder-averaged estimates over a (mass, disorder) grid;
// row order matches the input grid, failures are recorded per row.
std::vector<PhaseRow> phase_diagram(const std::string& model_name,
                                    const std::vector<PhasePoint>& grid,
                                    const EnsembleSettings& settings);

}  // namespace ncchern

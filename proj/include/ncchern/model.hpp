// Tight-binding models: clean finite-range hoppings, uniform magnetic field
// entering through Peierls phases, and seeded random bond disorder.
#pragma once

#include "ncchern/common.hpp"
#include "ncchern/volume.hpp"

#include <cstdint>
#include <map>
#include <unordered_map>

namespace ncchern {

struct HoppingModel {
  int d = 0;
  int Q = 1;
  int range = 1;  // t_u = 0 whenever |u| >= range
  std::string name;
  std::map<IVec, Matrix> hoppings;  // displacement u -> Q x Q block t_u

  void validate() const;  // Hermitian pairing t_{-u} = t_u^dagger, range
};

// name in {chern2d, dirac4d, hofstadter2d, atomic}; see README for params.
HoppingModel model_zoo(const std::string& name,
                       const std::map<std::string, double>& params = {});

// Bloch matrix H(k) = sum_u t_u e^{-i k.u}.
Matrix bloch_matrix(const HoppingModel& m, const RVector& k);

struct MagneticField {
  Eigen::MatrixXd B;  // antisymmetric d x d

  static MagneticField zero(int d);
  // entries: upper triangle of B row-major, (0,1), (0,2), ..., (d-2,d-1)
  static MagneticField from_upper(int d, const std::vector<double>& entries);
  void validate() const;
  bool is_zero() const { return B.size() == 0 || B.isZero(0.0); }
  // every B_ij * L must be an integer for a consistent periodic wrap
  void require_admissible(int L) const;
};

struct DisorderRealization {
  std::uint64_t seed = 0;
  double lambda = 0.0;
  // canonical bond key (dofA <= dofB) packed as dofA * ndofs + dofB
  std::unordered_map<std::uint64_t, double> omega;
  std::int64_t ndofs = 0;

  double value(std::int64_t dofA, std::int64_t dofB) const;
  static DisorderRealization none() { return {}; }
  bool empty() const { return omega.empty() && lambda == 0.0; }
};

// One uniform [-1/2,1/2) variate per unordered bond-orbital pair on the
// model's displacement support; the mirrored entry is the same variate.
// Stream: splitmix64 chain over (seed, dofA, dofB).
DisorderRealization sample_disorder(const FiniteVolume& vol,
                                    const HoppingModel& model, double lambda,
                                    std::uint64_t seed);

// omega'_{x,y} = omega_{x-a,y-a} with periodic relabeling.
DisorderRealization translate_disorder(const DisorderRealization& dis,
                                       const FiniteVolume& vol, const IVec& a);

// H entries <x,a|H|y,b> = e^{i pi (x, B y)} (t_{x-y}^{ab} + lambda w_{x,y}^{ab}),
// positions relative to the volume center.
Matrix build_hamiltonian(const HoppingModel& model, const FiniteVolume& vol,
                         const MagneticField& B,
                         const DisorderRealization& dis);

// U_a |x,alpha> = e^{-i pi (a, B x)} |x+a,alpha> on the torus.
Matrix magnetic_translation(const FiniteVolume& vol, const MagneticField& B,
                            const IVec& a);

struct FermiProjector {
  Matrix P;
  double fermi_energy = 0.0;
  int occupied_count = 0;
  double min_gap = 0.0;  // distance of closest eigenvalue to fermi_energy
  bool degenerate = false;
  RVector eigenvalues;
};

FermiProjector fermi_projector(const Matrix& H, double fermi_energy);

// Factorized resolvent (H - xi)^{-1}; block extraction by linear solves.
class ResolventSolver {
 public:
  ResolventSolver(const Matrix& H, cxd xi);
  // columns of the resolvent for all orbitals of site y (dim x Q)
  Matrix site_columns(const FiniteVolume& vol, std::int64_t ysite) const;
  // Q x Q block (x,y) sliced from site_columns output
  static Matrix block(const FiniteVolume& vol, std::int64_t xsite,
                      const Matrix& ycols);

 private:
  Eigen::PartialPivLU<Matrix> lu_;
};

Matrix resolvent_block(const Matrix& H, cxd xi, const FiniteVolume& vol,
                       std::int64_t xsite, std::int64_t ysite);

}  // namespace ncchern

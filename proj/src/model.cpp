#include "ncchern/model.hpp"

#include <cmath>

#include "ncchern/clifford.hpp"
#include "ncchern/linalg.hpp"
#include "ncchern/rng.hpp"

namespace ncchern {

namespace {

double norm2(const IVec& u) {
  double s = 0;
  for (int c : u) s += double(c) * c;
  return std::sqrt(s);
}

double dot_B(const IVec& x, const Eigen::MatrixXd& B, const IVec& y) {
  double s = 0;
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j) s += x[i] * B(i, j) * y[j];
  return s;
}

double get_param(const std::map<std::string, double>& p, const std::string& k,
                 double fallback) {
  auto it = p.find(k);
  return it == p.end() ? fallback : it->second;
}

void require_params(const std::map<std::string, double>& p,
                    std::initializer_list<const char*> known,
                    const std::string& model) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* kn : known) ok = ok || (k == kn);
    if (!ok)
      throw ConfigError("model '" + model + "' has no parameter '" + k + "'");
  }
}

}  // namespace

void HoppingModel::validate() const {
  for (const auto& [u, t] : hoppings) {
    if (static_cast<int>(u.size()) != d || t.rows() != Q || t.cols() != Q)
      throw DimensionError("hopping block shape mismatch for model " + name);
    if (norm2(u) >= range)
      throw GeometryError("stored hopping outside declared range in " + name);
    IVec mu(u);
    for (int& c : mu) c = -c;
    auto it = hoppings.find(mu);
    if (it == hoppings.end() || !(it->second - t.adjoint()).isZero(1e-14))
      throw GeometryError("hopping map is not Hermitian-paired in " + name);
  }
}

Matrix bloch_matrix(const HoppingModel& m, const RVector& k) {
  Matrix H = Matrix::Zero(m.Q, m.Q);
  for (const auto& [u, t] : m.hoppings) {
    double ku = 0;
    for (int i = 0; i < m.d; ++i) ku += k[i] * u[i];
    H += std::exp(cxd(0, -ku)) * t;
  }
  return H;
}

HoppingModel model_zoo(const std::string& name,
                       const std::map<std::string, double>& params) {
  HoppingModel m;
  m.name = name;
  auto pauli = [](int k) {
    Matrix s(2, 2);
    if (k == 1)
      s << 0, 1, 1, 0;
    else if (k == 2)
      s << 0, cxd(0, -1), cxd(0, 1), 0;
    else
      s << 1, 0, 0, -1;
    return s;
  };

  if (name == "chern2d") {
    require_params(params, {"m"}, name);
    const double mass = get_param(params, "m", 1.0);
    m.d = 2;
    m.Q = 2;
    m.range = 2;
    const Matrix tau[2] = {pauli(1), pauli(2)};
    m.hoppings[IVec{0, 0}] = mass * pauli(3);
    for (int dir = 0; dir < 2; ++dir) {
      IVec u(2, 0);
      u[dir] = 1;
      Matrix t = cxd(0, 0.5) * tau[dir] + 0.5 * pauli(3);
      m.hoppings[u] = t;
      u[dir] = -1;
      m.hoppings[u] = t.adjoint();
    }
  } else if (name == "dirac4d") {
    require_params(params, {"m"}, name);
    const double mass = get_param(params, "m", -3.0);
    m.d = 4;
    m.Q = 4;
    m.range = 2;
    const CliffordRep rep = build_clifford(2);
    m.hoppings[IVec{0, 0, 0, 0}] = mass * rep.gamma0;
    for (int dir = 0; dir < 4; ++dir) {
      IVec u(4, 0);
      u[dir] = 1;
      Matrix t = cxd(0, 0.5) * rep.gamma[dir] + 0.5 * rep.gamma0;
      m.hoppings[u] = t;
      u[dir] = -1;
      m.hoppings[u] = t.adjoint();
    }
  } else if (name == "hofstadter2d") {
    require_params(params, {"t"}, name);
    const double t0 = get_param(params, "t", 1.0);
    m.d = 2;
    m.Q = 1;
    m.range = 2;
    for (int dir = 0; dir < 2; ++dir) {
      IVec u(2, 0);
      u[dir] = 1;
      m.hoppings[u] = Matrix::Constant(1, 1, -t0);
      u[dir] = -1;
      m.hoppings[u] = Matrix::Constant(1, 1, -t0);
    }
  } else if (name == "atomic") {
    require_params(params, {"onsite", "split", "orbitals", "d"}, name);
    const double e0 = get_param(params, "onsite", 0.0);
    const double split = get_param(params, "split", 1.0);
    const int q = static_cast<int>(get_param(params, "orbitals", 2.0));
    const int dd = static_cast<int>(get_param(params, "d", 2.0));
    if (q < 1 || dd < 1) throw ConfigError("atomic: orbitals and d must be >= 1");
    m.d = dd;
    m.Q = q;
    m.range = 1;
    // staggered on-site energies: gapped at e0 for even orbital count
    Matrix t0 = e0 * Matrix::Identity(q, q);
    for (int a = 0; a < q; ++a) t0(a, a) += (a % 2 == 0 ? -split : split);
    m.hoppings[IVec(dd, 0)] = t0;
  } else {
    throw LookupError("unknown model '" + name + "'");
  }
  m.validate();
  return m;
}

MagneticField MagneticField::zero(int d) {
  MagneticField f;
  f.B = Eigen::MatrixXd::Zero(d, d);
  return f;
}

MagneticField MagneticField::from_upper(int d,
                                        const std::vector<double>& entries) {
  const std::size_t need = static_cast<std::size_t>(d) * (d - 1) / 2;
  if (entries.size() != need)
    throw DimensionError("field needs d(d-1)/2 upper-triangle entries");
  MagneticField f;
  f.B = Eigen::MatrixXd::Zero(d, d);
  std::size_t k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      f.B(i, j) = entries[k];
      f.B(j, i) = -entries[k];
      ++k;
    }
  return f;
}

void MagneticField::validate() const {
  if (!(B + B.transpose()).isZero(0.0))
    throw DimensionError("field matrix must be exactly antisymmetric");
}

void MagneticField::require_admissible(int L) const {
  for (int i = 0; i < B.rows(); ++i)
    for (int j = i + 1; j < B.cols(); ++j) {
      const double v = B(i, j) * L;
      if (std::abs(v - std::round(v)) > 1e-12)
        throw FluxError("B(" + std::to_string(i) + "," + std::to_string(j) +
                        ")*L = " + std::to_string(v) +
                        " is not an integer; flux incommensurate with the torus");
    }
}

double DisorderRealization::value(std::int64_t dofA, std::int64_t dofB) const {
  if (omega.empty()) return 0.0;
  const std::uint64_t a = static_cast<std::uint64_t>(std::min(dofA, dofB));
  const std::uint64_t b = static_cast<std::uint64_t>(std::max(dofA, dofB));
  auto it = omega.find(a * static_cast<std::uint64_t>(ndofs) + b);
  if (it == omega.end())
    throw LookupError("disorder bond (" + std::to_string(dofA) + "," +
                      std::to_string(dofB) + ") was never sampled");
  return it->second;
}

DisorderRealization sample_disorder(const FiniteVolume& vol,
                                    const HoppingModel& model, double lambda,
                                    std::uint64_t seed) {
  if (model.d != vol.d || model.Q != vol.Q)
    throw DimensionError("sample_disorder: model/volume mismatch");
  if (lambda < 0) throw ConfigError("disorder strength must be nonnegative");
  DisorderRealization dis;
  dis.seed = seed;
  dis.lambda = lambda;
  dis.ndofs = vol.dofs();
  const std::int64_t ns = vol.sites();
  for (std::int64_t y = 0; y < ns; ++y) {
    for (const auto& [u, t] : model.hoppings) {
      (void)t;
      const std::int64_t x = vol.neighbor(y, u);
      if (x < 0) continue;
      for (int a = 0; a < vol.Q; ++a)
        for (int b = 0; b < vol.Q; ++b) {
          const std::int64_t da = vol.dof(x, a), db = vol.dof(y, b);
          if (da > db) continue;  // mirrored entry covered by the reverse bond
          const std::uint64_t key =
              static_cast<std::uint64_t>(da) *
                  static_cast<std::uint64_t>(dis.ndofs) +
              static_cast<std::uint64_t>(db);
          dis.omega[key] = rng::to_symmetric_unit(
              rng::keyed(seed, {static_cast<std::uint64_t>(da),
                                static_cast<std::uint64_t>(db)}));
        }
    }
  }
  return dis;
}

DisorderRealization translate_disorder(const DisorderRealization& dis,
                                       const FiniteVolume& vol, const IVec& a) {
  if (vol.boundary != Boundary::Periodic)
    throw GeometryError("disorder translation requires a periodic volume");
  DisorderRealization out;
  out.seed = dis.seed;
  out.lambda = dis.lambda;
  out.ndofs = dis.ndofs;
  const auto nd = static_cast<std::uint64_t>(dis.ndofs);
  for (const auto& [key, w] : dis.omega) {
    const std::int64_t dA = static_cast<std::int64_t>(key / nd);
    const std::int64_t dB = static_cast<std::int64_t>(key % nd);
    const std::int64_t sA = vol.neighbor(vol.site_of_dof(dA), a);
    const std::int64_t sB = vol.neighbor(vol.site_of_dof(dB), a);
    std::int64_t nA = vol.dof(sA, vol.orbital_of_dof(dA));
    std::int64_t nB = vol.dof(sB, vol.orbital_of_dof(dB));
    if (nA > nB) std::swap(nA, nB);
    out.omega[static_cast<std::uint64_t>(nA) * nd +
              static_cast<std::uint64_t>(nB)] = w;
  }
  return out;
}

Matrix build_hamiltonian(const HoppingModel& model, const FiniteVolume& vol,
                         const MagneticField& B,
                         const DisorderRealization& dis) {
  if (model.d != vol.d || model.Q != vol.Q)
    throw DimensionError("build_hamiltonian: model/volume mismatch");
  B.validate();
  if (vol.boundary == Boundary::Periodic) {
    // longest hop is range-1; a hop of L/2 meets its own wrap image
    if (2 * (model.range - 1) >= vol.L)
      throw GeometryError("hop length " + std::to_string(model.range - 1) +
                          " >= L/2 makes the periodic wrap ambiguous");
    if (!B.is_zero()) B.require_admissible(vol.L);
  }
  const std::int64_t nd = vol.dofs();
  vol.check_dim(nd, "build_hamiltonian");
  Matrix H = Matrix::Zero(nd, nd);
  const std::int64_t ns = vol.sites();
  const bool with_disorder = !dis.omega.empty() && dis.lambda != 0.0;
  for (std::int64_t y = 0; y < ns; ++y) {
    const IVec py = vol.position(y);
    for (const auto& [u, t] : model.hoppings) {
      const std::int64_t x = vol.neighbor(y, u);
      if (x < 0) continue;
      const IVec px = vol.position(x);
      const cxd phase = std::exp(cxd(0, kPi * dot_B(px, B.B, py)));
      Matrix block = t;
      if (with_disorder) {
        for (int a = 0; a < vol.Q; ++a)
          for (int b = 0; b < vol.Q; ++b)
            block(a, b) += dis.lambda * dis.value(vol.dof(x, a), vol.dof(y, b));
      }
      H.block(x * vol.Q, y * vol.Q, vol.Q, vol.Q) = phase * block;
    }
  }
  return H;
}

Matrix magnetic_translation(const FiniteVolume& vol, const MagneticField& B,
                            const IVec& a) {
  if (vol.boundary != Boundary::Periodic)
    throw GeometryError("magnetic translation requires a periodic volume");
  B.validate();
  B.require_admissible(vol.L);
  const std::int64_t nd = vol.dofs();
  vol.check_dim(nd, "magnetic_translation");
  Matrix U = Matrix::Zero(nd, nd);
  const std::int64_t ns = vol.sites();
  for (std::int64_t y = 0; y < ns; ++y) {
    const std::int64_t x = vol.neighbor(y, a);
    const cxd phase = std::exp(cxd(0, -kPi * dot_B(a, B.B, vol.position(y))));
    for (int q = 0; q < vol.Q; ++q) U(vol.dof(x, q), vol.dof(y, q)) = phase;
  }
  return U;
}

FermiProjector fermi_projector(const Matrix& H, double fermi_energy) {
  FermiProjector out;
  out.fermi_energy = fermi_energy;
  Matrix V = H;
  out.eigenvalues = linalg::hermitian_eig_inplace(V);
  const auto n = out.eigenvalues.size();
  int occ = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.eigenvalues[i] <= fermi_energy) ++occ;
    min_gap = std::min(min_gap, std::abs(out.eigenvalues[i] - fermi_energy));
  }
  out.occupied_count = occ;
  out.min_gap = min_gap;
  out.degenerate = (min_gap < 1e-12);
  out.P = linalg::herk(V.leftCols(occ));
  return out;
}

ResolventSolver::ResolventSolver(const Matrix& H, cxd xi)
    : lu_((H - xi * Matrix::Identity(H.rows(), H.cols())).eval()) {
  if (xi.imag() == 0.0)
    throw PrecisionError("resolvent requires Im(xi) != 0");
}

Matrix ResolventSolver::site_columns(const FiniteVolume& vol,
                                     std::int64_t ysite) const {
  Matrix rhs = Matrix::Zero(lu_.rows(), vol.Q);
  for (int b = 0; b < vol.Q; ++b) rhs(vol.dof(ysite, b), b) = 1.0;
  return lu_.solve(rhs);
}

Matrix ResolventSolver::block(const FiniteVolume& vol, std::int64_t xsite,
                              const Matrix& ycols) {
  return ycols.middleRows(xsite * vol.Q, vol.Q);
}

Matrix resolvent_block(const Matrix& H, cxd xi, const FiniteVolume& vol,
                       std::int64_t xsite, std::int64_t ysite) {
  ResolventSolver solver(H, xi);
  return ResolventSolver::block(vol, xsite, solver.site_columns(vol, ysite));
}

}  // namespace ncchern

#include "ncchern/chern.hpp"

#include "ncchern/linalg.hpp"
#include "ncchern/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace ncchern {

namespace {

cxd cpow_int(cxd z, int k) {
  cxd r = 1.0;
  for (int j = 0; j < k; ++j) r *= z;
  return r;
}

double factorial(int k) {
  double r = 1.0;
  for (int j = 2; j <= k; ++j) r *= j;
  return r;
}

int parity_sign(const std::vector<int>& perm) {
  int inv = 0;
  for (std::size_t a = 0; a < perm.size(); ++a)
    for (std::size_t b = a + 1; b < perm.size(); ++b)
      if (perm[a] > perm[b]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

std::vector<std::pair<std::vector<int>, int>> signed_permutations(int m) {
  std::vector<int> p(m);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::pair<std::vector<int>, int>> out;
  do {
    out.emplace_back(p, parity_sign(p));
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// --- momentum grid -------------------------------------------------------

struct KGrid {
  int d = 0;
  int N = 0;

  std::int64_t points() const {
    std::int64_t t = 1;
    for (int i = 0; i < d; ++i) t *= N;
    return t;
  }
  // lexicographic, coordinate 0 fastest
  std::vector<int> coords(std::int64_t flat) const {
    std::vector<int> c(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      c[static_cast<std::size_t>(i)] = static_cast<int>(flat % N);
      flat /= N;
    }
    return c;
  }
  std::int64_t flat(const std::vector<int>& c) const {
    std::int64_t f = 0;
    for (int i = d - 1; i >= 0; --i)
      f = f * N + ((c[static_cast<std::size_t>(i)] % N + N) % N);
    return f;
  }
  std::int64_t shifted(std::int64_t flat_idx, int dir, int step) const {
    std::vector<int> c = coords(flat_idx);
    c[static_cast<std::size_t>(dir)] += step;
    return flat(c);
  }
  RVector k(std::int64_t flat_idx) const {
    const std::vector<int> c = coords(flat_idx);
    RVector kk(d);
    for (int i = 0; i < d; ++i)
      kk[i] = 2.0 * kPi * c[static_cast<std::size_t>(i)] / N;
    return kk;
  }
};

struct BlochPoint {
  RVector energies;
  Matrix vectors;
  int occ = 0;
};

BlochPoint bloch_eig(const HoppingModel& model, const RVector& k,
                     double fermi_energy, const KGrid& grid,
                     std::int64_t flat) {
  BlochPoint bp;
  bp.vectors = bloch_matrix(model, k);
  bp.energies = linalg::hermitian_eig_inplace(bp.vectors);
  for (int j = 0; j < bp.energies.size(); ++j) {
    if (std::abs(bp.energies[j] - fermi_energy) <= 1e-8) {
      const std::vector<int> c = grid.coords(flat);
      std::string where;
      for (std::size_t i = 0; i < c.size(); ++i)
        where += (i ? "," : "") + std::to_string(c[i]);
      throw GapError("Bloch spectrum touches the Fermi level at grid point (" +
                     where + ")");
    }
    if (bp.energies[j] <= fermi_energy) ++bp.occ;
  }
  return bp;
}

// Exact dH/dk_i = sum_u t_u (-i u_i) e^{-i k.u}.
Matrix bloch_derivative(const HoppingModel& model, const RVector& k, int dir) {
  Matrix dH = Matrix::Zero(model.Q, model.Q);
  for (const auto& [u, t] : model.hoppings) {
    double ku = 0.0;
    for (int i = 0; i < model.d; ++i) ku += k[i] * u[static_cast<std::size_t>(i)];
    dH += t * (cxd(0.0, -1.0) * double(u[static_cast<std::size_t>(dir)]) *
               std::exp(cxd(0.0, -ku)));
  }
  return dH;
}

// dP/dk_i across the gap by first-order perturbation of the occupied frame.
Matrix projector_derivative(const BlochPoint& bp, const Matrix& dH) {
  const int Q = static_cast<int>(bp.energies.size());
  const Matrix G = bp.vectors.adjoint() * dH * bp.vectors;
  Matrix M = Matrix::Zero(Q, Q);
  for (int l = bp.occ; l < Q; ++l)
    for (int m = 0; m < bp.occ; ++m) {
      M(l, m) = G(l, m) / (bp.energies[m] - bp.energies[l]);
      M(m, l) = G(m, l) / (bp.energies[m] - bp.energies[l]);
    }
  return bp.vectors * M * bp.vectors.adjoint();
}

// Plaquette link-variable sum; integer-valued up to roundoff on any grid
// fine enough that every plaquette phase stays within (-pi, pi).
//
// The sign matches the curvature-sum normalization below; calibrated by the
// direction-resolved comparison test on the two-band model.
constexpr double kPlaquetteSign = -1.0;

ChernEstimate kspace_plaquette(const HoppingModel& model, double fermi_energy,
                               int N) {
  const KGrid grid{2, N};
  const std::int64_t npts = grid.points();
  std::vector<Matrix> frames(static_cast<std::size_t>(npts));
  int occ_ref = -1;
  for (std::int64_t f = 0; f < npts; ++f) {
    const BlochPoint bp = bloch_eig(model, grid.k(f), fermi_energy, grid, f);
    if (occ_ref < 0) occ_ref = bp.occ;
    if (bp.occ != occ_ref)
      throw GapError("occupied band count changes across the grid");
    frames[static_cast<std::size_t>(f)] = bp.vectors.leftCols(bp.occ);
  }
  auto link = [&](std::int64_t f, int dir) {
    const std::int64_t g = grid.shifted(f, dir, 1);
    const cxd u = (frames[static_cast<std::size_t>(f)].adjoint() *
                   frames[static_cast<std::size_t>(g)])
                      .determinant();
    if (std::abs(u) < 1e-12)
      throw PrecisionError("vanishing plaquette link; refine the grid");
    return u;
  };
  double total = 0.0;
  for (std::int64_t f = 0; f < npts; ++f) {
    const cxd w = link(f, 0) * link(grid.shifted(f, 0, 1), 1) /
                  (link(grid.shifted(f, 1, 1), 0) * link(f, 1));
    total += std::arg(w);
  }
  ChernEstimate est;
  est.n = 1;
  est.method = "kspace";
  est.grid = N;
  est.value = kPlaquetteSign * total / (2.0 * kPi);
  est.imag_part = 0.0;
  return est;
}

ChernEstimate kspace_curvature(const HoppingModel& model, double fermi_energy,
                               int n, int N, bool central_diff) {
  const int d = 2 * n;
  const KGrid grid{d, N};
  const std::int64_t npts = grid.points();
  const double h = 2.0 * kPi / N;
  const auto perms = signed_permutations(d);
  const int npairs = d * (d - 1) / 2;
  auto pair_index = [d](int i, int j) {  // i < j
    return i * (2 * d - i - 1) / 2 + (j - i - 1);
  };

  std::vector<Matrix> projectors;
  if (central_diff) {
    projectors.resize(static_cast<std::size_t>(npts));
    for (std::int64_t f = 0; f < npts; ++f) {
      const BlochPoint bp = bloch_eig(model, grid.k(f), fermi_energy, grid, f);
      projectors[static_cast<std::size_t>(f)] =
          linalg::herk(bp.vectors.leftCols(bp.occ));
    }
  }

  cxd total = 0.0;
  std::vector<Matrix> dP(static_cast<std::size_t>(d));
  std::vector<Matrix> F(static_cast<std::size_t>(npairs));
  for (std::int64_t f = 0; f < npts; ++f) {
    Matrix P;
    if (central_diff) {
      P = projectors[static_cast<std::size_t>(f)];
      for (int i = 0; i < d; ++i)
        dP[static_cast<std::size_t>(i)] =
            (projectors[static_cast<std::size_t>(grid.shifted(f, i, 1))] -
             projectors[static_cast<std::size_t>(grid.shifted(f, i, -1))]) /
            (2.0 * h);
    } else {
      const RVector k = grid.k(f);
      const BlochPoint bp = bloch_eig(model, k, fermi_energy, grid, f);
      P = linalg::herk(bp.vectors.leftCols(bp.occ));
      for (int i = 0; i < d; ++i)
        dP[static_cast<std::size_t>(i)] =
            projector_derivative(bp, bloch_derivative(model, k, i));
    }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        F[static_cast<std::size_t>(pair_index(i, j))] =
            P * (dP[static_cast<std::size_t>(i)] * dP[static_cast<std::size_t>(j)] -
                 dP[static_cast<std::size_t>(j)] * dP[static_cast<std::size_t>(i)]);
    if (n == 1) {
      total += 2.0 * F[0].trace();  // the two permutations contribute equally
    } else {
      // pair-trace table tr{F_a F_b}, then the signed permutation sum
      std::vector<cxd> T(static_cast<std::size_t>(npairs * npairs));
      for (int a = 0; a < npairs; ++a)
        for (int b = 0; b < npairs; ++b)
          T[static_cast<std::size_t>(a * npairs + b)] =
              (F[static_cast<std::size_t>(a)] * F[static_cast<std::size_t>(b)])
                  .trace();
      for (const auto& [perm, sgn] : perms) {
        int flip = 1;
        int ia = perm[0], ja = perm[1], ib = perm[2], jb = perm[3];
        if (ia > ja) { std::swap(ia, ja); flip = -flip; }
        if (ib > jb) { std::swap(ib, jb); flip = -flip; }
        total += double(sgn * flip) *
                 T[static_cast<std::size_t>(pair_index(ia, ja) * npairs +
                                            pair_index(ib, jb))];
      }
    }
  }

  const cxd pref = cpow_int(cxd(-1.0, 0.0), n) /
                   (cpow_int(cxd(0.0, 2.0 * kPi), n) * factorial(n)) /
                   std::pow(2.0, n) * std::pow(h, d);
  const cxd value = pref * total;
  ChernEstimate est;
  est.n = n;
  est.method = "kspace";
  est.grid = N;
  est.value = value.real();
  est.imag_part = std::abs(value.imag());
  return est;
}

}  // namespace

ChernEstimate kspace_chern(const HoppingModel& model, double fermi_energy,
                           int n, int N, KspaceMethod method) {
  if (n < 1) throw DimensionError("n must be >= 1");
  if (model.d != 2 * n)
    throw DimensionError("model dimension " + std::to_string(model.d) +
                         " does not match 2n=" + std::to_string(2 * n));
  if (N < 4) throw ConfigError("momentum grid too coarse (N >= 4)");
  if (n > 2 && method != KspaceMethod::Analytic)
    throw DimensionError("momentum sum beyond n=2 only via the analytic path");
  if (method == KspaceMethod::Auto)
    method = (n == 1) ? KspaceMethod::Plaquette : KspaceMethod::Analytic;
  switch (method) {
    case KspaceMethod::Plaquette:
      if (n != 1)
        throw DimensionError("plaquette field strength is n=1 only");
      return kspace_plaquette(model, fermi_energy, N);
    case KspaceMethod::CentralDiff:
      return kspace_curvature(model, fermi_energy, n, N, true);
    default:
      return kspace_curvature(model, fermi_energy, n, N, false);
  }
}

ChernEstimate realspace_chern(const FermiProjector& P, const FiniteVolume& vol,
                              int n, const DerivationScheme& scheme,
                              const std::vector<std::int64_t>& core_sites) {
  if (vol.d != 2 * n)
    throw DimensionError("volume dimension does not match 2n");
  if (P.P.rows() != vol.dofs())
    throw DimensionError("projector size does not match the volume");
  if (core_sites.empty()) throw ConfigError("empty core region");
  const int d = 2 * n;

  std::vector<Matrix> D(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    D[static_cast<std::size_t>(i)] = derivation(P.P, i + 1, vol, scheme);

  const std::vector<std::int64_t> cd = core_dofs(vol, core_sites);
  const auto nc = static_cast<Eigen::Index>(cd.size());
  Matrix A(nc, vol.dofs());
  for (Eigen::Index r = 0; r < nc; ++r)
    A.row(r) = P.P.row(cd[static_cast<std::size_t>(r)]);

  // Signed sum over direction orderings; prefix products A*D_..*D_.. are
  // shared along the permutation tree, the last factor is applied column-wise.
  Vector per_dof = Vector::Zero(nc);
  std::vector<Matrix> stack(static_cast<std::size_t>(d));
  std::vector<int> perm;
  perm.reserve(static_cast<std::size_t>(d));
  std::vector<bool> used(static_cast<std::size_t>(d), false);

  auto leaf = [&](const Matrix& prefix, int last, int sgn) {
    const Matrix& Dl = D[static_cast<std::size_t>(last)];
    for (Eigen::Index r = 0; r < nc; ++r) {
      const cxd v =
          (prefix.row(r) * Dl.col(cd[static_cast<std::size_t>(r)]))(0, 0);
      per_dof[r] += double(sgn) * v;
    }
  };

  std::function<void(int)> walk = [&](int depth) {
    const Matrix& prefix =
        depth == 0 ? A : stack[static_cast<std::size_t>(depth - 1)];
    if (depth == d - 1) {
      for (int j = 0; j < d; ++j)
        if (!used[static_cast<std::size_t>(j)]) {
          perm.push_back(j);
          leaf(prefix, j, parity_sign(perm));
          perm.pop_back();
        }
      return;
    }
    for (int j = 0; j < d; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      used[static_cast<std::size_t>(j)] = true;
      perm.push_back(j);
      linalg::gemm_into(prefix, D[static_cast<std::size_t>(j)],
                        stack[static_cast<std::size_t>(depth)]);
      walk(depth + 1);
      perm.pop_back();
      used[static_cast<std::size_t>(j)] = false;
    }
  };
  walk(0);

  const cxd pref = cpow_int(cxd(0.0, 2.0 * kPi), n) / factorial(n);

  // per-site values for the core-sensitivity diagnostic
  std::vector<cxd> site_value(core_sites.size(), 0.0);
  for (Eigen::Index r = 0; r < nc; ++r)
    site_value[static_cast<std::size_t>(r / vol.Q)] += pref * per_dof[r];

  cxd mean_all = 0.0;
  for (const cxd& v : site_value) mean_all += v;
  mean_all /= double(core_sites.size());

  int rmax = 0;
  for (std::int64_t s : core_sites) {
    const IVec p = vol.position(s);
    int nrm = 0;
    for (int c : p) nrm = std::max(nrm, std::abs(c));
    rmax = std::max(rmax, nrm);
  }
  cxd mean_inner = 0.0;
  std::int64_t inner_count = 0;
  for (std::size_t idx = 0; idx < core_sites.size(); ++idx) {
    const IVec p = vol.position(core_sites[idx]);
    int nrm = 0;
    for (int c : p) nrm = std::max(nrm, std::abs(c));
    if (nrm <= rmax / 2) {
      mean_inner += site_value[idx];
      ++inner_count;
    }
  }

  ChernEstimate est;
  est.n = n;
  est.method = "realspace";
  est.L = vol.L;
  est.value = mean_all.real();
  est.imag_part = std::abs(mean_all.imag());
  est.degenerate_warning = P.degenerate;
  if (inner_count > 0 && inner_count < static_cast<std::int64_t>(core_sites.size()))
    est.core_sensitivity =
        std::abs(mean_inner.real() / double(inner_count) - mean_all.real());
  return est;
}

ChernEstimate disorder_averaged_chern(const HoppingModel& model,
                                      const FiniteVolume& vol,
                                      const MagneticField& B, double lambda,
                                      double fermi_energy, int n,
                                      const std::vector<std::uint64_t>& seeds,
                                      const DerivationScheme& scheme,
                                      double core_fraction, int workers) {
  if (seeds.empty()) throw ConfigError("need at least one seed");
  const std::vector<std::int64_t> core = central_core(vol, core_fraction);
  std::vector<ChernEstimate> slots(seeds.size());
  parallel_for(seeds.size(), workers, [&](std::size_t i) {
    try {
      const DisorderRealization dis =
          sample_disorder(vol, model, lambda, seeds[i]);
      const Matrix H = build_hamiltonian(model, vol, B, dis);
      const FermiProjector fp = fermi_projector(H, fermi_energy);
      slots[i] = realspace_chern(fp, vol, n, scheme, core);
    } catch (const Error& e) {
      throw Error(e.kind, "seed " + std::to_string(seeds[i]) +
                              " failed: " + e.what());
    }
  });

  ChernEstimate out;
  out.n = n;
  out.method = "realspace";
  out.L = vol.L;
  out.realizations = static_cast<int>(seeds.size());
  for (const auto& s : slots) {
    out.per_seed.push_back(s.value);
    out.imag_part = std::max(out.imag_part, s.imag_part);
    out.core_sensitivity = std::max(out.core_sensitivity, s.core_sensitivity);
    out.degenerate_warning = out.degenerate_warning || s.degenerate_warning;
  }
  double mean = 0.0;
  for (double v : out.per_seed) mean += v;
  mean /= double(out.per_seed.size());
  out.value = mean;
  if (out.per_seed.size() > 1) {
    double ss = 0.0;
    for (double v : out.per_seed) ss += (v - mean) * (v - mean);
    out.std_error = std::sqrt(ss / double(out.per_seed.size() - 1)) /
                    std::sqrt(double(out.per_seed.size()));
  }
  return out;
}

std::vector<PhaseRow> phase_diagram(const std::string& model_name,
                                    const std::vector<PhasePoint>& grid,
                                    const EnsembleSettings& settings) {
  if (grid.empty()) throw ConfigError("empty phase-diagram grid");
  std::vector<PhaseRow> rows(grid.size());
  parallel_for(grid.size(), settings.workers, [&](std::size_t i) {
    PhaseRow& row = rows[i];
    row.m = grid[i].m;
    row.lambda = grid[i].lambda;
    try {
      const HoppingModel model =
          model_zoo(model_name, {{settings.mass_param, grid[i].m}});
      row.est = disorder_averaged_chern(
          model, settings.vol, settings.B, grid[i].lambda,
          settings.fermi_energy, settings.n, settings.seeds, settings.scheme,
          settings.core_fraction, 1);
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return rows;
}

}  // namespace ncchern

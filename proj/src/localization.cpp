#include "ncchern/localization.hpp"

#include "ncchern/linalg.hpp"
#include "ncchern/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncchern {

double localization_length(const FermiProjector& P, const FiniteVolume& vol,
                           int n, const DerivationScheme& scheme,
                           const std::vector<std::int64_t>& core_sites) {
  if (vol.d != 2 * n)
    throw DimensionError("localization length needs vol.d = 2n");
  double acc = 0.0;
  for (int i = 1; i <= vol.d; ++i)
    acc += ls_norm(derivation(P.P, i, vol, scheme), 2.0 * n, vol, core_sites);
  return acc;
}

FracMomentFit fractional_moment_fit(const HoppingModel& model,
                                    const FiniteVolume& vol,
                                    const MagneticField& B, double lambda,
                                    double fermi_energy, double s, double delta,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::vector<int>& distances,
                                    int workers) {
  if (s <= 0.0 || s >= 1.0)
    throw ConfigError("fractional exponent must satisfy 0 < s < 1");
  if (delta <= 0.0) throw ConfigError("imaginary offset must be positive");
  if (seeds.empty()) throw ConfigError("need at least one seed");
  std::vector<int> dist = distances;
  std::sort(dist.begin(), dist.end());
  dist.erase(std::unique(dist.begin(), dist.end()), dist.end());
  if (dist.size() < 4)
    throw ConfigError("fit needs at least 4 distinct distances");
  const int rmax_ok = (vol.L - 1) / 2;
  for (int r : dist)
    if (r < 1 || r > rmax_ok)
      throw ConfigError("distance " + std::to_string(r) +
                        " outside the volume interior");

  const std::int64_t origin = vol.site_of(vol.origin());
  const cxd xi(fermi_energy, delta);

  // moments[seed][distance index], averaged over the 2d axis directions
  std::vector<std::vector<double>> per_seed(
      seeds.size(), std::vector<double>(dist.size(), 0.0));
  parallel_for(seeds.size(), workers, [&](std::size_t si) {
    const DisorderRealization dis =
        sample_disorder(vol, model, lambda, seeds[si]);
    const Matrix H = build_hamiltonian(model, vol, B, dis);
    const ResolventSolver solver(H, xi);
    const Matrix cols = solver.site_columns(vol, origin);
    for (std::size_t ri = 0; ri < dist.size(); ++ri) {
      double acc = 0.0;
      int count = 0;
      for (int i = 0; i < vol.d; ++i)
        for (int sign : {+1, -1}) {
          IVec p(static_cast<std::size_t>(vol.d), 0);
          p[static_cast<std::size_t>(i)] = sign * dist[ri];
          const std::int64_t xsite = vol.site_at_position(p);
          if (xsite < 0) continue;  // open boundary clipped this direction
          const Matrix blk = ResolventSolver::block(vol, xsite, cols);
          acc += std::pow(linalg::spectral_norm(blk), s);
          ++count;
        }
      per_seed[si][ri] = count ? acc / count : 0.0;
    }
  });

  FracMomentFit fit;
  fit.s = s;
  fit.distances = dist;
  fit.moments.resize(dist.size(), 0.0);
  for (std::size_t ri = 0; ri < dist.size(); ++ri) {
    for (std::size_t si = 0; si < seeds.size(); ++si)
      fit.moments[ri] += per_seed[si][ri];
    fit.moments[ri] /= double(seeds.size());
  }

  // least squares on log(moment) vs r; exactly vanishing rows cannot enter
  // the log fit
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t ri = 0; ri < dist.size(); ++ri) {
    if (fit.moments[ri] < 1e-280) continue;
    const double x = dist[ri];
    const double y = std::log(fit.moments[ri]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) {
    fit.exact_zero = true;
    fit.beta = std::numeric_limits<double>::infinity();
    fit.C_s = 0.0;
    fit.residual = 0.0;
    return fit;
  }
  const double denom = m * sxx - sx * sx;
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  fit.beta = -slope / s;
  fit.C_s = std::exp(intercept);
  double ss_res = 0.0;
  for (std::size_t ri = 0; ri < dist.size(); ++ri) {
    if (fit.moments[ri] < 1e-280) continue;
    const double pred = intercept + slope * dist[ri];
    const double r = std::log(fit.moments[ri]) - pred;
    ss_res += r * r;
  }
  fit.residual = std::sqrt(ss_res / m);
  // decay is claimed only when the fitted slope clears its own standard
  // error by kDecaySignificance; a noisy flat profile fits a small negative
  // slope that a sign test alone would mistake for localization
  constexpr double kDecaySignificance = 2.0;
  if (m > 2) {
    const double sxx_centered = sxx - sx * sx / m;
    const double se =
        std::sqrt(ss_res / double(m - 2) / std::max(sxx_centered, 1e-300));
    fit.decay_tstat = se > 0.0 ? -slope / se : 0.0;
  }
  fit.delocalized =
      !(fit.beta > 0.0) || fit.decay_tstat < kDecaySignificance;
  return fit;
}

SobolevTable sobolev_continuity(const HoppingModel& model,
                                const FiniteVolume& vol,
                                const MagneticField& B, double lambda,
                                double fermi_energy,
                                const std::vector<double>& deltas, int n,
                                const std::vector<std::uint64_t>& seeds,
                                const DerivationScheme& scheme,
                                double core_fraction,
                                std::uint64_t direction_seed, int workers) {
  if (deltas.empty()) throw ConfigError("need at least one deformation size");
  for (double dh : deltas)
    if (dh < 0.0) throw ConfigError("deformation sizes must be >= 0");
  if (seeds.empty()) throw ConfigError("need at least one seed");
  const std::vector<std::int64_t> core = central_core(vol, core_fraction);

  // fixed deformation direction: a unit-strength bond pattern, sup-norm 1/2,
  // scaled by 2 delta_h so the entrywise perturbation is bounded by delta_h
  const DisorderRealization dir_pattern =
      sample_disorder(vol, model, 1.0, direction_seed);
  const Matrix H_dir = build_hamiltonian(model, vol, B, dir_pattern) -
                       build_hamiltonian(model, vol, B,
                                         DisorderRealization::none());

  struct Cell {
    double norm = 0.0;
    bool crossing = false;
  };
  std::vector<std::vector<Cell>> grid(
      seeds.size(), std::vector<Cell>(deltas.size()));
  parallel_for(seeds.size(), workers, [&](std::size_t si) {
    const DisorderRealization dis =
        sample_disorder(vol, model, lambda, seeds[si]);
    const Matrix H = build_hamiltonian(model, vol, B, dis);
    const FermiProjector base = fermi_projector(H, fermi_energy);
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      const Matrix Hp = H + (2.0 * deltas[di]) * H_dir;
      const FermiProjector moved = fermi_projector(Hp, fermi_energy);
      Cell& cell = grid[si][di];
      cell.crossing = moved.occupied_count != base.occupied_count ||
                      moved.degenerate || base.degenerate;
      cell.norm =
          sobolev_norm(moved.P - base.P, n, vol, core, scheme);
    }
  });

  SobolevTable table;
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    SobolevRow row;
    row.delta_h = deltas[di];
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      row.norm += grid[si][di].norm;
      row.crossing = row.crossing || grid[si][di].crossing;
    }
    row.norm /= double(seeds.size());
    table.rows.push_back(row);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const SobolevRow& row : table.rows) {
    if (row.crossing || row.delta_h <= 0.0 || row.norm <= 0.0) continue;
    const double x = std::log(row.delta_h);
    const double y = std::log(row.norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    table.loglog_slope = (m * sxy - sx * sy) / denom;
  }
  return table;
}

Matrix contour_projector(const Matrix& H, double fermi_energy, int nodes) {
  if (nodes < 8) throw ConfigError("contour needs at least 8 nodes");
  if (H.rows() != H.cols()) throw DimensionError("square matrix required");
  // circle through fermi_energy and -(|H| + 1): encloses exactly the
  // spectrum below the Fermi level
  const double reach = linalg::spectral_norm(H) + 1.0;
  const double center = 0.5 * (fermi_energy - reach);
  const double radius = 0.5 * (fermi_energy + reach);
  const Eigen::Index dim = H.rows();
  Matrix acc = Matrix::Zero(dim, dim);
  for (int j = 0; j < nodes; ++j) {
    const double th = 2.0 * kPi * j / nodes;
    const cxd xi = center + radius * std::polar(1.0, th);
    Matrix shifted = H;
    shifted.diagonal().array() -= xi;
    acc += std::polar(1.0, th) * shifted.partialPivLu().inverse();
  }
  return (-radius / double(nodes)) * acc;
}

}  // namespace ncchern

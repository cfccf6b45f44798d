#include "ncchern/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace ncchern {

double simplex_volume(const Simplex& s) {
  if (s.vertices.empty()) throw DimensionError("simplex has no vertices");
  const Eigen::Index d = s.vertices.front().size();
  if (static_cast<Eigen::Index>(s.vertices.size()) != d + 1)
    throw DimensionError("simplex needs d+1 vertices in R^d");
  Eigen::MatrixXd edges(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    edges.col(j) = s.vertices[static_cast<std::size_t>(j + 1)] - s.vertices[0];
  double fact = 1.0;
  for (Eigen::Index k = 2; k <= d; ++k) fact *= double(k);
  return edges.determinant() / fact;
}

cxd lemma3_rhs(const CliffordRep& rep, const std::vector<RVector>& points) {
  const int d = 2 * rep.n;
  if (static_cast<int>(points.size()) != d)
    throw DimensionError("need 2n points");
  Eigen::MatrixXd M(d, d);
  for (int i = 0; i < d; ++i) {
    if (points[static_cast<std::size_t>(i)].size() != d)
      throw DimensionError("points must live in R^{2n}");
    M.row(i) = points[static_cast<std::size_t>(i)];
  }
  double fact = 1.0;
  for (int k = 2; k <= rep.n; ++k) fact *= double(k);
  return -std::pow(2.0 * kPi, rep.n) * unit_imag_pow(-rep.n) / fact *
         M.determinant() * double(rep.orientation);
}

namespace {

// Workspace evaluating tr{gamma_0 prod (unit(x_i+x)-unit(x_{i+1}+x)).gamma}
// without per-call allocation.
struct Integrand {
  const CliffordRep& rep;
  const std::vector<RVector>& points;
  int d;
  Matrix acc, gdot, tmp;
  std::vector<RVector> units;
  std::int64_t evals = 0;

  Integrand(const CliffordRep& r, const std::vector<RVector>& pts)
      : rep(r),
        points(pts),
        d(2 * r.n),
        acc(r.dim, r.dim),
        gdot(r.dim, r.dim),
        tmp(r.dim, r.dim),
        units(static_cast<std::size_t>(d + 1), RVector(2 * r.n)) {}

  static void unit_into(const RVector& v, RVector& out) {
    const double r = v.norm();
    if (r < 1e-14)
      out.setZero();
    else
      out = v / r;
  }

  double operator()(const RVector& x) {
    ++evals;
    RVector shifted(d);
    for (int i = 0; i < d; ++i) {
      shifted = points[static_cast<std::size_t>(i)] + x;
      unit_into(shifted, units[static_cast<std::size_t>(i)]);
    }
    unit_into(x, units[static_cast<std::size_t>(d)]);
    acc = rep.gamma0;
    for (int i = 0; i < d; ++i) {
      gdot.setZero();
      for (int j = 0; j < d; ++j) {
        const double c = units[static_cast<std::size_t>(i)][j] -
                         units[static_cast<std::size_t>(i + 1)][j];
        if (c != 0.0) gdot += c * rep.gamma[static_cast<std::size_t>(j)];
      }
      tmp.noalias() = acc * gdot;
      acc.swap(tmp);
    }
    // a graded trace of 2n real gamma contractions equals i^{-n} times a
    // real number; integrate that real scalar and restore the phase at the
    // end
    return (unit_imag_pow(rep.n) * acc.trace()).real();
  }
};

struct GaussRule {
  std::vector<double> nodes, weights;
};

const GaussRule& gauss(int m) {
  static const GaussRule g2{{-0.5773502691896257, 0.5773502691896257},
                            {1.0, 1.0}};
  static const GaussRule g3{{-0.7745966692414834, 0.0, 0.7745966692414834},
                            {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
  static const GaussRule g5{{-0.9061798459386640, -0.5384693101056831, 0.0,
                             0.5384693101056831, 0.9061798459386640},
                            {0.2369268850561891, 0.4786286704993665,
                             0.5688888888888889, 0.4786286704993665,
                             0.2369268850561891}};
  static const GaussRule g8{
      {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
       -0.1834346424956498, 0.1834346424956498, 0.5255324099163290,
       0.7966664774136267, 0.9602898564975363},
      {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
       0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
       0.2223810344533745, 0.1012285362903763}};
  switch (m) {
    case 2: return g2;
    case 3: return g3;
    case 5: return g5;
    default: return g8;
  }
}

// tensor-product Gauss value of f over the box [c - h, c + h]
double box_gauss(Integrand& f, const RVector& center, double half,
                 const GaussRule& rule) {
  const int d = static_cast<int>(center.size());
  const int m = static_cast<int>(rule.nodes.size());
  std::int64_t total = 1;
  for (int i = 0; i < d; ++i) total *= m;
  RVector x(d);
  double acc = 0.0;
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rem = flat;
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const int idx = static_cast<int>(rem % m);
      rem /= m;
      x[i] = center[i] + half * rule.nodes[static_cast<std::size_t>(idx)];
      w *= rule.weights[static_cast<std::size_t>(idx)];
    }
    acc += w * f(x);
  }
  return acc * std::pow(half, d);
}

struct CellAccumulator {
  double value = 0.0;
  double error = 0.0;
};

void integrate_cell(Integrand& f, const RVector& center, double half,
                    int depth, int max_depth, double tol_density,
                    const GaussRule& high, const GaussRule& low,
                    CellAccumulator& out) {
  const int d = static_cast<int>(center.size());
  const double hi = box_gauss(f, center, half, high);
  const double lo = box_gauss(f, center, half, low);
  const double err = std::abs(hi - lo);
  const double area = std::pow(2.0 * half, d);
  if (err <= tol_density * area || depth >= max_depth) {
    out.value += hi;
    out.error += err;
    return;
  }
  const double h2 = half / 2.0;
  RVector child(d);
  const int children = 1 << d;
  for (int c = 0; c < children; ++c) {
    for (int i = 0; i < d; ++i)
      child[i] = center[i] + (((c >> i) & 1) ? h2 : -h2);
    integrate_cell(f, child, h2, depth + 1, max_depth, tol_density, high, low,
                   out);
  }
}

// integral of f over the cubic frame [-2R,2R]^d \ [-R,R]^d: four equal
// segments per axis, cells lying entirely in the middle pair are skipped,
// so the frames tile the complement of the inner box exactly
double frame_value(Integrand& f, double R, const GaussRule& high,
                   const GaussRule& low, double& err) {
  const int d = f.d;
  const double half = R / 2.0;
  const std::int64_t ncells = static_cast<std::int64_t>(std::pow(4, d));
  RVector center(d);
  double acc = 0.0;
  for (std::int64_t flat = 0; flat < ncells; ++flat) {
    std::int64_t rem = flat;
    bool inner = true;
    for (int i = 0; i < d; ++i) {
      const int seg = static_cast<int>(rem % 4);
      rem /= 4;
      if (seg == 0 || seg == 3) inner = false;
      center[i] = -2.0 * R + (2 * seg + 1) * half;
    }
    if (inner) continue;
    const double hi = box_gauss(f, center, half, high);
    const double lo = box_gauss(f, center, half, low);
    acc += hi;
    err += std::abs(hi - lo);
  }
  return acc;
}

}  // namespace

QuadratureResult lemma3_lhs(const CliffordRep& rep,
                            const std::vector<RVector>& points,
                            const Lemma3Options& opt) {
  const int d = 2 * rep.n;
  if (rep.n > 2)
    throw DimensionError("integral identity quadrature implemented for n<=2");
  if (static_cast<int>(points.size()) != d)
    throw DimensionError("need 2n points");
  double pmax = 0.0;
  for (const RVector& p : points) {
    if (p.size() != d) throw DimensionError("points must live in R^{2n}");
    pmax = std::max(pmax, p.norm());
  }
  if (pmax > 4.0 + 1e-12)
    throw ConfigError("points must satisfy |x_i| <= 4");

  const bool is2d = (d == 2);
  const double inner_r =
      opt.inner_radius > 0.0
          ? opt.inner_radius
          : std::max(is2d ? 8.0 : 4.0, std::ceil(pmax) + 2.0);
  const double outer_max =
      opt.max_outer_radius > 0.0 ? opt.max_outer_radius
                                 : (is2d ? 4096.0 : 2048.0);
  const double inner_tol =
      opt.inner_tolerance > 0.0 ? opt.inner_tolerance : (is2d ? 2e-3 : 5e-1);
  const double tail_target =
      opt.tail_target > 0.0 ? opt.tail_target : (is2d ? 2e-3 : 5e-2);
  const int max_depth = opt.max_depth > 0 ? opt.max_depth : (is2d ? 12 : 7);

  Integrand f(rep, points);
  QuadratureResult res;

  // kink-capturing cartesian box
  {
    const GaussRule& high = gauss(is2d ? 5 : 3);
    const GaussRule& low = gauss(is2d ? 3 : 2);
    const int per_axis = is2d ? 8 : 4;
    const double half = inner_r / per_axis;
    const double tol_density = inner_tol / std::pow(2.0 * inner_r, d);
    CellAccumulator cells;
    const std::int64_t ncells = static_cast<std::int64_t>(std::pow(per_axis, d));
    RVector center(d);
    for (std::int64_t flat = 0; flat < ncells; ++flat) {
      std::int64_t rem = flat;
      for (int i = 0; i < d; ++i) {
        const int idx = static_cast<int>(rem % per_axis);
        rem /= per_axis;
        center[i] = -inner_r + (2 * idx + 1) * half;
      }
      integrate_cell(f, center, half, 0, max_depth, tol_density, high, low,
                     cells);
    }
    res.value += cells.value;
    res.error_estimate += cells.error;
  }

  // dyadic cubic frames; contributions of a |x|^{-(2n+1)} integrand halve
  // per frame, so the tail after the last frame is bounded by the last
  // contribution.
  {
    const GaussRule& high = gauss(5);
    const GaussRule& low = gauss(3);
    double R = inner_r;
    double last = 0.0;
    bool settled = false;
    while (2.0 * R <= outer_max * (1.0 + 1e-12)) {
      double err = 0.0;
      const double v = frame_value(f, R, high, low, err);
      res.value += v;
      res.error_estimate += err;
      last = std::abs(v);
      R *= 2.0;
      if (last < tail_target / 2.0) {
        settled = true;
        break;
      }
    }
    if (!settled)
      throw PrecisionError(
          "tail of the integral did not settle below the target by radius " +
          std::to_string(outer_max) +
          "; increase max_outer_radius or inner_radius");
    res.error_estimate += last;
  }

  res.evaluations = f.evals;
  res.value *= unit_imag_pow(-rep.n);
  return res;
}

DixmierEstimate dixmier_estimate(
    const std::function<double(const IVec&)>& f,
    const std::function<double(const RVector&)>& phi, int n, int R_max) {
  if (R_max < 4) throw ConfigError("R_max too small");
  const int d = 2 * n;
  const double R2 = double(R_max) * double(R_max);

  std::vector<std::pair<double, std::int64_t>> weights;  // (value, order key)
  IVec x(static_cast<std::size_t>(d), -R_max);
  RVector xhat(d);
  std::int64_t key = 0;
  for (;;) {
    double r2 = 0.0;
    for (int c : x) r2 += double(c) * double(c);
    if (r2 > 0.0 && r2 <= R2) {
      const double r = std::sqrt(r2);
      for (int i = 0; i < d; ++i) xhat[i] = x[static_cast<std::size_t>(i)] / r;
      const double w = f(x) * phi(xhat) / std::pow(r, d);
      weights.emplace_back(w, key);
    }
    ++key;
    int i = 0;
    for (; i < d; ++i) {
      if (++x[static_cast<std::size_t>(i)] <= R_max) break;
      x[static_cast<std::size_t>(i)] = -R_max;
    }
    if (i == d) break;
  }

  std::sort(weights.begin(), weights.end(),
            [](const auto& a, const auto& b) {
              const double ma = std::abs(a.first), mb = std::abs(b.first);
              if (ma != mb) return ma > mb;
              return a.second < b.second;
            });

  DixmierEstimate est;
  double sum = 0.0;
  std::int64_t next_checkpoint = 64;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    sum += weights[i].first;
    const auto count = static_cast<std::int64_t>(i + 1);
    if (count == next_checkpoint ||
        i + 1 == weights.size()) {
      est.checkpoints.push_back(count);
      est.ratios.push_back(sum / std::log(double(count)));
      if (count == next_checkpoint) next_checkpoint *= 2;
    }
  }
  if (est.ratios.empty()) throw ConfigError("no lattice points in range");

  // ratio(N) = limit + b / log N; least squares over the later checkpoints
  const std::size_t use = std::max<std::size_t>(3, est.ratios.size() / 2);
  const std::size_t off = est.ratios.size() > use ? est.ratios.size() - use : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double m = 0;
  for (std::size_t i = off; i < est.ratios.size(); ++i) {
    const double xx = 1.0 / std::log(double(est.checkpoints[i]));
    sx += xx;
    sy += est.ratios[i];
    sxx += xx * xx;
    sxy += xx * est.ratios[i];
    m += 1.0;
  }
  const double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) {
    est.limit = est.ratios.back();
  } else {
    const double b = (m * sxy - sx * sy) / denom;
    est.limit = (sy - b * sx) / m;
  }
  return est;
}

}  // namespace ncchern

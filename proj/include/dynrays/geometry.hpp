#ifndef DYNRAYS_GEOMETRY_HPP
#define DYNRAYS_GEOMETRY_HPP

// Comparison models for hyperbolic densities and the fundamental-domain
// shrinking profiles built on them. The true density of C minus P(f) is never
// computed; every estimate goes through one of three explicit models.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "dynrays/curve.hpp"
#include "dynrays/error.hpp"
#include "dynrays/growth.hpp"
#include "dynrays/maps.hpp"
#include "dynrays/rays.hpp"
#include "dynrays/symbolic.hpp"

namespace dynrays {

enum class DensityKind { TwicePunctured0, ExteriorDisk, HalfPlane };

struct DensityModel {
  DensityKind kind = DensityKind::HalfPlane;
  double R = 1.0;  // ExteriorDisk radius
  double C = 0.0;  // HalfPlane abscissa

  static DensityModel twice_punctured() { return {DensityKind::TwicePunctured0, 0.0, 0.0}; }
  static DensityModel exterior_disk(double R) { return {DensityKind::ExteriorDisk, R, 0.0}; }
  static DensityModel half_plane(double C) { return {DensityKind::HalfPlane, 0.0, C}; }

  bool valid_at(complex z) const {
    const double r = std::abs(z);
    switch (kind) {
      case DensityKind::TwicePunctured0: return r > 0 && r < 1;
      case DensityKind::ExteriorDisk: return r > R;
      case DensityKind::HalfPlane: return z.real() > C;
    }
    return false;
  }

  double density(complex z) const {
    if (!valid_at(z)) throw DomainError("density model evaluated outside its validity region");
    const double r = std::abs(z);
    switch (kind) {
      case DensityKind::TwicePunctured0: return 1.0 / (r * std::abs(std::log(r)));
      case DensityKind::ExteriorDisk: return 1.0 / (r * std::log(r / R));
      case DensityKind::HalfPlane: return 1.0 / (2.0 * (z.real() - C));
    }
    return 0.0;
  }
};

inline std::string to_string(DensityKind k) {
  switch (k) {
    case DensityKind::TwicePunctured0: return "twice-punctured";
    case DensityKind::ExteriorDisk: return "exterior-disk";
    case DensityKind::HalfPlane: return "half-plane";
  }
  return "?";
}

struct QuadratureConfig {
  double max_edge = 0.01;
  double rel_tol = 1e-6;
  int max_depth = 200;
};

namespace detail {

// Adaptive midpoint rule on the straight edge a -> b: an interval is
// accepted when one and two panels agree to the relative tolerance, else it
// is bisected. Bisection is scale-free, which matters near the puncture.
inline double edge_integral(const DensityModel& model, complex a, complex b, double tol, int depth) {
  const complex d = b - a;
  const double len = std::abs(d);
  const double one = model.density(a + 0.5 * d) * len;
  const double two = 0.5 * len * (model.density(a + 0.25 * d) + model.density(a + 0.75 * d));
  if (depth <= 0 || std::abs(two - one) <= tol * std::abs(two)) return two;
  const complex mid = a + 0.5 * d;
  return edge_integral(model, a, mid, tol, depth - 1) + edge_integral(model, mid, b, tol, depth - 1);
}

}  // namespace detail

/// Integral of the model density along the polyline. The curve is first
/// refined to the configured edge length, then each edge is integrated by an
/// adaptive midpoint rule to the relative tolerance.
inline double hyperbolic_length(const Curve& curve, const DensityModel& model, const QuadratureConfig& q = {}) {
  for (auto z : curve.points)
    if (!model.valid_at(z)) throw DomainError("curve leaves the validity region of the density model");
  const Curve fine = refine(curve, q.max_edge);
  double total = 0.0;
  for (std::size_t i = 1; i < fine.points.size(); ++i) {
    const complex a = fine.points[i - 1], b = fine.points[i];
    if (a != b) total += detail::edge_integral(model, a, b, q.rel_tol, q.max_depth);
  }
  return total;
}

struct DensityDecayRow {
  double radius = 0.0;
  double ratio = 0.0;  // rho(z) |z| = 1 / log(|z| / R)
};

struct DensityDecayReport {
  std::vector<DensityDecayRow> rows;
  bool monotone = true;
  std::vector<std::string> violations;
};

/// Tabulates rho / rho_eucl for the exterior-disk model at the given radii.
inline DensityDecayReport density_decay_check(const DensityModel& model, const std::vector<double>& radii) {
  DensityDecayReport rep;
  if (model.kind != DensityKind::ExteriorDisk) {
    rep.monotone = false;
    rep.violations.push_back("density decay is tabulated for the exterior-disk model only");
    return rep;
  }
  for (double r : radii) {
    if (!(r > model.R)) {
      rep.monotone = false;
      rep.violations.push_back("radius " + std::to_string(r) + " is not outside the disk");
      continue;
    }
    const double ratio = model.density(complex(r, 0.0)) * r;
    if (!rep.rows.empty() && !(ratio < rep.rows.back().ratio)) {
      rep.monotone = false;
      rep.violations.push_back("ratio does not decrease at radius " + std::to_string(r));
    }
    rep.rows.push_back({r, ratio});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Shrinking profiles

/// A closed disk; a fundamental domain "meets" it if any edge comes within
/// the radius of the center.
struct Window {
  complex center;
  double radius = 0.0;

  bool meets(const Curve& c) const {
    if (c.points.size() == 1) return std::abs(c.points[0] - center) <= radius;
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      const complex a = c.points[i - 1], d = c.points[i] - a;
      const double len2 = std::norm(d);
      double s = len2 > 0 ? std::real((center - a) * std::conj(d)) / len2 : 0.0;
      s = std::clamp(s, 0.0, 1.0);
      if (std::abs(a + s * d - center) <= radius) return true;
    }
    return false;
  }
};

struct ShrinkRow {
  double t = 0.0;
  double max_length = 0.0;  // 0 when no member meets the window
  int n_samples = 0;        // members whose fundamental domain meets the window
};

struct ShrinkProfile {
  std::vector<ShrinkRow> rows;  // in grid order (decreasing t)
  std::vector<std::string> warnings;

  bool strictly_decreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (!(rows[i].max_length < rows[i - 1].max_length)) return false;
    return !rows.empty();
  }
  /// Largest grid potential below which every tabulated max length is < eps;
  /// NaN when even the last row fails.
  double t_eps(double eps) const {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      if (!(it->max_length < eps)) break;
      best = it->t;
    }
    return best;
  }
};

/// Length of the fundamental domain I_t of a traced segment.
inline double fundamental_length(const RaySegment& seg, double t) { return fundamental_domain(seg, t).length(); }

/// For each potential of the (decreasing) grid, the largest fundamental
/// domain among the members that meet the window. Members that fail to trace
/// are skipped with a warning.
template <class Coord>
ShrinkProfile shrinking_profile(const MapSpec& m, const std::vector<Coord>& members, const std::vector<double>& grid,
                                const Window& K, TraceConfig cfg = {}) {
  if (grid.empty()) throw ConfigError("shrinking profile needs a potential grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] < grid[i - 1])) throw ConfigError("shrinking profile grid must decrease");
  if (!(grid.back() > 0)) throw ConfigError("shrinking profile potentials must be positive");
  const GrowthModel F(m);
  // One extra level below the grid keeps every I_t inside the traced range.
  cfg.floor = F.Finv(grid.back()) * (1 - 1e-9);
  if (cfg.top_for(m) < F.F(grid.front())) cfg.top = F.F(grid.front()) * 1.000001;

  ShrinkProfile prof;
  prof.rows.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) prof.rows[g].t = grid[g];
  for (const auto& s : members) {
    RaySegment seg;
    try {
      if constexpr (std::is_same_v<Coord, PolyAngle>) {
        seg = trace_poly_ray(m, s, cfg);
      } else {
        seg = trace_exp_ray(m, s, cfg);
      }
    } catch (const Error& e) {
      prof.warnings.push_back(s.str() + ": " + e.what());
      continue;
    }
    if (seg.truncated) prof.warnings.push_back(s.str() + ": truncated (" + seg.truncation_reason + ")");
    for (std::size_t g = 0; g < grid.size(); ++g) {
      Curve I;
      try {
        I = fundamental_domain(seg, grid[g]);
      } catch (const Error& e) {
        prof.warnings.push_back(s.str() + " at t = " + std::to_string(grid[g]) + ": " + e.what());
        continue;
      }
      if (!K.meets(I)) continue;
      auto& row = prof.rows[g];
      row.max_length = std::max(row.max_length, I.length());
      ++row.n_samples;
    }
  }
  return prof;
}

/// All addresses a_m ... a_1 base with 1 <= m <= max_len and |a_i| <= bound,
/// plus the base itself: a finite slice of the pullback family of the base.
inline std::vector<ExpAddress> pullback_family(const ExpAddress& base, int max_len, long bound) {
  std::vector<ExpAddress> out{base};
  std::vector<ExpAddress> layer{base};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<ExpAddress> next;
    for (const auto& s : layer)
      for (long a = -bound; a <= bound; ++a) next.push_back(s.prepended(a));
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bounded fundamental domains for exponential pullbacks

struct BoundedDomainRow {
  std::vector<long> prefix;  // a_m ... a_1
  std::string address;
  double p1_error = 0.0;     // max |g_a(t) - L_a g_base(F^m t)| over representable checks
  int p1_checks = 0;
  double p2_margin = 0.0;    // min Re g_a(t) - C over I_T
  double length = 0.0;       // length of I_T(g_a)
  std::string error;         // branch or trace failure, empty if none
  bool pass(double tol) const { return error.empty() && p1_error < tol && p2_margin > 0; }
};

struct BoundedDomainReport {
  double T = 0.0, C = 0.0;
  double B = 0.0;      // max length of I_T over the prefixes
  double kappa = 0.0;  // B / (e^T - T), compared against the asymptotic bound
  std::vector<BoundedDomainRow> rows;
  bool pass(double p1_tol = 1e-8, double kappa_max = 2.0) const {
    for (const auto& r : rows)
      if (!r.pass(p1_tol)) return false;
    return kappa <= kappa_max;
  }
};

namespace detail {

// Length of the arc t -> g_s(t) for t in [t0, t1], sampled at geometric
// potentials and refined by doubling until the length settles.
inline double exp_arc_length(const MapSpec& m, const ExpAddress& s, double t0, double t1, const TraceConfig& cfg,
                             double* min_re = nullptr) {
  int n = 32;
  double prev = -1.0;
  for (int round = 0; round < 8; ++round, n *= 2) {
    Curve c;
    for (int k = 0; k <= n; ++k) {
      const double t = t0 * std::pow(t1 / t0, static_cast<double>(k) / n);
      c.points.push_back(exp_ray_point(m, s, t, cfg).z);
    }
    const double len = c.length();
    if (min_re) {
      double r = INFINITY;
      for (auto z : c.points) r = std::min(r, z.real());
      *min_re = r;
    }
    if (prev > 0 && std::abs(len - prev) <= 1e-10 * len) return len;
    prev = len;
  }
  return prev;
}

}  // namespace detail

/// Checks the pullback identity, the real-part floor and the uniform length
/// bound on I_T for each prefix a_m ... a_1 of the base address.
inline BoundedDomainReport bounded_fundamental_domains_check(const MapSpec& m, const ExpAddress& base,
                                                             const std::vector<std::vector<long>>& prefixes, double T,
                                                             double C, const TraceConfig& cfg = {}) {
  if (!m.is_exp()) throw ConfigError("bounded fundamental domains need an exponential map");
  const double K = cfg.K_for(m);
  if (!(T > 2.0 * std::log(K + 3.0))) throw ConfigError("T must exceed 2 log(K + 3)");
  if (!(C > m.c.real())) throw ConfigError("real-part floor C must exceed Re c");
  const GrowthModel F(m);
  const double FT = F.F(T);
  if (!std::isfinite(FT)) throw ConfigError("F(T) overflows; choose a smaller T");

  BoundedDomainReport rep;
  rep.T = T;
  rep.C = C;
  for (const auto& prefix : prefixes) {
    BoundedDomainRow row;
    row.prefix = prefix;
    ExpAddress a = base;
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) a = a.prepended(*it);
    row.address = a.str();
    try {
      // P1 at a few potentials of I_T, and at F^{1-m}(T) whose m-th image is
      // F(T); F^m(t) must stay representable.
      std::vector<double> checks{T, std::sqrt(T * FT), FT};
      if (prefix.size() > 1) checks.push_back(F.iterate(T, 1 - static_cast<int>(prefix.size())));
      for (double t : checks) {
        const double up = F.iterate(t, static_cast<int>(prefix.size()));
        if (!(up < 1e300)) continue;
        complex w = exp_ray_point(m, base, up, cfg).z;
        for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) w = inverse_branch_exp(m, *it, w);
        const complex direct = exp_ray_point(m, a, t, cfg).z;
        row.p1_error = std::max(row.p1_error, std::abs(w - direct) / std::max(1.0, std::abs(direct)));
        ++row.p1_checks;
      }
      double min_re = INFINITY;
      row.length = detail::exp_arc_length(m, a, T, FT, cfg, &min_re);
      row.p2_margin = min_re - C;
      rep.B = std::max(rep.B, row.length);
    } catch (const Error& e) {
      row.error = e.what();
    }
    rep.rows.push_back(row);
  }
  rep.kappa = rep.B / (std::exp(T) - T);
  return rep;
}

}  // namespace dynrays

#endif  // DYNRAYS_GEOMETRY_HPP

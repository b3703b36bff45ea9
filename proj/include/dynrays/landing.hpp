#ifndef DYNRAYS_LANDING_HPP
#define DYNRAYS_LANDING_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dynrays/bottcher.hpp"
#include "dynrays/curve.hpp"
#include "dynrays/error.hpp"
#include "dynrays/geometry.hpp"
#include "dynrays/growth.hpp"
#include "dynrays/maps.hpp"
#include "dynrays/rays.hpp"
#include "dynrays/symbolic.hpp"

namespace dynrays {

// ---------------------------------------------------------------------------
// Landing of a single ray

struct LandingConfig {
  TraceConfig trace;         // motion_tol <= 0 selects 1e-13
  int min_levels = 12;       // fitted levels required
  int min_levels_floor = 6;  // ... when the radii decay all the way to the noise floor
  double nu_margin = 0.05;   // nu > 1 + margin
  double r2_min = 0.99;
  double noise = 1e-11;      // radii below noise * max(1, |limit|) are not fitted
  int max_levels = 3000;
};

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  int n = 0;
};

/// Least squares y = intercept + slope x.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  f.n = static_cast<int>(x.size());
  if (f.n < 2) return f;
  double mx = 0, my = 0;
  for (int i = 0; i < f.n; ++i) mx += x[i], my += y[i];
  mx /= f.n;
  my /= f.n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < f.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

struct LandingVerdict {
  std::string coordinate;
  bool landed = false;
  complex point;            // limit estimate (set even when not landed)
  double A = 0.0, nu = 0.0; // I_{t_m} inside B(point, A / nu^m)
  double r2 = 0.0;
  int levels = 0;           // traced lattice levels
  int fitted_levels = 0;
  double final_motion = 0.0;
  std::vector<double> radii;  // r_m = max distance from the limit to the level-m arc
  std::string diagnostics;
};

namespace detail {

// Period of the eventual cycle of a coordinate's digits.
inline std::size_t tail_period(const DigitSequence& s) { return s.period().size(); }
inline std::size_t tail_period(const ExpAddress& s) { return s.period().size(); }

}  // namespace detail

/// Traces the ray down the potential lattice until consecutive levels move
/// less than the motion tolerance, estimates the limit, and fits the
/// geometric decay of the distances from the limit to successive
/// fundamental domains.
template <class Coord>
LandingVerdict land_ray(const MapSpec& m, const Coord& s, LandingConfig cfg = {}) {
  if (cfg.trace.motion_tol <= 0) cfg.trace.motion_tol = 1e-13;
  cfg.trace.max_levels = std::max(cfg.trace.max_levels, cfg.max_levels);
  LandingVerdict v;
  v.coordinate = detail::coordinate_text(s);
  RayFamily<Coord> fam(m, s, cfg.trace);
  // The floor is not respected: slowly contracting cycles need hundreds of
  // levels, far below any fixed potential floor.
  fam.descend_to(cfg.max_levels, false);
  const int L = fam.levels();
  const int S = fam.lattice().substeps();
  v.levels = L;
  v.final_motion = fam.last_motion();
  const bool converged = v.final_motion < cfg.trace.motion_tol;

  // Aitken extrapolation on endpoints one tail period apart.
  const int p = static_cast<int>(detail::tail_period(s));
  v.point = fam.point(0, L - 1);
  if (L > 2 * p) {
    const complex a = fam.point(0, L - 1 - 2 * p), b = fam.point(0, L - 1 - p), c = fam.point(0, L - 1);
    const complex d1 = b - a, d2 = c - b, den = d2 - d1;
    if (std::abs(den) > 1e-3 * std::abs(d2) && std::abs(d2) > 0) v.point = c - d2 * d2 / den;
  }

  // r_m over the arc from level m down to the first sample of level m + 1.
  for (int lev = 0; lev + 1 < L; ++lev) {
    double r = std::abs(fam.point(0, lev + 1) - v.point);
    for (int j = 0; j < S; ++j) r = std::max(r, std::abs(fam.point(0, lev, j) - v.point));
    v.radii.push_back(r);
  }
  const double floor_r = cfg.noise * std::max(1.0, std::abs(v.point));
  std::vector<int> valid;
  for (int lev = 0; lev < static_cast<int>(v.radii.size()); ++lev)
    if (v.radii[lev] > floor_r) valid.push_back(lev);
  // Fast rays reach the noise floor in few levels; the decay is then seen
  // in full and a shorter fit suffices.
  const bool reached_floor = !valid.empty() && valid.back() + 1 < static_cast<int>(v.radii.size());
  const std::size_t need = static_cast<std::size_t>(reached_floor ? std::min(cfg.min_levels, cfg.min_levels_floor) : cfg.min_levels);
  std::vector<double> xs, ys;
  // Skip the pre-asymptotic first third, unless that leaves too few levels.
  const std::size_t skip = std::min(valid.size() / 3, valid.size() > need ? valid.size() - need : 0);
  for (std::size_t i = skip; i < valid.size(); ++i) {
    xs.push_back(valid[i]);
    ys.push_back(std::log(v.radii[valid[i]]));
  }
  const LinearFit fit = linear_fit(xs, ys);
  v.fitted_levels = fit.n;
  v.r2 = fit.r2;
  v.nu = std::exp(-fit.slope);
  for (int lev = 0; lev < static_cast<int>(v.radii.size()); ++lev)
    v.A = std::max(v.A, v.radii[lev] * std::pow(v.nu, lev));

  std::vector<std::string> why;
  if (!converged) why.push_back(fam.truncated() ? "trace truncated: " + fam.truncation_reason() : "motion tolerance not reached");
  if (static_cast<std::size_t>(fit.n) < need) why.push_back("only " + std::to_string(fit.n) + " levels above the noise floor");
  if (!(v.nu > 1.0 + cfg.nu_margin)) why.push_back("fitted rate nu = " + std::to_string(v.nu) + " too small");
  if (!(fit.r2 > cfg.r2_min)) why.push_back("regression R^2 = " + std::to_string(fit.r2) + " too small");
  v.landed = why.empty();
  for (const auto& w : why) v.diagnostics += (v.diagnostics.empty() ? "" : "; ") + w;
  return v;
}

inline LandingVerdict land_ray(const MapSpec& m, const PolyAngle& a, const LandingConfig& cfg = {}) {
  if (a.base() != m.degree) throw ConfigError("angle base differs from the degree");
  auto v = land_ray(m, a.digits(), cfg);
  v.coordinate = a.str();
  return v;
}

// ---------------------------------------------------------------------------
// Ray arcs carried through inverse branches

namespace detail {

// Exact evaluation of the ray near the top of the lattice and the digit of a
// pulled-back arc, per coordinate system.
template <class Coord>
struct ArcTraits;

template <>
struct ArcTraits<DigitSequence> {
  static complex top_point(const MapSpec& m, const DigitSequence& s, double t, const TraceConfig&) {
    return bottcher_inverse_high(m, std::exp(complex(t, kTwoPi * s.to_double())));
  }
  static complex preimage(const MapSpec& m, complex w, complex near) { return preimage_near(m, w, near); }
  // The digit j with (s + j) / D nearest the Böttcher angle of the top sample,
  // and independently the j whose candidate ray point is nearest that sample.
  static std::pair<int, int> digits(const MapSpec& m, const DigitSequence& s, double t_top, complex z_top) {
    const int D = m.degree;
    const double theta = detail::log_bottcher_product(m, z_top).imag() / kTwoPi;
    const double th = s.to_double();
    int by_angle = 0, by_point = 0;
    double best_a = INFINITY, best_p = INFINITY;
    for (int j = 0; j < D; ++j) {
      const double cand = (th + j) / D;
      const double da = circle_distance(cand, theta - std::floor(theta));
      if (da < best_a) best_a = da, by_angle = j;
      const complex pj = bottcher_inverse_high(m, std::exp(complex(t_top, kTwoPi * cand)));
      const double dp = std::abs(pj - z_top);
      if (dp < best_p) best_p = dp, by_point = j;
    }
    return {by_angle, by_point};
  }
};

template <>
struct ArcTraits<ExpAddress> {
  static complex top_point(const MapSpec& m, const ExpAddress& s, double t, const TraceConfig& cfg) {
    return exp_ray_point(m, s, t, cfg).z;
  }
  static complex preimage(const MapSpec& m, complex w, complex near) {
    const long n = std::lround((near.imag() - std::arg(w - m.c)) / kTwoPi);
    return inverse_branch_exp(m, n, w);
  }
  // Strip index of the top sample, and the nearest integer to Im / 2 pi.
  static std::pair<int, int> digits(const MapSpec&, const ExpAddress&, double, complex z_top) {
    return {static_cast<int>(strip_index(z_top)), static_cast<int>(std::lround(z_top.imag() / kTwoPi))};
  }
};

}  // namespace detail

/// A piece of the ray of `coord` sampled on lattice potentials from some
/// bottom potential up to the lattice top. Pulling it back through one
/// inverse branch keeps it a ray arc: the bottom sample goes to the preimage
/// nearest a reference point, the rest follows by continuation, the new digit
/// is read off the top sample, and the top level is re-filled exactly.
template <class Coord>
class RayArc {
 public:
  RayArc(MapSpec m, Coord s, const PotentialLattice& lattice, TraceConfig cfg)
      : map_(m), coord_(std::move(s)), lattice_(lattice), cfg_(cfg) {}

  /// The arc of a traced segment from potential t_bottom (a lattice sample) up.
  static RayArc from_segment(const RaySegment& seg, const Coord& s, const PotentialLattice& lattice, double t_bottom,
                             const TraceConfig& cfg) {
    RayArc a(seg.map, s, lattice, cfg);
    for (const auto& smp : seg.samples)
      if (smp.t >= t_bottom * (1 - 1e-12)) {
        a.t_.push_back(smp.t);
        a.z_.push_back(smp.z);
      }
    if (a.t_.empty()) throw DomainError("ray arc: bottom potential above the traced range");
    return a;
  }

  const Coord& coordinate() const { return coord_; }
  const std::vector<double>& potentials() const { return t_; }
  const std::vector<complex>& points() const { return z_; }
  double bottom_potential() const { return t_.front(); }
  complex bottom() const { return z_.front(); }

  /// Returns the digit prepended; `coherent` reports whether the two digit
  /// readings agreed.
  int pull_back(complex bottom_ref, bool* coherent = nullptr) {
    const GrowthModel F(map_);
    std::vector<complex> nz(z_.size());
    nz[0] = detail::ArcTraits<Coord>::preimage(map_, z_[0], bottom_ref);
    for (std::size_t k = 1; k < z_.size(); ++k) nz[k] = detail::ArcTraits<Coord>::preimage(map_, z_[k], nz[k - 1]);
    for (auto& t : t_) t = F.Finv(t);
    const auto [digit, check] = detail::ArcTraits<Coord>::digits(map_, coord_, t_.back(), nz.back());
    if (coherent) *coherent = digit == check;
    coord_ = coord_.prepended(digit);
    z_ = std::move(nz);
    // Re-fill the top level exactly.
    const auto top = lattice_.level(0);
    for (auto it = top.rbegin(); it != top.rend(); ++it) {
      if (*it <= t_.back() * (1 + 1e-12)) continue;
      t_.push_back(*it);
      z_.push_back(detail::ArcTraits<Coord>::top_point(map_, coord_, *it, cfg_));
    }
    return digit;
  }

  /// Samples with potential in [lo, hi].
  Curve piece(double lo, double hi) const {
    Curve c;
    for (std::size_t k = 0; k < t_.size(); ++k)
      if (t_[k] >= lo * (1 - 1e-12) && t_[k] <= hi * (1 + 1e-12)) c.points.push_back(z_[k]);
    return c;
  }

 private:
  MapSpec map_;
  Coord coord_;
  PotentialLattice lattice_;
  TraceConfig cfg_;
  std::vector<double> t_;
  std::vector<complex> z_;
};

// ---------------------------------------------------------------------------
// Pullback construction at a repelling periodic point

struct PullbackConfig {
  TraceConfig trace;
  LandingConfig landing;
  int budget = 48;              // pullback iterations
  int seed_budget = 60;         // forward iterations of the cloud
  int seed_attempts = 400;
  std::size_t window = 64;      // cycle detection window
  int cloud_rings = 40;
  int cloud_spokes = 32;
  double landing_tol = 1e-6;
  int profile_depth = 3;        // pullback family depth for the shrinking profile
  long profile_bound = 2;       // |entries| of exponential prefixes
  int profile_levels = 24;
  double identity_tol = 1e-8;
  double noise = 1e-11;         // containment radii below this (relative) are not fitted
  double max_radius = 0.0;      // cap on the radius of U' (0 = none)
  int probe_iterations = 10000; // postsingular probe (exponential); 0 skips it
  double probe_radius = 10.0;
};

struct LandingSet {
  PeriodicPoint point;
  MapKind kind = MapKind::Polynomial;
  std::vector<PolyAngle> angles;       // polynomial coordinates
  std::vector<ExpAddress> addresses;   // exponential coordinates
  int period = 0;                      // common period of the coordinates
  std::vector<LandingVerdict> verdicts;
  std::vector<double> landing_errors;  // |landing point - target|

  std::size_t size() const { return kind == MapKind::Polynomial ? angles.size() : addresses.size(); }
  std::vector<std::string> coordinates() const {
    std::vector<std::string> out;
    if (kind == MapKind::Polynomial)
      for (const auto& a : angles) out.push_back(a.str());
    else
      for (const auto& a : addresses) out.push_back(a.str());
    return out;
  }
  bool verified(double tol) const {
    if (verdicts.size() != size() || size() == 0) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (!verdicts[i].landed || !(landing_errors[i] < tol)) return false;
    return true;
  }
};

struct PullbackRun {
  PeriodicPoint target;
  LinearizationData chart;
  double radius_U_prime = 0.0, radius_U = 0.0, eps = 0.0;
  double t_eps = 0.0;
  ShrinkProfile profile;
  std::string base_coordinate;
  std::string seed_coordinate;
  complex seed_point;
  double t0 = 0.0;
  int seed_forward_steps = 0;
  int seed_attempts = 0;
  std::vector<std::string> history;            // s_n, n = 0..budget
  std::vector<std::vector<long>> blocks;       // digits prepended by each pullback, in reading order
  std::vector<double> curve_max_distance;      // sup |gamma_n - target|
  std::vector<double> containment_radii;       // per fundamental piece m of the final curve
  LinearFit containment_fit;
  double expected_slope = 0.0;                 // -log mu
  double containment_constant = 0.0;           // max radius(m) mu^m / diam U'
  double identity_error = 0.0;                 // traced ray vs pulled-back curve
  int identity_checks = 0;
  bool coherent = true;                        // digit readings agreed at every step
  bool shift_consistent = true;                // sigma^{p n} s_n == s_0 for every n
  std::optional<PostsingularReport> postsingular;
  int coherence_checks = 0;
  std::size_t cycle_period = 0;                // in pullback iterations
  long M = 0;                                  // address bound (exponential)
  long max_sup_norm = 0;                       // over the history (exponential)
  std::vector<Curve> curves;                   // gamma_n
};

namespace detail {

inline double distance_to_polyline(complex p, const Curve& c) {
  double best = INFINITY;
  if (c.points.size() == 1) return std::abs(p - c.points[0]);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const complex a = c.points[i - 1], d = c.points[i] - a;
    const double len2 = std::norm(d);
    double s = len2 > 0 ? std::real((p - a) * std::conj(d)) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, std::abs(a + s * d - p));
  }
  return best;
}

constexpr double kFarExp = 600.0;

// Potential of a point in the far region (Böttcher domain, or far right
// half-plane where g_s(t) = t + 2 pi i s_0 up to tiny errors), else NaN.
inline double far_potential(const MapSpec& m, complex z) {
  if (m.is_poly()) {
    if (!(std::abs(z) >= 4 * detail::product_radius(m)) || !(std::abs(z) < 1e150)) return NAN;
    return detail::log_bottcher_product(m, z).real();
  }
  return z.real() > 20.0 && z.real() < kFarExp ? z.real() : NAN;
}

// Escape test for the forward cloud.
inline bool escaped(const MapSpec& m, complex z) {
  return m.is_poly() ? !(std::abs(z) < 1e8) : !(z.real() < 50.0 && std::abs(z.imag()) < 1e8);
}

template <class Coord>
Coord default_base(const MapSpec& m);
template <>
inline DigitSequence default_base<DigitSequence>(const MapSpec& m) {
  return DigitSequence(m.degree, {}, {0});
}
template <>
inline ExpAddress default_base<ExpAddress>(const MapSpec&) {
  return ExpAddress::constant(0);
}

template <class Coord>
std::vector<Coord> profile_family(const Coord& base, int depth, long bound, int degree);
template <>
inline std::vector<DigitSequence> profile_family<DigitSequence>(const DigitSequence& base, int depth, long, int degree) {
  std::vector<DigitSequence> out{base}, layer{base};
  for (int d = 0; d < depth; ++d) {
    std::vector<DigitSequence> next;
    for (const auto& s : layer)
      for (int j = 0; j < degree; ++j) next.push_back(s.prepended(j));
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}
template <>
inline std::vector<ExpAddress> profile_family<ExpAddress>(const ExpAddress& base, int depth, long bound, int) {
  return pullback_family(base, depth, bound);
}

inline ShrinkProfile profile_for(const MapSpec& m, const std::vector<DigitSequence>& fam, const std::vector<double>& grid,
                                 const Window& K, const TraceConfig& cfg) {
  std::vector<PolyAngle> angles;
  for (const auto& s : fam) angles.push_back(PolyAngle::from_digits(s));
  return shrinking_profile(m, angles, grid, K, cfg);
}
inline ShrinkProfile profile_for(const MapSpec& m, const std::vector<ExpAddress>& fam, const std::vector<double>& grid,
                                 const Window& K, const TraceConfig& cfg) {
  return shrinking_profile(m, fam, grid, K, cfg);
}

inline complex independent_point(const MapSpec& m, const DigitSequence& s, double t, const TraceConfig&) {
  return newton_ray_at(m, AngleOrbit::from(s), t);
}
inline complex independent_point(const MapSpec& m, const ExpAddress& s, double t, const TraceConfig& cfg) {
  return exp_ray_point(m, s, t, cfg).z;
}

// The periodic coordinate whose period reads `digits`.
inline DigitSequence periodic_from(const std::vector<long>& digits, int base, DigitSequence*) {
  return DigitSequence(base, {}, std::vector<int>(digits.begin(), digits.end()));
}
inline ExpAddress periodic_from(const std::vector<long>& digits, int, ExpAddress*) { return ExpAddress({}, digits); }

inline long address_norm(const DigitSequence&) { return 0; }
inline long address_norm(const ExpAddress& s) { return s.sup_norm(); }

/// Steps (i) to (v) of the pullback construction for one coordinate system.
template <class Coord>
std::pair<LandingSet, PullbackRun> pullback_impl(const MapSpec& m, const PeriodicPoint& target, const Coord& base,
                                                 const PullbackConfig& cfg) {
  if (!target.repelling()) throw ConfigError("pullback construction needs a repelling periodic point");
  PullbackRun run;
  run.target = target;
  if (m.is_exp() && cfg.probe_iterations > 0) {
    run.postsingular = postsingular_probe(m, cfg.probe_iterations, cfg.probe_radius);
    if (!run.postsingular->bounded) throw ConfigError("postsingular probe: the orbit of c leaves the probe radius");
  }
  run.base_coordinate = coordinate_text(base);
  const complex alpha = target.location;
  const int p = target.period;
  const double mu = target.modulus();
  const GrowthModel F(m);
  TraceConfig tcfg = cfg.trace;
  // Escaping cloud orbits of exponential maps jump far past the default top,
  // so arcs reach up to the end of the far region.
  if (m.is_exp()) tcfg.top = std::max(tcfg.top_for(m), detail::kFarExp);
  const PotentialLattice lattice(m, tcfg.top_for(m), tcfg.substeps);

  // (i) U' inside the linearization chart, U = psi(U') as a bounding ball.
  const CycleInverse psi(m, target);
  run.chart = linearization_fit(m, target);
  run.radius_U_prime = run.chart.radius / 2;
  if (cfg.max_radius > 0) run.radius_U_prime = std::min(run.radius_U_prime, cfg.max_radius);
  for (int k = 0; k < 64; ++k) {
    const complex b = alpha + std::polar(run.radius_U_prime, kTwoPi * k / 64);
    run.radius_U = std::max(run.radius_U, std::abs(psi(b) - alpha));
  }
  run.eps = run.radius_U_prime - run.radius_U;
  if (!(run.eps > 0)) throw NumericalError("pullback: psi(U') is not inside U'");

  // (ii) t_eps from the shrinking profile of a pullback family near U'.
  std::vector<double> grid;
  for (int k = 0; k < cfg.profile_levels; ++k) grid.push_back(lattice.potential(k, 0));
  const auto family = profile_family(base, cfg.profile_depth, cfg.profile_bound, m.degree);
  run.profile = profile_for(m, family, grid, Window{alpha, run.radius_U_prime}, tcfg);
  // I_t for F^p spans p domains of F, so each must be shorter than eps / p
  // and the last of them starts at F^{p-1}(t).
  run.t_eps = run.profile.t_eps(run.eps / p);
  if (std::isnan(run.t_eps)) throw NumericalError("pullback: no potential with fundamental domains shorter than eps");
  run.t_eps = F.iterate(run.t_eps, 1 - p);

  // (iii) Seed: forward-image a cloud in U until an orbit reaches the far
  // region, where its potential is readable, then pull the base ray sample
  // of matching potential back along that orbit. Whatever branches the orbit
  // selects, the result is an arc of a preimage ray; it is kept once it
  // passes the checks in U.
  const double t_eps = run.t_eps;
  TraceConfig base_cfg = tcfg;
  base_cfg.floor = F.Finv(t_eps) * (1 - 1e-9);
  RayFamily<Coord> base_fam(m, base, base_cfg);
  base_fam.descend_to(base_cfg.max_levels);
  const RaySegment base_seg = base_fam.segment(0);
  if (base_seg.samples.empty()) throw NumericalError("pullback: base ray not traced");

  std::vector<complex> cloud;
  for (int r = 0; r < cfg.cloud_rings; ++r)
    for (int k = 0; k < cfg.cloud_spokes; ++k)
      cloud.push_back(alpha + std::polar(0.9 * run.radius_U * std::pow(0.5, 0.5 * r),
                                         kTwoPi * (k + 0.5 * (r % 2)) / cfg.cloud_spokes));
  std::vector<std::vector<complex>> orbits(cloud.size());
  std::vector<bool> done(cloud.size(), false);
  for (std::size_t i = 0; i < cloud.size(); ++i) orbits[i].push_back(cloud[i]);

  std::optional<RayArc<Coord>> arc;
  int attempts = 0;
  for (int k = 1; k <= cfg.seed_budget && !arc && attempts < cfg.seed_attempts; ++k) {
    for (std::size_t i = 0; i < cloud.size() && !arc && attempts < cfg.seed_attempts; ++i) {
      auto& orb = orbits[i];
      if (done[i]) continue;
      try {
        orb.push_back(dynrays::apply(m, orb.back()));
      } catch (const NumericalError&) {
        done[i] = true;
        continue;
      }
      const double t_far = far_potential(m, orb.back());
      if (std::isnan(t_far)) {
        if (escaped(m, orb.back())) done[i] = true;
        continue;
      }
      done[i] = true;
      // Base sample nearest in potential, at or above t_eps.
      const RaySample* ref = nullptr;
      for (const auto& smp : base_seg.samples)
        if (smp.t >= t_eps && (!ref || std::abs(smp.t - t_far) < std::abs(ref->t - t_far))) ref = &smp;
      if (!ref) continue;
      ++attempts;
      try {
        auto cand = RayArc<Coord>::from_segment(base_seg, base, lattice, ref->t, tcfg);
        for (int step = k - 1; step >= 0; --step) cand.pull_back(orb[step]);
        const double t0 = cand.bottom_potential();
        const Curve I0 = cand.piece(t0, F.iterate(t0, p));
        const bool ok = t0 < t_eps && std::abs(cand.bottom() - alpha) < run.radius_U && I0.length() < run.eps &&
                        I0.max_distance_to(alpha) < run.radius_U_prime;
        if (ok) {
          arc = std::move(cand);
          run.seed_forward_steps = k;
        }
      } catch (const Error&) {
        continue;
      }
    }
  }
  run.seed_attempts = attempts;
  if (!arc) throw NumericalError("pullback: seed search exhausted its budget");
  run.t0 = arc->bottom_potential();
  run.seed_point = arc->bottom();
  run.seed_coordinate = coordinate_text(arc->coordinate());
  const double top_gamma = F.iterate(run.t0, p);

  // (iv) gamma_n = psi(gamma_{n-1}) u I_{t_0}(g_{s_n}).
  std::vector<Coord> history{arc->coordinate()};
  run.history.push_back(coordinate_text(arc->coordinate()));
  run.curves.push_back(arc->piece(run.t0, top_gamma));
  run.curve_max_distance.push_back(run.curves.back().max_distance_to(alpha));
  std::vector<std::vector<long>> blocks;
  // Independent evaluation at the top, middle and bottom of gamma's top
  // piece; an oracle that does not converge is skipped, not counted.
  auto identity_check = [&](const RayArc<Coord>& a) {
    const auto& ts = a.potentials();
    const auto& zs = a.points();
    for (double t : {top_gamma, std::sqrt(top_gamma * run.t0), run.t0}) {
      std::size_t k = 0;
      for (std::size_t j = 0; j < ts.size(); ++j)
        if (std::abs(ts[j] - t) < std::abs(ts[k] - t)) k = j;
      try {
        const complex w = independent_point(m, a.coordinate(), ts[k], tcfg);
        run.identity_error = std::max(run.identity_error, std::abs(w - zs[k]) / std::max(1.0, std::abs(w)));
        ++run.identity_checks;
      } catch (const NumericalError&) {
      }
    }
  };
  identity_check(*arc);
  for (int n = 1; n <= cfg.budget; ++n) {
    std::vector<long> block;
    for (int i = p - 1; i >= 0; --i) {
      bool coherent = true;
      block.insert(block.begin(), arc->pull_back(target.orbit[i], &coherent));
      run.coherent = run.coherent && coherent;
      ++run.coherence_checks;
    }
    blocks.push_back(block);
    history.push_back(arc->coordinate());
    run.history.push_back(coordinate_text(arc->coordinate()));
    run.curves.push_back(arc->piece(arc->bottom_potential(), top_gamma));
    run.curve_max_distance.push_back(run.curves.back().max_distance_to(alpha));
    if (!(run.curve_max_distance.back() < run.radius_U_prime))
      throw NumericalError("pullback: gamma_" + std::to_string(n) + " leaves U'");
    if (n == 1 || n == cfg.budget / 2 || n == cfg.budget) identity_check(*arc);
  }
  run.blocks = blocks;
  for (std::size_t n = 0; n < history.size(); ++n) {
    Coord back = history[n];
    for (std::size_t k = 0; k < n * static_cast<std::size_t>(p); ++k) back = back.shifted();
    run.shift_consistent = run.shift_consistent && back == history.front();
  }

  // Containment radii of the final curve, piece m = g([t_m, t_{m-1}]).
  double hi = top_gamma;
  for (int k = 0; k <= cfg.budget; ++k) {
    const double lo = F.iterate(run.t0, -p * k);
    run.containment_radii.push_back(arc->piece(lo, hi).max_distance_to(alpha));
    hi = lo;
  }
  {
    std::vector<double> xs, ys;
    const double floor_r = cfg.noise * std::max(1.0, std::abs(alpha));
    for (std::size_t k = 0; k < run.containment_radii.size(); ++k)
      if (run.containment_radii[k] > floor_r) {
        xs.push_back(static_cast<double>(k));
        ys.push_back(std::log(run.containment_radii[k]));
      }
    run.containment_fit = linear_fit(xs, ys);
    run.expected_slope = -std::log(mu);
    for (double k : xs)
      run.containment_constant = std::max(run.containment_constant, run.containment_radii[static_cast<std::size_t>(k)] *
                                                                        std::pow(mu, k) / (2 * run.radius_U_prime));
  }

  // (v) The prepended blocks cycle; each phase of the cycle is a limit
  // coordinate, read newest block first.
  const auto cyc = detect_cycle(blocks, cfg.window);
  if (!cyc) throw NumericalError("pullback: coordinate cycle not detected within the window");
  run.cycle_period = cyc->period;
  const auto& reps = cyc->representatives;  // oldest first
  const std::size_t q = reps.size();
  std::vector<Coord> limits;
  for (std::size_t phase = 0; phase < q; ++phase) {
    std::vector<long> digits;
    for (std::size_t k = 0; k < q; ++k) {
      const auto& b = reps[(q - 1 - k + q - phase) % q];
      digits.insert(digits.end(), b.begin(), b.end());
    }
    const Coord lim = periodic_from(digits, m.degree, static_cast<Coord*>(nullptr));
    if (std::find(limits.begin(), limits.end(), lim) == limits.end()) limits.push_back(lim);
  }
  std::sort(limits.begin(), limits.end());

  if constexpr (std::is_same_v<Coord, ExpAddress>) {
    // Address bound from the imaginary extent of U' around the cycle, the
    // base and the seed.
    double im = 0.0;
    for (complex x : target.orbit) im = std::max(im, std::abs(x.imag()) + run.radius_U_prime);
    run.M = std::max({base.sup_norm(), history.front().sup_norm(), static_cast<long>(std::ceil((im + kPi) / kTwoPi))});
    for (const auto& h : history) run.max_sup_norm = std::max(run.max_sup_norm, h.sup_norm());
  }

  LandingSet set;
  set.point = target;
  set.kind = m.kind;
  for (const auto& c : limits) {
    LandingVerdict v = land_ray(m, c, cfg.landing);
    set.landing_errors.push_back(std::abs(v.point - alpha));
    set.verdicts.push_back(v);
    if constexpr (std::is_same_v<Coord, DigitSequence>) {
      set.angles.push_back(PolyAngle::from_digits(c));
      set.verdicts.back().coordinate = set.angles.back().str();
    } else {
      set.addresses.push_back(c);
    }
    set.period = std::max(set.period, static_cast<int>(c.period().size()));
  }
  return {set, run};
}

}  // namespace detail

/// Runs the pullback construction at a repelling periodic point. The base
/// ray defaults to angle 0 (polynomial) or the address of zeros (exponential).
inline std::pair<LandingSet, PullbackRun> pullback_landing(const MapSpec& m, const PeriodicPoint& target,
                                                           const PullbackConfig& cfg = {}) {
  if (m.is_poly()) return detail::pullback_impl(m, target, detail::default_base<DigitSequence>(m), cfg);
  return detail::pullback_impl(m, target, detail::default_base<ExpAddress>(m), cfg);
}

inline std::pair<LandingSet, PullbackRun> pullback_landing(const MapSpec& m, const PeriodicPoint& target,
                                                           const PolyAngle& base, const PullbackConfig& cfg = {}) {
  return detail::pullback_impl(m, target, base.digits(), cfg);
}

inline std::pair<LandingSet, PullbackRun> pullback_landing(const MapSpec& m, const PeriodicPoint& target,
                                                           const ExpAddress& base, const PullbackConfig& cfg = {}) {
  return detail::pullback_impl(m, target, base, cfg);
}

// ---------------------------------------------------------------------------
// Landing set audit

struct AuditConfig {
  std::size_t max_rays = 16;   // cap on the number of rays at one point
  double rotation_tol = 1e-6;  // rotated rays must land within this of the rotated point
  bool check_rotations = true;
  LandingConfig landing;
};

struct LandingSetAudit {
  bool cycle_ok = true;        // one period, closed under sigma^p
  bool adjacency_ok = true;    // exponential adjacency / polynomial distance <= 1/D
  bool cardinality_ok = true;
  bool rotation_ok = true;
  int rotations_checked = 0;
  std::vector<std::string> violations;
  bool pass() const { return cycle_ok && adjacency_ok && cardinality_ok && rotation_ok; }
};

namespace detail {

template <class Coord>
bool closed_under(const std::vector<Coord>& set, int p, std::vector<std::string>& why) {
  bool ok = true;
  for (const auto& c : set) {
    Coord img = c;
    for (int k = 0; k < p; ++k) img = shift(img);
    if (std::find(set.begin(), set.end(), img) == set.end()) {
      why.push_back("sigma^" + std::to_string(p) + " maps a coordinate outside the set");
      ok = false;
    }
  }
  return ok;
}

}  // namespace detail

/// Checks a landing set against the constraints rays landing together must
/// satisfy. Violations are listed, never thrown.
inline LandingSetAudit landing_set_audit(const LandingSet& set, const MapSpec& m, const AuditConfig& cfg = {}) {
  LandingSetAudit rep;
  auto& why = rep.violations;
  const int p = set.point.period;

  if (set.size() > cfg.max_rays) {
    rep.cardinality_ok = false;
    why.push_back(std::to_string(set.size()) + " rays exceed the cap of " + std::to_string(cfg.max_rays));
  }

  if (set.kind == MapKind::Polynomial) {
    std::size_t common = 0;
    for (const auto& a : set.angles) {
      const auto [pre, per] = a.preperiod_period();
      if (pre != 0) rep.cycle_ok = false, why.push_back(a.str() + " is not periodic");
      if (common == 0) common = per;
      if (per != common) rep.cycle_ok = false, why.push_back(a.str() + " has a different period");
    }
    if (set.period != 0 && common != 0 && static_cast<std::size_t>(set.period) != common)
      rep.cycle_ok = false, why.push_back("stated period differs from the coordinates'");
    if (!detail::closed_under(set.angles, p, why)) rep.cycle_ok = false;

    const Rational bound(1, m.degree);
    for (std::size_t i = 0; i < set.angles.size(); ++i)
      for (std::size_t j = i + 1; j < set.angles.size(); ++j)
        if (circle_distance(set.angles[i], set.angles[j]) > bound) {
          rep.adjacency_ok = false;
          why.push_back(set.angles[i].str() + " and " + set.angles[j].str() + " are farther apart than 1/D");
        }

    // z -> e^{2 pi i j / D} z commutes with z^D + c and rotates angles by j / D.
    if (cfg.check_rotations && m.is_poly()) {
      for (const auto& a : set.angles)
        for (int j = 1; j < m.degree; ++j) {
          const PolyAngle r(a.value() + Rational(j, m.degree), m.degree);
          const complex target = std::polar(1.0, kTwoPi * j / m.degree) * set.point.location;
          const LandingVerdict v = land_ray(m, r, cfg.landing);
          ++rep.rotations_checked;
          if (!v.landed || !(std::abs(v.point - target) < cfg.rotation_tol)) {
            rep.rotation_ok = false;
            why.push_back("rotated angle " + r.str() + " does not land at the rotated point");
          }
        }
    }
  } else {
    std::size_t common = 0;
    for (const auto& s : set.addresses) {
      if (!s.preperiod().empty()) rep.cycle_ok = false, why.push_back(s.str() + " is not periodic");
      if (common == 0) common = s.period().size();
      if (s.period().size() != common) rep.cycle_ok = false, why.push_back(s.str() + " has a different period");
    }
    if (set.period != 0 && common != 0 && static_cast<std::size_t>(set.period) != common)
      rep.cycle_ok = false, why.push_back("stated period differs from the coordinates'");
    if (!detail::closed_under(set.addresses, p, why)) rep.cycle_ok = false;
    for (std::size_t i = 0; i < set.addresses.size(); ++i)
      for (std::size_t j = i + 1; j < set.addresses.size(); ++j)
        if (!adjacency_compatible(set.addresses[i], set.addresses[j])) {
          rep.adjacency_ok = false;
          why.push_back(set.addresses[i].str() + " and " + set.addresses[j].str() + " differ by more than one in some entry");
        }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Accessibility of a hyperbolic set given by samples

/// A finite sample of a hyperbolic set with its expansion data: |(f^k)'| > eta
/// on the delta-neighbourhood of the samples.
struct HyperbolicSetSpec {
  std::vector<complex> samples;
  double eta = 1.5;
  double delta = 0.05;
  int k = 1;
  int rings = 4, spokes = 16;  // validation grid in each delta-disk
};

struct HyperbolicValidation {
  double min_expansion = INFINITY;  // min |(f^k)'| over samples and grid
  bool expanding = false;
  bool invariant = false;           // f(sample) lies in the cover
  std::size_t cover_size = 0;
  double cover_radius = 0.0;        // delta / (3 eta)
  std::vector<std::string> problems;
};

struct AccessPoint {
  complex x0;
  std::vector<complex> orbit;   // x_0 .. x_{n0 + q}
  int preperiod = 0;            // n0: x_{n0} is the first periodic point of the orbit
  int period = 0;               // q
  LandingSet set;               // rays landing at x0
  std::optional<PullbackRun> run;  // run at x_{n0}
  std::vector<double> ladder_margin;  // log(delta / eta^m) - log(radius m), per piece
  bool ladder_ok = false;
  long max_sup_norm = 0;
  bool landed = false;
};

struct AccessibilityReport {
  HyperbolicValidation validation;
  std::vector<AccessPoint> points;
  long M = 0;  // address bound over all points (exponential)
  bool pass() const {
    if (!validation.expanding || !validation.invariant || points.empty()) return false;
    for (const auto& p : points)
      if (!p.ladder_ok || !p.landed || p.max_sup_norm > M) return false;
    return true;
  }
};

inline complex iterate_derivative(const MapSpec& m, complex z, int k) {
  complex d = 1.0;
  for (int i = 0; i < k; ++i) {
    d *= derivative(m, z);
    z = dynrays::apply(m, z);
  }
  return d;
}

/// Checks the expansion hypothesis on a grid around every sample and builds
/// the delta / (3 eta) cover; forward invariance is checked on the cover.
inline HyperbolicValidation validate_hyperbolic_set(const MapSpec& m, const HyperbolicSetSpec& spec) {
  HyperbolicValidation v;
  if (spec.samples.empty()) throw ConfigError("hyperbolic set needs at least one sample");
  if (!(spec.eta > 1) || !(spec.delta > 0) || spec.k < 1) throw ConfigError("hyperbolic set needs eta > 1, delta > 0, k >= 1");
  for (complex x : spec.samples) {
    v.min_expansion = std::min(v.min_expansion, std::abs(iterate_derivative(m, x, spec.k)));
    for (int r = 1; r <= spec.rings; ++r)
      for (int j = 0; j < spec.spokes; ++j) {
        const complex z = x + std::polar(spec.delta * r / spec.rings, kTwoPi * j / spec.spokes);
        v.min_expansion = std::min(v.min_expansion, std::abs(iterate_derivative(m, z, spec.k)));
      }
  }
  v.expanding = v.min_expansion > spec.eta;
  if (!v.expanding) v.problems.push_back("expansion " + std::to_string(v.min_expansion) + " does not exceed eta");

  // Greedy cover of the samples by balls of radius delta / (3 eta).
  v.cover_radius = spec.delta / (3 * spec.eta);
  std::vector<complex> centres;
  for (complex x : spec.samples) {
    bool covered = false;
    for (complex c : centres) covered = covered || std::abs(x - c) < v.cover_radius;
    if (!covered) centres.push_back(x);
  }
  v.cover_size = centres.size();
  v.invariant = true;
  for (complex x : spec.samples) {
    const complex fx = dynrays::apply(m, x);
    bool inside = false;
    for (complex c : centres) inside = inside || std::abs(fx - c) < v.cover_radius;
    if (!inside) {
      v.invariant = false;
      v.problems.push_back("the image of a sample leaves the cover (samples too sparse for delta)");
    }
  }
  return v;
}

namespace detail {

// Pulls the landing ray of `s` at f^n(x0) back along the orbit to x0.
template <class Coord>
Coord pull_ray_back(const MapSpec& m, const Coord& s, const std::vector<complex>& orbit, int n, const TraceConfig& cfg) {
  RayFamily<Coord> fam(m, s, cfg);
  fam.descend_to(cfg.max_levels);
  const RaySegment seg = fam.segment(0);
  // Start near the landing point so branch choices follow the orbit.
  RayArc<Coord> arc = RayArc<Coord>::from_segment(seg, s, fam.lattice(), seg.samples.front().t, cfg);
  for (int i = n - 1; i >= 0; --i) arc.pull_back(orbit[i]);
  return arc.coordinate();
}

}  // namespace detail

/// For each sample: follows the orbit until it recurs in the cover, runs the
/// pullback construction with ladder radii delta / eta^m at the periodic part,
/// and pulls the resulting rays back to the sample when it is preperiodic.
inline AccessibilityReport hyperbolic_accessibility(const MapSpec& m, const HyperbolicSetSpec& spec,
                                                    const PullbackConfig& cfg = {}, int max_orbit = 64) {
  AccessibilityReport rep;
  rep.validation = validate_hyperbolic_set(m, spec);
  if (!rep.validation.expanding || !rep.validation.invariant) return rep;
  const double tol = rep.validation.cover_radius;

  for (complex x0 : spec.samples) {
    AccessPoint ap;
    ap.x0 = x0;
    ap.orbit.push_back(x0);
    // Recurrence: the first repeat (within the cover radius) of the orbit.
    int n0 = -1, q = 0;
    for (int n = 1; n <= max_orbit && n0 < 0; ++n) {
      ap.orbit.push_back(dynrays::apply(m, ap.orbit.back()));
      for (int i = 0; i < n; ++i)
        if (std::abs(ap.orbit[n] - ap.orbit[i]) < tol) {
          n0 = i;
          q = n - i;
          break;
        }
    }
    if (n0 < 0) throw NumericalError("accessibility: orbit does not recur within " + std::to_string(max_orbit) + " steps");
    ap.preperiod = n0;
    ap.period = q;

    const PeriodicPoint per = make_periodic_point(m, ap.orbit[n0], q);
    if (!per.repelling()) throw NumericalError("accessibility: recurrent point is not repelling");
    PullbackConfig pc = cfg;
    pc.max_radius = pc.max_radius > 0 ? std::min(pc.max_radius, spec.delta) : spec.delta;
    auto [set, run] = pullback_landing(m, per, pc);

    // Ladder: piece m of gamma within delta / eta^m.
    ap.ladder_ok = !run.containment_radii.empty();
    const double floor_r = cfg.noise * std::max(1.0, std::abs(per.location));
    for (std::size_t k = 0; k < run.containment_radii.size(); ++k) {
      const double r = run.containment_radii[k];
      if (!(r > floor_r)) break;
      const double margin = std::log(spec.delta) - static_cast<double>(k) * std::log(spec.eta) - std::log(r);
      ap.ladder_margin.push_back(margin);
      ap.ladder_ok = ap.ladder_ok && margin >= 0;
    }

    if (n0 == 0) {
      ap.set = set;
    } else {
      // Strictly preperiodic: only the location and eventual period are meaningful.
      ap.set.point = PeriodicPoint{};
      ap.set.point.location = x0;
      ap.set.point.period = q;
      ap.set.point.orbit = {x0};
      ap.set.kind = m.kind;
      ap.set.period = 0;
      if (m.is_poly()) {
        for (const auto& a : set.angles) {
          const auto d = detail::pull_ray_back(m, a.digits(), ap.orbit, n0, cfg.trace);
          ap.set.angles.push_back(PolyAngle::from_digits(d));
          auto v = land_ray(m, ap.set.angles.back(), cfg.landing);
          ap.set.landing_errors.push_back(std::abs(v.point - x0));
          ap.set.verdicts.push_back(v);
        }
      } else {
        for (const auto& a : set.addresses) {
          ap.set.addresses.push_back(detail::pull_ray_back(m, a, ap.orbit, n0, cfg.trace));
          auto v = land_ray(m, ap.set.addresses.back(), cfg.landing);
          ap.set.landing_errors.push_back(std::abs(v.point - x0));
          ap.set.verdicts.push_back(v);
        }
      }
    }
    ap.landed = ap.set.verified(cfg.landing_tol);
    if (m.is_exp()) {
      ap.max_sup_norm = run.max_sup_norm;
      for (const auto& a : ap.set.addresses) ap.max_sup_norm = std::max(ap.max_sup_norm, a.sup_norm());
      rep.M = std::max(rep.M, run.M);
    }
    ap.run = std::move(run);
    rep.points.push_back(std::move(ap));
  }
  return rep;
}

}  // namespace dynrays

#endif  // DYNRAYS_LANDING_HPP

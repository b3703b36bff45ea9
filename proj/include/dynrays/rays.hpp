#ifndef DYNRAYS_RAYS_HPP
#define DYNRAYS_RAYS_HPP

// Dynamic rays of z^D + c and e^z + c.
//
// A ray is traced together with its whole forward orbit of coordinates (its
// "family"), on a potential lattice closed under F. Each sample below the top
// level is one inverse-branch step applied to the sample of the shifted ray
// at F(t), so the functional equation f(g_s(t)) = g_{sigma s}(F(t)) holds
// sample by sample and serves as the per-sample certificate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dynrays/bottcher.hpp"
#include "dynrays/curve.hpp"
#include "dynrays/error.hpp"
#include "dynrays/growth.hpp"
#include "dynrays/maps.hpp"
#include "dynrays/symbolic.hpp"

namespace dynrays {

struct RaySample {
  double t = 0.0;
  complex z;
  double residual = 0.0;  // functional-equation residual, or the top-level anchor certificate
  double asymptotic = std::numeric_limits<double>::quiet_NaN();  // |g(t) - 2 pi i s_0 - t| (exponential)
};

struct RaySegment {
  std::string coordinate;
  MapSpec map;
  std::vector<RaySample> samples;  // strictly increasing t
  bool truncated = false;
  std::string truncation_reason;
  std::function<complex(double)> evaluate;  // the ray at an arbitrary potential in range

  double lowest_potential() const { return samples.empty() ? NAN : samples.front().t; }
  double highest_potential() const { return samples.empty() ? NAN : samples.back().t; }
  double max_residual() const {
    double r = 0.0;
    for (const auto& s : samples) r = std::max(r, s.residual);
    return r;
  }
  Curve curve() const {
    Curve c;
    for (const auto& s : samples) c.points.push_back(s.z);
    return c;
  }
};

struct TraceConfig {
  double top = 0.0;         // lattice top potential; 0 selects 6 D (polynomial) or 30 (exponential)
  double floor = 0.0;       // lowest potential; 0 selects 1e-4 (polynomial) or 1e-3 (exponential)
  int substeps = 16;        // lattice points per fundamental interval
  int max_levels = 2000;
  double motion_tol = 0.0;  // > 0: stop descending once a level moves less than this (relative)
  double anchor_potential = 50.0;
  int max_depth = 4000;
  double refinement_tol = 1e-12;
  double residual_tol = 1e-8;
  double K = -1.0;  // bound on |c|; negative selects |c|
  double A = 1.0;
  double x = 0.0;
  double C_univ = 1.0;

  double top_for(const MapSpec& m) const { return top > 0 ? top : (m.is_poly() ? 6.0 * m.degree : 30.0); }
  double floor_for(const MapSpec& m) const { return floor > 0 ? floor : (m.is_poly() ? 1e-4 : 1e-3); }
  double K_for(const MapSpec& m) const { return K >= 0 ? K : std::abs(m.c); }
};

// ---------------------------------------------------------------------------
// Exponential rays by backward iteration from the asymptotic anchor

struct ExpRayPoint {
  complex z;
  int depth = 0;
  double cauchy = 0.0;  // |depth N - depth N+1|
};

namespace detail {

// L_{n}(F(u) + 2 pi i s_next), evaluated without forming e^u.
inline complex log_anchor(const MapSpec& m, double u, long s_next, long n) {
  const complex q = 1.0 - (1.0 + m.c - complex(0, kTwoPi * s_next)) * std::exp(-u);
  return complex(u + std::log(std::abs(q)), std::arg(q) + kTwoPi * n);
}

}  // namespace detail

/// g_s(t) = L_{s_0} o ... o L_{s_{N-1}} (F^N(t) + 2 pi i s_N), with N the
/// first depth at which F^N(t) passes the anchor potential, increased until
/// depths N and N + 1 agree to the refinement tolerance.
inline ExpRayPoint exp_ray_point(const MapSpec& m, const ExpAddress& s, double t, const TraceConfig& cfg = {}) {
  if (!m.is_exp()) throw ConfigError("exp_ray_point needs an exponential map");
  if (!(t > 0.0)) throw DomainError("exp_ray_point: potential must be positive");
  if (t > 300.0) return {complex(t, kTwoPi * s.at(0)), 0, 0.0};
  const GrowthModel F(m);
  // Capped so that F of the last potential below the anchor stays finite.
  const double anchor =
      std::min(600.0, std::max(cfg.anchor_potential, 10.0 * (std::abs(m.c) + kTwoPi * (s.sup_norm() + 1))));
  std::vector<double> u{t};
  while (u.back() < anchor) {
    if (static_cast<int>(u.size()) > cfg.max_depth)
      throw NumericalError("exp_ray_point: backward depth cap reached at t = " + std::to_string(t));
    u.push_back(F.F(u.back()));
  }
  auto eval = [&](std::size_t N) {
    while (u.size() < N) u.push_back(F.F(u.back()));
    complex w = detail::log_anchor(m, u[N - 1], s.at(N), s.at(N - 1));
    for (std::size_t k = N - 1; k-- > 0;) w = inverse_branch_exp(m, s.at(k), w);
    return w;
  };
  std::size_t N = std::max<std::size_t>(u.size() - 1, 1);
  complex z = eval(N);
  for (;;) {
    const complex z2 = eval(N + 1);
    const double diff = std::abs(z2 - z);
    if (diff <= cfg.refinement_tol * std::max(1.0, std::abs(z2)) || static_cast<int>(N) >= cfg.max_depth)
      return {z2, static_cast<int>(N + 1), diff};
    z = z2;
    ++N;
  }
}

// ---------------------------------------------------------------------------
// Ray families

namespace detail {

inline std::string coordinate_text(const DigitSequence& s) {
  try {
    return PolyAngle::from_digits(s).str();
  } catch (const NumericalError&) {
    return s.str();
  }
}
inline std::string coordinate_text(const ExpAddress& s) { return s.str(); }

/// Checks that the critical orbit of a polynomial stays bounded.
inline void require_connected_julia_set(const MapSpec& m) {
  complex z = 0.0;
  const double R = 2.0 + 2.0 * std::abs(m.c);
  for (int k = 0; k < 2000; ++k) {
    if (std::abs(z) > R) throw ConfigError("polynomial Julia set is disconnected (critical orbit escapes)");
    z = dynrays::apply(m, z);
  }
}

}  // namespace detail

/// A coordinate and its forward orbit under the shift, traced on a common
/// potential lattice. Coord is DigitSequence (polynomial) or ExpAddress.
template <class Coord>
class RayFamily {
 public:
  RayFamily(const MapSpec& m, const Coord& s, TraceConfig cfg = {})
      : map_(m), cfg_(cfg), lattice_(m, cfg.top_for(m), cfg.substeps) {
    if constexpr (std::is_same_v<Coord, DigitSequence>) {
      if (!m.is_poly()) throw ConfigError("digit sequences index polynomial rays");
      if (s.base() != m.degree) throw ConfigError("angle base differs from the degree");
      detail::require_connected_julia_set(m);
    } else {
      if (!m.is_exp()) throw ConfigError("addresses index exponential rays");
      const double K = cfg_.K_for(m);
      if (!(lattice_.top() > 2.0 * std::log(K + 3.0)))
        throw ConfigError("top potential must exceed 2 log(K + 3)");
    }
    Coord c = s;
    while (std::find(members_.begin(), members_.end(), c) == members_.end()) {
      members_.push_back(c);
      c = c.shifted();
    }
    const auto it = std::find(members_.begin(), members_.end(), c);
    for (std::size_t i = 0; i + 1 < members_.size(); ++i) next_.push_back(i + 1);
    next_.push_back(static_cast<std::size_t>(it - members_.begin()));
    pts_.resize(members_.size());
    build_top();
  }

  const MapSpec& map() const { return map_; }
  const TraceConfig& config() const { return cfg_; }
  const PotentialLattice& lattice() const { return lattice_; }
  const std::vector<Coord>& members() const { return members_; }
  std::size_t next(std::size_t i) const { return next_[i]; }
  int levels() const { return static_cast<int>(pts_[0].size() / lattice_.substeps()); }
  bool truncated() const { return truncated_; }
  const std::string& truncation_reason() const { return reason_; }

  const RaySample& sample(std::size_t member, int level, int j) const {
    return pts_[member][static_cast<std::size_t>(level) * lattice_.substeps() + j];
  }
  complex point(std::size_t member, int level, int j = 0) const { return sample(member, level, j).z; }

  /// Adds one lattice level below the current lowest; false if that failed.
  bool descend() {
    if (truncated_) return false;
    const int L = levels();
    const int S = lattice_.substeps();
    std::vector<std::vector<RaySample>> fresh(members_.size());
    try {
      for (std::size_t i = 0; i < members_.size(); ++i)
        for (int j = 0; j < S; ++j) {
          const complex w = point(next_[i], L - 1, j);
          const complex ref = j > 0 ? fresh[i].back().z : point(i, L - 1, S - 1);
          complex z;
          if constexpr (std::is_same_v<Coord, DigitSequence>) {
            z = preimage_near(map_, w, ref);
          } else {
            z = inverse_branch_exp(map_, members_[i].first(), w);
          }
          const double res = std::abs(dynrays::apply(map_, z) - w) / std::max(1.0, std::abs(w));
          fresh[i].push_back({lattice_.potential(L, j), z, res});
        }
    } catch (const Error& e) {
      truncated_ = true;
      reason_ = e.what();
      return false;
    }
    for (std::size_t i = 0; i < members_.size(); ++i) pts_[i].insert(pts_[i].end(), fresh[i].begin(), fresh[i].end());
    return true;
  }

  /// Largest relative displacement between the first samples of the two lowest levels.
  double last_motion() const {
    const int L = levels();
    if (L < 2) return INFINITY;
    double r = 0.0;
    for (std::size_t i = 0; i < members_.size(); ++i) {
      const complex a = point(i, L - 1), b = point(i, L - 2);
      r = std::max(r, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    return r;
  }

  /// Descends to `target` levels, stopping early below the floor potential
  /// (if `respect_floor`) or once the motion tolerance is met.
  void descend_to(int target, bool respect_floor = true) {
    const double floor = cfg_.floor_for(map_);
    while (levels() < std::min(target, cfg_.max_levels)) {
      if (respect_floor && lattice_.potential(levels(), lattice_.substeps() - 1) < floor) break;
      if (cfg_.motion_tol > 0 && last_motion() < cfg_.motion_tol) break;
      if (!descend()) break;
    }
  }

  /// Member i as a segment with samples in increasing potential.
  RaySegment segment(std::size_t i) const {
    RaySegment seg;
    seg.coordinate = detail::coordinate_text(members_[i]);
    seg.map = map_;
    seg.samples.assign(pts_[i].rbegin(), pts_[i].rend());
    seg.truncated = truncated_;
    seg.truncation_reason = reason_;
    seg.evaluate = evaluator(i);
    return seg;
  }

  std::function<complex(double)> evaluator(std::size_t i) const {
    const MapSpec m = map_;
    const TraceConfig cfg = cfg_;
    const Coord s = members_[i];
    if constexpr (std::is_same_v<Coord, DigitSequence>) {
      const AngleOrbit orbit = AngleOrbit::from(s);
      return [m, orbit](double t) { return newton_ray_at(m, orbit, t); };
    } else {
      return [m, s, cfg](double t) { return exp_ray_point(m, s, t, cfg).z; };
    }
  }

 private:
  void build_top() {
    const int S = lattice_.substeps();
    for (std::size_t i = 0; i < members_.size(); ++i)
      for (int j = 0; j < S; ++j) {
        const double t = lattice_.potential(0, j);
        RaySample smp{t, {}, 0.0};
        if constexpr (std::is_same_v<Coord, DigitSequence>) {
          const complex w = std::exp(complex(t, kTwoPi * members_[i].to_double()));
          smp.z = bottcher_inverse_high(map_, w);
          smp.residual = std::abs(std::exp(detail::log_bottcher_product(map_, smp.z)) - w) / std::abs(w);
        } else {
          const auto p = exp_ray_point(map_, members_[i], t, cfg_);
          smp.z = p.z;
          smp.residual = p.cauchy / std::max(1.0, std::abs(p.z));
          smp.asymptotic = std::abs(p.z - complex(t, kTwoPi * members_[i].first()));
        }
        pts_[i].push_back(smp);
      }
  }

  MapSpec map_;
  TraceConfig cfg_;
  PotentialLattice lattice_;
  std::vector<Coord> members_;
  std::vector<std::size_t> next_;
  std::vector<std::vector<RaySample>> pts_;  // per member, level-major, decreasing potential
  bool truncated_ = false;
  std::string reason_;
};

using PolyRayFamily = RayFamily<DigitSequence>;
using ExpRayFamily = RayFamily<ExpAddress>;

/// The polynomial ray of the given angle down to the configured floor.
inline RaySegment trace_poly_ray(const MapSpec& m, const PolyAngle& angle, const TraceConfig& cfg = {}) {
  if (angle.base() != m.degree) throw ConfigError("angle base differs from the degree");
  PolyRayFamily fam(m, angle.digits(), cfg);
  fam.descend_to(cfg.max_levels);
  auto seg = fam.segment(0);
  seg.coordinate = angle.str();
  return seg;
}

inline RaySegment trace_exp_ray(const MapSpec& m, const ExpAddress& s, const TraceConfig& cfg = {}) {
  ExpRayFamily fam(m, s, cfg);
  fam.descend_to(cfg.max_levels);
  return fam.segment(0);
}

/// The arc of the ray between potentials t and F(t). Interior points are the
/// traced samples; the endpoints are evaluated exactly.
inline Curve fundamental_domain(const RaySegment& seg, double t) {
  const GrowthModel F(seg.map);
  const double t1 = F.F(t);
  const double lo = seg.lowest_potential(), hi = seg.highest_potential();
  const double slack = 1e-12 * std::max(1.0, hi);
  if (seg.samples.empty() || t < lo - slack || t1 > hi + slack)
    throw DomainError("fundamental_domain: [t, F(t)] is outside the traced range");
  Curve c;
  c.points.push_back(seg.evaluate ? seg.evaluate(t) : seg.samples.front().z);
  for (const auto& s : seg.samples)
    if (s.t > t * (1 + 1e-14) && s.t < t1 * (1 - 1e-14)) c.points.push_back(s.z);
  c.points.push_back(seg.evaluate ? seg.evaluate(t1) : seg.samples.back().z);
  return c;
}

/// Sub-curve of the samples with potential in [t0, t1] (lattice points only).
inline Curve lattice_arc(const RaySegment& seg, double t0, double t1) {
  Curve c;
  for (const auto& s : seg.samples)
    if (s.t >= t0 * (1 - 1e-13) && s.t <= t1 * (1 + 1e-13)) c.points.push_back(s.z);
  return c;
}

}  // namespace dynrays

#endif  // DYNRAYS_RAYS_HPP

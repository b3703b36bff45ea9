#ifndef DYNRAYS_MAPS_HPP
#define DYNRAYS_MAPS_HPP

// The dynamical systems z^D + c and e^z + c: evaluation, inverse branches,
// itineraries, periodic points and linearization data.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "dynrays/error.hpp"

namespace dynrays {

using complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class MapKind { Polynomial, Exponential };

/// z^D + c (Polynomial) or e^z + c (Exponential). Exponential parameters are
/// normalized so that -pi <= Im c < pi.
struct MapSpec {
  MapKind kind = MapKind::Polynomial;
  int degree = 2;
  complex c{0.0, 0.0};

  static MapSpec polynomial(int degree, complex c) {
    if (degree < 2) throw ConfigError("polynomial degree must be >= 2");
    return MapSpec{MapKind::Polynomial, degree, c};
  }
  static MapSpec exponential(complex c) {
    double im = std::fmod(c.imag() + kPi, kTwoPi);
    if (im < 0) im += kTwoPi;
    return MapSpec{MapKind::Exponential, 0, complex(c.real(), im - kPi)};
  }

  bool is_poly() const { return kind == MapKind::Polynomial; }
  bool is_exp() const { return kind == MapKind::Exponential; }

  std::string describe() const {
    char buf[128];
    if (is_poly())
      std::snprintf(buf, sizeof buf, "z^%d + (%.17g%+.17gi)", degree, c.real(), c.imag());
    else
      std::snprintf(buf, sizeof buf, "exp(z) + (%.17g%+.17gi)", c.real(), c.imag());
    return buf;
  }
};

inline complex ipow(complex z, int n) {
  complex r(1.0, 0.0);
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

inline complex apply(const MapSpec& m, complex z) {
  if (m.is_poly()) return ipow(z, m.degree) + m.c;
  if (z.real() > 709.0) throw NumericalError("exp overflow at Re z = " + std::to_string(z.real()));
  return std::exp(z) + m.c;
}

inline complex derivative(const MapSpec& m, complex z) {
  if (m.is_poly()) return static_cast<double>(m.degree) * ipow(z, m.degree - 1);
  if (z.real() > 709.0) throw NumericalError("exp overflow at Re z = " + std::to_string(z.real()));
  return std::exp(z);
}

/// f^n(z) and (f^n)'(z).
inline std::pair<complex, complex> iterate_with_derivative(const MapSpec& m, complex z, int n) {
  complex d(1.0, 0.0);
  for (int i = 0; i < n; ++i) {
    d *= derivative(m, z);
    z = dynrays::apply(m, z);
  }
  return {z, d};
}

// ---------------------------------------------------------------------------
// Exponential strips and logarithm branches

/// Index n of the strip S_n = {2 pi n - pi < Im z < 2 pi n + pi} containing z.
inline long strip_index(complex z) { return static_cast<long>(std::floor((z.imag() + kPi) / kTwoPi)); }

/// Distance from z to the boundary lines Im z = 2 pi n +- pi.
inline double strip_boundary_distance(complex z) {
  const double u = std::fmod(z.imag() + kPi, kTwoPi);
  const double v = u < 0 ? u + kTwoPi : u;
  return std::min(v, kTwoPi - v);
}

/// Distance from w to the slit {Im z = Im c, Re z <= Re c}.
inline double slit_distance(const MapSpec& m, complex w) {
  if (w.real() <= m.c.real()) return std::fabs(w.imag() - m.c.imag());
  return std::abs(w - m.c);
}

/// L_n(w) = log|w - c| + i arg(w - c) + 2 pi i n, the inverse of e^z + c onto S_n.
inline complex inverse_branch_exp(const MapSpec& m, long n, complex w, double slit_tol = 1e-12) {
  if (!m.is_exp()) throw ConfigError("inverse_branch_exp needs an exponential map");
  if (slit_distance(m, w) <= slit_tol * std::max(1.0, std::abs(w)))
    throw BranchError("inverse_branch_exp: point on the slit of the logarithm");
  const complex u = w - m.c;
  return complex(std::log(std::abs(u)), std::arg(u) + kTwoPi * static_cast<double>(n));
}

/// The D-th roots of w - c, in order of increasing argument from arg(w - c)/D.
inline std::vector<complex> poly_preimages(const MapSpec& m, complex w) {
  const complex u = w - m.c;
  const double r = std::pow(std::abs(u), 1.0 / m.degree);
  const double a = std::arg(u);
  std::vector<complex> out;
  for (int k = 0; k < m.degree; ++k) out.push_back(std::polar(r, (a + kTwoPi * k) / m.degree));
  return out;
}

/// The f-preimage of w closest to `near` (an analytic branch on small balls).
inline complex preimage_near(const MapSpec& m, complex w, complex near) {
  if (m.is_exp()) return inverse_branch_exp(m, strip_index(near), w);
  const auto roots = poly_preimages(m, w);
  return *std::min_element(roots.begin(), roots.end(),
                           [&](complex a, complex b) { return std::abs(a - near) < std::abs(b - near); });
}

/// Strip itinerary s_0 ... s_{N-1} of z under e^z + c.
inline std::vector<long> itinerary(const MapSpec& m, complex z, int length, double boundary_tol = 1e-9) {
  if (!m.is_exp()) throw ConfigError("itinerary needs an exponential map");
  std::vector<long> out;
  out.reserve(length);
  for (int j = 0; j < length; ++j) {
    if (strip_boundary_distance(z) < boundary_tol || slit_distance(m, z) < boundary_tol)
      throw DomainError("itinerary undefined at step " + std::to_string(j));
    out.push_back(strip_index(z));
    if (j + 1 == length) break;
    if (z.real() > 709.0) {
      // e^z of a real point with real c stays on the real axis in S_0.
      if (z.imag() == 0.0 && m.c.imag() == 0.0 && strip_index(m.c) == 0) {
        out.resize(length, 0);
        break;
      }
      throw NumericalError("itinerary: orbit overflows at step " + std::to_string(j + 1));
    }
    z = dynrays::apply(m, z);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Periodic points

enum class Stability { Repelling, Attracting, ParabolicSuspect, Superattracting };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Repelling: return "repelling";
    case Stability::Attracting: return "attracting";
    case Stability::ParabolicSuspect: return "parabolic-suspect";
    case Stability::Superattracting: return "superattracting";
  }
  return "?";
}

struct PeriodicPoint {
  complex location;
  int period = 1;  // exact (minimal) period
  complex multiplier;
  Stability stability = Stability::Repelling;
  std::vector<complex> orbit;  // location, f(location), ..., f^{period-1}(location)

  double modulus() const { return std::abs(multiplier); }
  bool repelling() const { return stability == Stability::Repelling; }
};

struct PeriodicSearchConfig {
  double residual_tol = 1e-12;
  int max_iterations = 200;
  double dedup_radius = 1e-8;
  double classification_margin = 1e-6;
  int strips = 3;  // exponential default seeding: one seed per strip |k| <= strips
};

inline Stability classify(complex multiplier, double margin) {
  const double a = std::abs(multiplier);
  if (a < 1e-12) return Stability::Superattracting;
  if (a > 1.0 + margin) return Stability::Repelling;
  if (a < 1.0 - margin) return Stability::Attracting;
  return Stability::ParabolicSuspect;
}

/// Builds the PeriodicPoint record for a point already known to be periodic.
inline PeriodicPoint make_periodic_point(const MapSpec& m, complex z, int p, double margin = 1e-6) {
  PeriodicPoint pt;
  pt.location = z;
  int period = p;
  complex w = z;
  for (int q = 1; q <= p; ++q) {
    w = dynrays::apply(m, w);
    if (p % q == 0 && std::abs(w - z) < 1e-8 * std::max(1.0, std::abs(z))) {
      period = q;
      break;
    }
  }
  pt.period = period;
  complex mult(1.0, 0.0);
  w = z;
  for (int i = 0; i < period; ++i) {
    pt.orbit.push_back(w);
    mult *= derivative(m, w);
    w = dynrays::apply(m, w);
  }
  pt.multiplier = mult;
  pt.stability = classify(mult, margin);
  return pt;
}

/// Default Newton seeds for period-p points.
inline std::vector<complex> default_periodic_seeds(const MapSpec& m, int p, int strips = 3) {
  std::vector<complex> seeds;
  if (m.is_exp() && p == 1) {
    for (int k = -strips; k <= strips; ++k)
      seeds.emplace_back(std::log(kTwoPi * std::abs(k) + 2.0), kTwoPi * k);
    return seeds;
  }
  if (m.is_exp()) {
    const int n = 24;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n * (2 * strips + 1) / 3; ++j)
        seeds.emplace_back(-3.0 + 9.0 * (i + 0.5) / n, -kTwoPi * (strips + 0.5) + kTwoPi * (2 * strips + 1) * (j + 0.5) / (n * (2 * strips + 1) / 3));
    return seeds;
  }
  const double R = 2.0 * std::max(1.0, std::pow(std::abs(m.c), 1.0 / m.degree)) + 0.5;
  const int n = std::min(80, 16 + 8 * p * m.degree);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) seeds.emplace_back(-R + 2 * R * (i + 0.5) / n, -R + 2 * R * (j + 0.5) / n);
  return seeds;
}

/// Newton iteration on f^p(z) - z from each seed; deduplicated and sorted by
/// (Re, Im). Seeds that fail to converge are counted in `failures`.
inline std::vector<PeriodicPoint> find_periodic_points(const MapSpec& m, int p, std::vector<complex> seeds = {},
                                                       const PeriodicSearchConfig& cfg = {}, int* failures = nullptr) {
  if (p < 1) throw ConfigError("period must be >= 1");
  if (seeds.empty()) seeds = default_periodic_seeds(m, p, cfg.strips);
  std::vector<complex> found;
  int failed = 0;
  for (complex z : seeds) {
    bool converged = false;
    try {
      for (int it = 0; it < cfg.max_iterations; ++it) {
        auto [fz, dz] = iterate_with_derivative(m, z, p);
        const complex g = fz - z;
        const complex dg = dz - 1.0;
        if (std::abs(dg) == 0.0) break;
        complex step = g / dg;
        const double cap = 4.0 * std::max(1.0, std::abs(z));
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
        if (std::abs(step) < cfg.residual_tol * std::max(1.0, std::abs(z))) {
          const complex r = iterate_with_derivative(m, z, p).first - z;
          converged = std::abs(r) < 1e-10 * std::max(1.0, std::abs(z));
          break;
        }
      }
    } catch (const NumericalError&) {
      converged = false;
    }
    if (!converged) {
      ++failed;
      continue;
    }
    const bool dup = std::any_of(found.begin(), found.end(),
                                 [&](complex w) { return std::abs(w - z) < cfg.dedup_radius; });
    if (!dup) found.push_back(z);
  }
  if (failures) *failures = failed;
  std::sort(found.begin(), found.end(), [](complex a, complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  std::vector<PeriodicPoint> out;
  for (complex z : found) out.push_back(make_periodic_point(m, z, p, cfg.classification_margin));
  return out;
}

// ---------------------------------------------------------------------------
// Inverse branch fixing a periodic point, and its linearization constants

/// psi: the branch of f^{-p} fixing the periodic point, realized as the
/// composition of single-step branches along the cycle.
class CycleInverse {
 public:
  CycleInverse(MapSpec m, PeriodicPoint pt) : map_(m), point_(std::move(pt)) {
    for (complex z : point_.orbit) strips_.push_back(m.is_exp() ? strip_index(z) : 0);
  }

  const PeriodicPoint& point() const { return point_; }
  complex center() const { return point_.location; }

  /// One step back along the cycle: the branch of f^{-1} taking a point near
  /// orbit[(i + 1) % p] to a point near orbit[i].
  complex step(std::size_t i, complex w) const {
    if (map_.is_exp()) return inverse_branch_exp(map_, strips_[i], w);
    return preimage_near(map_, w, point_.orbit[i]);
  }

  complex operator()(complex w) const {
    for (std::size_t i = point_.orbit.size(); i-- > 0;) w = step(i, w);
    return w;
  }

  /// psi(w) together with |psi'(w)|.
  std::pair<complex, double> with_derivative(complex w) const {
    double d = 1.0;
    for (std::size_t i = point_.orbit.size(); i-- > 0;) {
      w = step(i, w);
      d /= std::abs(derivative(map_, w));
    }
    return {w, d};
  }

 private:
  MapSpec map_;
  PeriodicPoint point_;
  std::vector<long> strips_;
};

struct LinearizationData {
  PeriodicPoint center;
  double radius = 0.0;
  double distortion = 1.0;  // C in 1/(C mu^n) < |(psi^n)'| < C/mu^n
  int depth = 0;
  double mu() const { return center.modulus(); }
};

struct LinearizationConfig {
  double initial_radius = 0.0;  // 0 = automatic
  double min_radius = 1e-6;
  double max_distortion = 4.0;
  int depth = 20;
  int samples = 24;  // boundary samples; the interior uses a polar grid of the same density
};

namespace detail {

inline std::vector<complex> ball_samples(complex center, double r, int n) {
  std::vector<complex> pts{center};
  for (int ring = 1; ring <= 4; ++ring)
    for (int k = 0; k < n; ++k) pts.push_back(center + std::polar(r * ring / 4.0, kTwoPi * (k + 0.5 * (ring % 2)) / n));
  return pts;
}

// Smallest C with 1/(C mu^n) <= |(psi^n)'(x)| <= C / mu^n over the samples.
inline double distortion_over(const CycleInverse& psi, double mu, const std::vector<complex>& pts, int depth) {
  double C = 1.0;
  for (complex x : pts) {
    double d = 1.0;
    complex w = x;
    double scale = 1.0;
    for (int n = 1; n <= depth; ++n) {
      auto [nw, dd] = psi.with_derivative(w);
      w = nw;
      d *= dd;
      scale *= mu;
      const double ratio = d * scale;
      C = std::max({C, ratio, 1.0 / ratio});
    }
  }
  return C;
}

}  // namespace detail

inline LinearizationData linearization_fit(const MapSpec& m, const PeriodicPoint& pt, const LinearizationConfig& cfg = {}) {
  if (!pt.repelling()) throw ConfigError("linearization_fit needs a repelling periodic point");
  const CycleInverse psi(m, pt);
  const double mu = pt.modulus();
  double r = cfg.initial_radius;
  if (r <= 0.0) {
    r = 0.5;
    for (complex z : pt.orbit) {
      if (m.is_poly()) r = std::min(r, 0.5 * std::abs(z));  // stay off the critical point
      for (complex w : pt.orbit)
        if (w != z) r = std::min(r, 0.25 * std::abs(w - z));
    }
  }
  for (; r >= cfg.min_radius; r *= 0.5) {
    try {
      const auto pts = detail::ball_samples(pt.location, r, cfg.samples);
      bool inside = true;
      for (int k = 0; k < cfg.samples && inside; ++k) {
        const complex b = pt.location + std::polar(r, kTwoPi * k / cfg.samples);
        inside = std::abs(psi(b) - pt.location) < r;
      }
      if (!inside) continue;
      const double C = detail::distortion_over(psi, mu, pts, cfg.depth);
      if (C <= cfg.max_distortion) return LinearizationData{pt, r, C, cfg.depth};
    } catch (const DomainError&) {
      continue;
    }
  }
  throw DomainError("degenerate linearization: no admissible chart radius");
}

/// Re-checks the distortion bound on fresh samples at a given depth; returns
/// the worst ratio (<= data.distortion means the fit holds).
inline double validate_linearization(const MapSpec& m, const LinearizationData& data, int depth, int samples = 37) {
  const CycleInverse psi(m, data.center);
  return detail::distortion_over(psi, data.mu(), detail::ball_samples(data.center.location, 0.999 * data.radius, samples),
                                 depth);
}

// ---------------------------------------------------------------------------

struct PostsingularReport {
  bool bounded = false;  // heuristic: bounded up to the iteration count only
  int iterations = 0;
  double max_modulus = 0.0;
  std::vector<complex> orbit_samples;
  bool heuristic = true;
};

/// Iterates the singular value c of e^z + c for n steps and reports whether
/// the orbit stays within `radius`.
inline PostsingularReport postsingular_probe(const MapSpec& m, int n, double radius) {
  if (!m.is_exp()) throw ConfigError("postsingular_probe needs an exponential map");
  PostsingularReport rep;
  complex z = m.c;
  rep.bounded = true;
  for (int k = 0; k <= n; ++k) {
    const double a = std::abs(z);
    rep.max_modulus = std::max(rep.max_modulus, a);
    if (k < 32 || k == n) rep.orbit_samples.push_back(z);
    rep.iterations = k;
    if (!(a <= radius)) {
      rep.bounded = false;
      break;
    }
    if (k == n) break;
    if (z.real() > 709.0) {
      rep.bounded = false;
      break;
    }
    z = dynrays::apply(m, z);
  }
  return rep;
}

}  // namespace dynrays

#endif  // DYNRAYS_MAPS_HPP

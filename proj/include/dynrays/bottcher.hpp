#ifndef DYNRAYS_BOTTCHER_HPP
#define DYNRAYS_BOTTCHER_HPP

// Böttcher coordinates of z^D + c and an independent Newton ray tracer.
//
// Near infinity B is given by the product formula
//   B(z) = z * prod_k (1 + c / z_k^D)^{1/D^{k+1}},   z_k = f^k(z),
// which is analytic (principal branches) on |z| > 2 + 2|c|. Closer to the
// Julia set the angle of B is recovered one D-adic digit at a time: each
// candidate preimage angle is traced by Newton's method from high potential
// and the candidate passing through the orbit point wins.

#include <cmath>
#include <complex>
#include <vector>

#include "dynrays/error.hpp"
#include "dynrays/maps.hpp"
#include "dynrays/symbolic.hpp"

namespace dynrays {

/// Angle of a ray together with its forward orbit under multiplication by D.
/// at(i) is D^i * angle mod 1, computed from explicit digits so that no
/// precision is lost for i below the number of stored digits.
struct AngleOrbit {
  int base = 2;
  std::vector<int> digits;
  double tail = 0.0;  // angle of the sequence after the stored digits

  static AngleOrbit from(const DigitSequence& s, std::size_t stored = 256) {
    AngleOrbit a;
    a.base = s.base();
    a.digits.reserve(stored);
    for (std::size_t i = 0; i < stored; ++i) a.digits.push_back(s.at(i));
    // After dropping `stored` digits the remainder is a shift of the period.
    DigitSequence tail_seq = s;
    for (std::size_t i = 0; i < std::min(stored, s.preperiod().size()); ++i) tail_seq = tail_seq.shifted();
    const std::size_t left = stored - std::min(stored, s.preperiod().size());
    for (std::size_t i = 0; i < left % s.period().size(); ++i) tail_seq = tail_seq.shifted();
    a.tail = tail_seq.to_double();
    return a;
  }

  AngleOrbit prepended(int digit) const {
    AngleOrbit a = *this;
    a.digits.insert(a.digits.begin(), digit);
    return a;
  }

  double at(std::size_t i) const {
    const std::size_t m = digits.size();
    if (i < m) {
      double x = tail;
      for (std::size_t k = m; k-- > i;) x = (digits[k] + x) / base;
      return x;
    }
    double x = tail;
    for (std::size_t k = m; k < i; ++k) {
      x *= base;
      x -= std::floor(x);
    }
    return x;
  }
};

struct BottcherConfig {
  int depth = 400;              // maximal forward iterations
  double high_potential = 12.0;  // Newton ray tracing starts here
  int substeps = 16;            // potential sub-steps per factor D
};

namespace detail {

inline double product_radius(const MapSpec& m) { return 2.0 + 2.0 * std::abs(m.c); }

// log B(z) by the product formula; requires |z| >= product_radius.
inline complex log_bottcher_product(const MapSpec& m, complex z) {
  const int D = m.degree;
  complex acc = std::log(z);
  double scale = 1.0 / D;
  complex w = z;
  for (int k = 0; k < 200; ++k) {
    const complex u = m.c / ipow(w, D);
    if (std::abs(u) * scale < 1e-18) break;
    acc += scale * std::log(1.0 + u);
    w = ipow(w, D) + m.c;
    scale /= D;
  }
  return acc;
}

}  // namespace detail

/// B^{-1}(w) for |w| large, by fixed-point iteration on the product formula.
inline complex bottcher_inverse_high(const MapSpec& m, complex w) {
  if (std::abs(w) < 4.0 * detail::product_radius(m))
    throw DomainError("bottcher_inverse_high: |w| too small for the product formula");
  complex z = w;
  for (int it = 0; it < 100; ++it) {
    const complex b = std::exp(detail::log_bottcher_product(m, z));
    const complex dz = (w - b) * (z / b);  // B(z) ~ z, so B'(z) ~ B(z)/z
    z += dz;
    if (std::abs(dz) < 1e-16 * std::abs(z)) break;
  }
  return z;
}

/// The point of potential t on the ray with the given angle orbit, solved by
/// Newton's method on f^n(z) = B^{-1}(exp(D^n t + 2 pi i D^n angle)), where n
/// is the least integer with D^n t >= high.
inline complex newton_ray_point(const MapSpec& m, const AngleOrbit& angle, double t, complex guess,
                                double high = 12.0, double* residual = nullptr) {
  int n = 0;
  double tn = t;
  while (tn < high) {
    tn *= m.degree;
    ++n;
  }
  const complex w = bottcher_inverse_high(m, std::exp(complex(tn, kTwoPi * angle.at(n))));
  complex z = guess;
  double res = 0.0;
  for (int it = 0; it < 60; ++it) {
    auto [fz, dz] = iterate_with_derivative(m, z, n);
    if (!std::isfinite(std::abs(fz)) || std::abs(dz) == 0.0) throw NumericalError("newton_ray_point: orbit diverged");
    const complex step = (fz - w) / dz;
    z -= step;
    res = std::abs(fz - w) / std::abs(w);
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  if (residual) *residual = res;
  return z;
}

/// Traces the ray from high potential down to t_target, returning the
/// samples (t, z) in order of decreasing potential.
inline std::vector<std::pair<double, complex>> newton_trace(const MapSpec& m, const AngleOrbit& angle, double t_target,
                                                            const BottcherConfig& cfg = {}) {
  std::vector<std::pair<double, complex>> out;
  double t = std::max(cfg.high_potential, t_target);
  complex z = bottcher_inverse_high(m, std::exp(complex(t, kTwoPi * angle.at(0))));
  out.emplace_back(t, z);
  const double ratio = std::pow(static_cast<double>(m.degree), -1.0 / cfg.substeps);
  while (t > t_target) {
    t = std::max(t * ratio, t_target);
    z = newton_ray_point(m, angle, t, z, cfg.high_potential);
    out.emplace_back(t, z);
  }
  return out;
}

inline complex newton_ray_at(const MapSpec& m, const AngleOrbit& angle, double t, const BottcherConfig& cfg = {}) {
  return newton_trace(m, angle, t, cfg).back().second;
}

/// Potential G(z) = log|B(z)| together with the angle orbit of B(z).
struct BottcherData {
  double potential = 0.0;
  AngleOrbit angle;
  complex value() const { return std::exp(complex(potential, kTwoPi * angle.at(0))); }
};

inline BottcherData bottcher_data(const MapSpec& m, complex z, const BottcherConfig& cfg = {}) {
  if (!m.is_poly()) throw ConfigError("bottcher needs a polynomial map");
  const int D = m.degree;
  const double R = detail::product_radius(m);
  std::vector<complex> orbit{z};
  while (std::abs(orbit.back()) < R) {
    if (static_cast<int>(orbit.size()) > cfg.depth)
      throw DomainError("bottcher: point does not escape within the iteration depth");
    orbit.push_back(dynrays::apply(m, orbit.back()));
  }
  const std::size_t n = orbit.size() - 1;
  const complex lb = detail::log_bottcher_product(m, orbit[n]);
  BottcherData out;
  double theta = lb.imag() / kTwoPi;
  theta -= std::floor(theta);
  out.angle.base = D;
  out.angle.tail = theta;
  double g = lb.real();
  for (std::size_t k = n; k-- > 0;) {
    g /= D;
    // Candidate angles (j + angle_{k+1}) / D; trace each to potential g and
    // keep the one passing closest to orbit[k].
    int best = 0;
    double best_d = INFINITY;
    for (int j = 0; j < D; ++j) {
      const complex p = newton_ray_at(m, out.angle.prepended(j), g, cfg);
      const double d = std::abs(p - orbit[k]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    out.angle = out.angle.prepended(best);
  }
  out.potential = g;
  return out;
}

/// B(z) for an escaping z.
inline complex bottcher(const MapSpec& m, complex z, const BottcherConfig& cfg = {}) {
  if (m.is_poly() && std::abs(z) >= detail::product_radius(m)) return std::exp(detail::log_bottcher_product(m, z));
  return bottcher_data(m, z, cfg).value();
}

/// Angle of B(z) in [0, 1).
inline double bottcher_angle(const MapSpec& m, complex z, const BottcherConfig& cfg = {}) {
  return bottcher_data(m, z, cfg).angle.at(0);
}

/// The D-th root branch of w - c whose Böttcher angle lies in [j/D, (j+1)/D).
/// For non-escaping w the sector is taken with respect to arg(w - c).
inline complex inverse_branch_poly(const MapSpec& m, int j, complex w, const BottcherConfig& cfg = {}) {
  if (!m.is_poly()) throw ConfigError("inverse_branch_poly needs a polynomial map");
  if (j < 0 || j >= m.degree) throw ConfigError("inverse_branch_poly: digit out of range");
  if (std::abs(w - m.c) < 1e-14 * std::max(1.0, std::abs(m.c)))
    throw BranchError("inverse_branch_poly: w is the critical value");
  const auto roots = poly_preimages(m, w);
  BottcherData bw;
  try {
    bw = bottcher_data(m, w, cfg);
  } catch (const DomainError&) {
    double a = std::arg(w - m.c);
    if (a < 0) a += kTwoPi;
    const double r = std::pow(std::abs(w - m.c), 1.0 / m.degree);
    return std::polar(r, (a + kTwoPi * j) / m.degree);
  }
  const complex target = newton_ray_at(m, bw.angle.prepended(j), bw.potential / m.degree, cfg);
  return *std::min_element(roots.begin(), roots.end(),
                           [&](complex a, complex b) { return std::abs(a - target) < std::abs(b - target); });
}

}  // namespace dynrays

#endif  // DYNRAYS_BOTTCHER_HPP

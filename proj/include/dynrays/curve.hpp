#ifndef DYNRAYS_CURVE_HPP
#define DYNRAYS_CURVE_HPP

#include <complex>
#include <numeric>
#include <vector>

namespace dynrays {

/// An ordered complex polyline.
struct Curve {
  std::vector<std::complex<double>> points;

  std::vector<double> edge_lengths() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < points.size(); ++i) out.push_back(std::abs(points[i] - points[i - 1]));
    return out;
  }
  double length() const {
    const auto e = edge_lengths();
    return std::accumulate(e.begin(), e.end(), 0.0);
  }
  double max_distance_to(std::complex<double> p) const {
    double r = 0.0;
    for (auto z : points) r = std::max(r, std::abs(z - p));
    return r;
  }
  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j) d = std::max(d, std::abs(points[i] - points[j]));
    return d;
  }
};

/// Inserts midpoints until no edge is longer than max_edge.
inline Curve refine(const Curve& c, double max_edge) {
  Curve out;
  if (c.points.empty()) return out;
  out.points.push_back(c.points.front());
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const auto a = c.points[i - 1];
    const auto b = c.points[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / max_edge)));
    for (int k = 1; k <= pieces; ++k) out.points.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
  }
  return out;
}

namespace detail {

inline double cross(std::complex<double> a, std::complex<double> b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline bool segments_cross(std::complex<double> p1, std::complex<double> p2, std::complex<double> q1,
                           std::complex<double> q2) {
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace detail

/// True when no two non-adjacent edges within `window` positions of each
/// other properly intersect.
inline bool locally_injective(const Curve& c, std::size_t window = 64) {
  const auto& p = c.points;
  for (std::size_t i = 1; i < p.size(); ++i)
    for (std::size_t j = i + 2; j < p.size() && j <= i + window; ++j)
      if (detail::segments_cross(p[i - 1], p[i], p[j - 1], p[j])) return false;
  return true;
}

}  // namespace dynrays

#endif  // DYNRAYS_CURVE_HPP

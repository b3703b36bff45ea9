#ifndef DYNRAYS_GROWTH_HPP
#define DYNRAYS_GROWTH_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "dynrays/error.hpp"
#include "dynrays/maps.hpp"

namespace dynrays {

/// Radial growth F: t -> D t for polynomials, t -> e^t - 1 for exponentials.
struct GrowthModel {
  MapKind kind = MapKind::Polynomial;
  int degree = 2;

  explicit GrowthModel(const MapSpec& m) : kind(m.kind), degree(m.degree) {}

  double F(double t) const {
    if (kind == MapKind::Polynomial) return degree * t;
    return t > 709.0 ? std::numeric_limits<double>::infinity() : std::expm1(t);
  }
  double Finv(double t) const { return kind == MapKind::Polynomial ? t / degree : std::log1p(t); }

  /// F^m(t) for any integer m.
  double iterate(double t, int m) const {
    for (; m > 0; --m) t = F(t);
    for (; m < 0; ++m) t = Finv(t);
    return t;
  }
};

/// Potentials t(L, j) = F^{-L}(u_j), where u_0 = top > u_1 > ... > u_{S-1}
/// subdivide the fundamental interval (F^{-1}(top), top]. F maps level L
/// onto level L - 1 index by index, which is what lets a ray family be
/// traced one inverse-branch step per sample.
class PotentialLattice {
 public:
  PotentialLattice(const MapSpec& m, double top, int substeps) : growth_(m), substeps_(substeps) {
    if (substeps < 1) throw ConfigError("lattice needs at least one sub-step");
    if (!(top > 0.0) || !std::isfinite(top)) throw ConfigError("lattice top potential must be positive and finite");
    const double bottom = growth_.Finv(top);
    // Geometric spacing in t; for D t this is exact self-similarity.
    for (int j = 0; j < substeps; ++j) top_.push_back(top * std::pow(bottom / top, static_cast<double>(j) / substeps));
  }

  int substeps() const { return substeps_; }
  double top() const { return top_.front(); }
  const GrowthModel& growth() const { return growth_; }

  double potential(int level, int j) const { return growth_.iterate(top_[j], -level); }

  /// All potentials of one level, decreasing.
  std::vector<double> level(int L) const {
    std::vector<double> out;
    for (int j = 0; j < substeps_; ++j) out.push_back(potential(L, j));
    return out;
  }

 private:
  GrowthModel growth_;
  int substeps_;
  std::vector<double> top_;
};

}  // namespace dynrays

#endif  // DYNRAYS_GROWTH_HPP

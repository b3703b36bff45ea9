#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dynrays/bottcher.hpp"
#include "dynrays/maps.hpp"

using namespace dynrays;

namespace {

// Real fixed point of e^x + c on [lo, hi] by bisection.
double bisect_fixed_point(double c, double lo, double hi) {
  auto g = [c](double x) { return std::exp(x) + c - x; };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(lo) * g(mid) <= 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Apply, Examples) {
  const auto e = MapSpec::exponential({-2, 0});
  EXPECT_EQ(dynrays::apply(e, 0.0), complex(-1, 0));
  const auto p = MapSpec::polynomial(2, 0.0);
  EXPECT_EQ(dynrays::apply(p, 2.0), complex(4, 0));
  EXPECT_EQ(derivative(p, 2.0), complex(4, 0));
  for (complex z : {complex(0.3, 1.2), complex(-4, 7), complex(2, -0.5)})
    EXPECT_LT(std::abs(derivative(e, z) - (dynrays::apply(e, z) - e.c)), 1e-13);
  EXPECT_THROW(dynrays::apply(e, complex(800, 0)), NumericalError);
}

TEST(MapSpec, ExponentialParameterNormalized) {
  const auto e = MapSpec::exponential({1, 3 * kPi + 0.25});
  EXPECT_NEAR(e.c.imag(), -kPi + 0.25, 1e-12);
  EXPECT_NEAR(MapSpec::exponential({0, kPi}).c.imag(), -kPi, 1e-12);
  EXPECT_THROW(MapSpec::polynomial(1, 0.0), ConfigError);
}

TEST(InverseBranchExp, Examples) {
  const auto e = MapSpec::exponential({-2, 0.5});
  EXPECT_LT(std::abs(inverse_branch_exp(e, 0, e.c + 1.0)), 1e-15);
  EXPECT_LT(std::abs(inverse_branch_exp(e, 3, e.c + std::exp(2.0)) - complex(2, 6 * kPi)), 1e-12);
  EXPECT_THROW(inverse_branch_exp(e, 0, e.c - 3.0), BranchError);
  EXPECT_THROW(inverse_branch_exp(e, 0, e.c), BranchError);
}

TEST(InverseBranchExp, RoundTripAndStripMembership) {
  const auto e = MapSpec::exponential({-2, 0.3});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20, 20);
  int checked = 0;
  while (checked < 100) {
    const complex w(u(rng), u(rng));
    if (slit_distance(e, w) < 1e-3) continue;
    const long n = static_cast<long>(rng() % 9) - 4;
    const complex z = inverse_branch_exp(e, n, w);
    EXPECT_LT(std::abs(dynrays::apply(e, z) - w), 1e-12 * std::max(1.0, std::abs(w)));
    EXPECT_GT(z.imag(), kTwoPi * n - kPi);
    EXPECT_LT(z.imag(), kTwoPi * n + kPi);
    // |L_n'(w)| |w - c| = 1, with L_n' from a central difference.
    const double h = 1e-6 * std::max(1.0, std::abs(w - e.c));
    const complex d = (inverse_branch_exp(e, n, w + h) - inverse_branch_exp(e, n, w - h)) / (2 * h);
    EXPECT_NEAR(std::abs(d) * std::abs(w - e.c), 1.0, 1e-7);
    ++checked;
  }
}

TEST(InverseBranchPoly, Examples) {
  const auto p = MapSpec::polynomial(2, 0.0);
  EXPECT_LT(std::abs(inverse_branch_poly(p, 0, 4.0) - 2.0), 1e-12);
  EXPECT_LT(std::abs(inverse_branch_poly(p, 1, 4.0) + 2.0), 1e-12);
  EXPECT_THROW(inverse_branch_poly(p, 0, 0.0), BranchError);
}

TEST(InverseBranchPoly, TwoStepsInvertSecondIterate) {
  const auto p = MapSpec::polynomial(2, {-1, 0});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 20; ++i) {
    const complex w(u(rng), u(rng));
    const complex z = inverse_branch_poly(p, static_cast<int>(rng() % 2), inverse_branch_poly(p, static_cast<int>(rng() % 2), w));
    EXPECT_LT(std::abs(dynrays::apply(p, dynrays::apply(p, z)) - w), 1e-10 * std::max(1.0, std::abs(w)));
  }
}

TEST(InverseBranchPoly, SectorMatchesBottcherAngle) {
  const auto p = MapSpec::polynomial(3, {-0.2, 0.4});
  for (complex w : {complex(3, 1), complex(-2.5, 0.7), complex(0.4, -2.9)})
    for (int j = 0; j < 3; ++j) {
      const double a = bottcher_angle(p, inverse_branch_poly(p, j, w));
      EXPECT_EQ(static_cast<int>(std::floor(3 * a)), j);
    }
}

TEST(Itinerary, Examples) {
  const auto e = MapSpec::exponential({-2, 0});
  EXPECT_EQ(itinerary(e, 10.0, 6), std::vector<long>(6, 0));
  EXPECT_EQ(itinerary(e, complex(10, 6 * kPi), 1), std::vector<long>{3});
  // f(z) = -2 + i pi sits on the boundary between S_0 and S_1.
  const complex z(std::log(kPi), kPi / 2);
  EXPECT_THROW(
      {
        try {
          itinerary(e, z, 3);
        } catch (const DomainError& err) {
          EXPECT_NE(std::string(err.what()).find("step 1"), std::string::npos);
          throw;
        }
      },
      DomainError);
}

TEST(Itinerary, ShiftCommutesWithMap) {
  const auto e = MapSpec::exponential({-2.5, 0.2});
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> re(-1, 2.5), im(-15, 15);
  for (int i = 0; i < 200; ++i) {
    const complex z(re(rng), im(rng));
    try {
      const auto a = itinerary(e, z, 5);
      const auto b = itinerary(e, dynrays::apply(e, z), 4);
      EXPECT_EQ(std::vector<long>(a.begin() + 1, a.end()), b);
    } catch (const Error&) {
    }
  }
}

TEST(PeriodicPoints, QuadraticFixedPoints) {
  const auto pts = find_periodic_points(MapSpec::polynomial(2, 0.0), 1);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_LT(std::abs(pts[0].location), 1e-12);
  EXPECT_EQ(pts[0].stability, Stability::Superattracting);
  EXPECT_LT(std::abs(pts[1].location - 1.0), 1e-12);
  EXPECT_LT(std::abs(pts[1].multiplier - 2.0), 1e-12);
  EXPECT_EQ(pts[1].stability, Stability::Repelling);

  const auto b = find_periodic_points(MapSpec::polynomial(2, -1.0), 1);
  ASSERT_EQ(b.size(), 2u);
  const double s5 = std::sqrt(5.0);
  EXPECT_LT(std::abs(b[0].location - (1 - s5) / 2), 1e-12);
  EXPECT_LT(std::abs(b[0].multiplier - (1 - s5)), 1e-11);
  EXPECT_LT(std::abs(b[1].location - (1 + s5) / 2), 1e-12);
  EXPECT_LT(std::abs(b[1].multiplier - (1 + s5)), 1e-11);
}

TEST(PeriodicPoints, ExponentialStripZero) {
  const auto e = MapSpec::exponential({-2, 0});
  const double x = bisect_fixed_point(-2, 0.5, 3.0);
  const auto pts = find_periodic_points(e, 1, {complex(std::log(2.0), 0)});
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(pts[0].location.real(), x, 1e-12);
  EXPECT_NEAR(pts[0].location.real(), 1.1462, 1e-4);
  EXPECT_NEAR(pts[0].multiplier.real(), x + 2, 1e-10);
  EXPECT_TRUE(pts[0].repelling());
}

TEST(PeriodicPoints, ResidualAndMultiplierStability) {
  const std::vector<std::pair<MapSpec, int>> cases{{MapSpec::polynomial(2, {-1, 0}), 2},
                                                   {MapSpec::polynomial(3, {0.1, 0.3}), 2},
                                                   {MapSpec::exponential({-2, 0}), 1},
                                                   {MapSpec::exponential({-1.5, 0.4}), 2}};
  for (const auto& [m, p] : cases) {
    const auto pts = find_periodic_points(m, p);
    EXPECT_FALSE(pts.empty());
    for (const auto& pt : pts) {
      EXPECT_LT(std::abs(iterate_with_derivative(m, pt.location, pt.period).first - pt.location), 1e-10);
      // One further Newton step on f^p - z barely moves the multiplier.
      auto [fz, dz] = iterate_with_derivative(m, pt.location, pt.period);
      const complex z2 = pt.location - (fz - pt.location) / (dz - 1.0);
      const complex m2 = iterate_with_derivative(m, z2, pt.period).second;
      EXPECT_LT(std::abs(m2 - pt.multiplier), 1e-8 * std::max(1.0, std::abs(pt.multiplier)));
    }
  }
}

TEST(PeriodicPoints, OffStripFixedPointsRepelForBoundedPostsingularSets) {
  for (complex c : {complex(-2, 0), complex(-3, 0), complex(-2, 0.5)}) {
    const auto e = MapSpec::exponential(c);
    ASSERT_TRUE(postsingular_probe(e, 2000, 10).bounded);
    const auto pts = find_periodic_points(e, 1);
    int off_strip = 0;
    for (const auto& pt : pts)
      if (strip_index(pt.location) != 0) {
        EXPECT_TRUE(pt.repelling()) << pt.location;
        ++off_strip;
      }
    EXPECT_GE(off_strip, 4);
  }
}

TEST(Linearization, SquareRootBranch) {
  const auto m = MapSpec::polynomial(2, 0.0);
  const auto alpha = find_periodic_points(m, 1)[1];
  LinearizationConfig cfg;
  cfg.initial_radius = 0.1;
  cfg.depth = 20;
  const auto lin = linearization_fit(m, alpha, cfg);
  EXPECT_DOUBLE_EQ(lin.radius, 0.1);
  EXPECT_LE(lin.distortion, 2.0);
  // Oracle: psi^n(x) = x^{1/2^n}, so |(psi^n)'(x)| 2^n = |x|^{1/2^n - 1}.
  double worst = 1.0;
  for (int k = 0; k < 64; ++k) {
    const complex x = 1.0 + std::polar(0.1 * (k % 4 + 1) / 4.0, kTwoPi * k / 64);
    for (int n = 1; n <= 20; ++n) {
      const double r = std::pow(std::abs(x), std::ldexp(1.0, -n) - 1.0);
      worst = std::max({worst, r, 1 / r});
    }
  }
  EXPECT_NEAR(lin.distortion, worst, 0.02 * worst);
  EXPECT_LE(validate_linearization(m, lin, 40), lin.distortion * 1.001);
}

TEST(Linearization, RejectsNonRepellingPoints) {
  const auto m = MapSpec::polynomial(2, 0.25);
  const auto pt = make_periodic_point(m, 0.5, 1);
  EXPECT_EQ(pt.stability, Stability::ParabolicSuspect);
  EXPECT_THROW(linearization_fit(m, pt), ConfigError);
}

TEST(Linearization, ExponentialAndCycles) {
  const auto e = MapSpec::exponential({-2, 0});
  const auto pt = find_periodic_points(e, 1, {complex(1, 0)})[0];
  const auto lin = linearization_fit(e, pt);
  EXPECT_GT(lin.radius, 0.0);
  EXPECT_LE(validate_linearization(e, lin, 2 * lin.depth), lin.distortion * 1.001);

  const auto b = MapSpec::polynomial(2, {-1.3, 0.1});
  for (const auto& q : find_periodic_points(b, 2))
    if (q.period == 2 && q.repelling()) {
      const auto l2 = linearization_fit(b, q);
      EXPECT_LE(validate_linearization(b, l2, 2 * l2.depth), l2.distortion * 1.001);
    }
}

TEST(Postsingular, Examples) {
  const auto r = postsingular_probe(MapSpec::exponential({-2, 0}), 10000, 10);
  EXPECT_TRUE(r.bounded);
  EXPECT_TRUE(r.heuristic);
  EXPECT_NEAR(r.orbit_samples.back().real(), -1.8414, 1e-4);
  EXPECT_FALSE(postsingular_probe(MapSpec::exponential({1, 0}), 100, 10).bounded);
  EXPECT_TRUE(postsingular_probe(MapSpec::exponential({-3, 0}), 0, 10).bounded);
}

TEST(Bottcher, IdentityForPowerMap) {
  const auto m = MapSpec::polynomial(2, 0.0);
  for (complex z : {complex(1.5, 0.2), complex(-3, 4), complex(0.2, -1.1)}) EXPECT_LT(std::abs(bottcher(m, z) - z), 1e-12);
}

TEST(Bottcher, DepthConvergenceOracle) {
  const auto m = MapSpec::polynomial(2, -1.0);
  // (f^n(z))^{1/2^n}, principal roots: fine here because the orbit stays on the positive axis.
  auto root_at_depth = [&](int n) {
    double w = 10;
    for (int k = 0; k < n; ++k) w = w * w - 1;
    return std::exp(std::log(w) / std::ldexp(1.0, n));
  };
  EXPECT_LT(std::abs(root_at_depth(6) - root_at_depth(7)), 1e-8);
  const complex b = bottcher(m, 10.0);
  EXPECT_NEAR(b.real(), root_at_depth(7), 1e-6);
  // The single-step value sqrt(99) = 9.94987... is not yet converged.
  EXPECT_NEAR(root_at_depth(1), 9.94987, 1e-5);
  EXPECT_GT(std::abs(b.real() - root_at_depth(1)), 1e-4);
  EXPECT_NEAR(b.imag(), 0.0, 1e-14);
}

TEST(Bottcher, FunctionalEquationNearJuliaSet) {
  const auto m = MapSpec::polynomial(2, {-1, 0});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.8, 1.8);
  int checked = 0;
  while (checked < 15) {
    const complex z(u(rng), u(rng));
    BottcherData d;
    try {
      d = bottcher_data(m, z);
    } catch (const DomainError&) {
      continue;
    }
    const complex bz = d.value();
    EXPECT_GT(std::abs(bz), 1.0);
    const complex bf = bottcher(m, dynrays::apply(m, z));
    EXPECT_LT(std::abs(bz * bz - bf), 1e-8 * std::abs(bf));
    ++checked;
  }
}

TEST(Bottcher, NewtonRayPointsCarryTheirAngle) {
  const auto m = MapSpec::polynomial(2, {-1, 0});
  const auto orbit = AngleOrbit::from(PolyAngle(1, 3, 2).digits());
  for (double t : {1.0, 0.1, 0.01}) {
    const complex z = newton_ray_at(m, orbit, t);
    const auto d = bottcher_data(m, z);
    EXPECT_NEAR(d.potential, t, 1e-9 * std::max(1.0, t));
    EXPECT_LT(circle_distance(d.angle.at(0), 1.0 / 3), 1e-9);
  }
}

TEST(Bottcher, NonEscapingPointIsRejected) {
  EXPECT_THROW(bottcher(MapSpec::polynomial(2, -1.0), 0.0), DomainError);
}

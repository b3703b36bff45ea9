#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dynrays/geometry.hpp"

using namespace dynrays;

namespace {

Curve segment(complex a, complex b) { return Curve{{a, b}}; }

// Closed form of the twice-punctured density along [a, b] in (0, 1):
// the antiderivative of 1 / (r |log r|) is -log|log r|.
double twice_punctured_exact(double a, double b) { return std::log(std::abs(std::log(a)) / std::abs(std::log(b))); }

}  // namespace

TEST(HyperbolicLength, ExteriorDiskRadialSegment) {
  const double e = std::exp(1.0);
  EXPECT_NEAR(hyperbolic_length(segment(e, e * e), DensityModel::exterior_disk(1.0)), std::log(2.0), 1e-6);
}

TEST(HyperbolicLength, HalfPlaneVerticalUnitSegment) {
  EXPECT_NEAR(hyperbolic_length(segment({1, 0}, {1, 1}), DensityModel::half_plane(0.0)), 0.5, 1e-12);
}

TEST(HyperbolicLength, TwicePuncturedMatchesAntiderivative) {
  for (double a : {1e-3, 1e-2, 0.2}) {
    const double b = 2 * a;
    EXPECT_NEAR(hyperbolic_length(segment(a, b), DensityModel::twice_punctured()), twice_punctured_exact(a, b),
                1e-6 * twice_punctured_exact(a, b));
  }
}

TEST(HyperbolicLength, CuspIntegralDivergesWhileShortSegmentsVanish) {
  const auto model = DensityModel::twice_punctured();
  double prev_short = INFINITY, prev_long = 0.0;
  for (int k = 2; k <= 12; k += 2) {
    const double eps = std::pow(10.0, -k);
    const double short_len = hyperbolic_length(segment(eps, 2 * eps), model);
    const double long_len = hyperbolic_length(segment(std::pow(eps, 4.0), 0.5), model);
    EXPECT_LT(short_len, prev_short);
    EXPECT_GT(long_len, prev_long);
    prev_short = short_len;
    prev_long = long_len;
  }
  EXPECT_LT(prev_short, 0.03);
  EXPECT_GT(prev_long, 4.0);
}

TEST(HyperbolicLength, OutsideValidityRegionThrows) {
  EXPECT_THROW(hyperbolic_length(segment({-1, 0}, {1, 0}), DensityModel::half_plane(0.0)), DomainError);
  EXPECT_THROW(hyperbolic_length(segment({0.5, 0}, {2, 0}), DensityModel::exterior_disk(1.0)), DomainError);
  EXPECT_THROW(hyperbolic_length(segment({0.5, 0}, {1.5, 0}), DensityModel::twice_punctured()), DomainError);
}

TEST(HyperbolicLength, AdditiveUnderConcatenation) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(2.0, 6.0);
  const auto model = DensityModel::exterior_disk(1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const complex a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    const double whole = hyperbolic_length(Curve{{a, b, c}}, model);
    const double parts = hyperbolic_length(segment(a, b), model) + hyperbolic_length(segment(b, c), model);
    EXPECT_NEAR(whole, parts, 2e-6 * whole);
  }
}

TEST(HyperbolicLength, InvariantUnderRefinement) {
  const auto model = DensityModel::half_plane(-5.0);
  Curve c;
  for (int k = 0; k <= 20; ++k) c.points.push_back(std::polar(1.0 + 0.1 * k, 0.2 * k));
  const double base = hyperbolic_length(c, model);
  const double fine = hyperbolic_length(refine(c, 0.003), model);
  EXPECT_NEAR(fine, base, 1e-6 * base);
  EXPECT_NEAR(refine(c, 0.003).length(), c.length(), 1e-12 * c.length());
}

// Segments of fixed model length pushed toward the puncture: from x, the
// endpoint y with l([x, y]) = ell solves |log y| = |log x| e^{-ell}.
TEST(HyperbolicLength, FixedLengthSegmentsShrinkNearCusp) {
  const double ell = 0.5;
  const auto model = DensityModel::twice_punctured();
  double prev = INFINITY;
  for (int k = 2; k <= 14; k += 2) {
    const double x = std::pow(10.0, -k);
    const double y = std::exp(std::log(x) * std::exp(-ell));
    EXPECT_NEAR(hyperbolic_length(segment(x, y), model), ell, 1e-5);
    EXPECT_LT(y - x, prev);
    prev = y - x;
  }
  EXPECT_LT(prev, 1e-3);
}

// Comparison-model Schwarz surrogate: a curve in the half-plane H_C, pulled
// back by L_0, is not longer in the exterior-disk model than it was in the
// half-plane model.
TEST(HyperbolicLength, PullbackDoesNotExpandComparisonLength) {
  const MapSpec m = MapSpec::exponential({-2.0, 0.0});
  const double C = 10.0, R = 1.0;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> re(C + 1, 60.0), im(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    Curve c;
    for (int k = 0; k < 5; ++k) c.points.push_back({re(rng), im(rng)});
    Curve back;
    for (auto z : c.points) back.points.push_back(inverse_branch_exp(m, 0, z));
    const double before = hyperbolic_length(c, DensityModel::half_plane(C));
    const double after = hyperbolic_length(back, DensityModel::exterior_disk(R));
    EXPECT_LE(after, before + 1e-9) << trial;
  }
}

TEST(DensityDecay, TabulatedRatios) {
  const auto rep = density_decay_check(DensityModel::exterior_disk(1.0), {std::exp(1.0), std::exp(10.0)});
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_NEAR(rep.rows[0].ratio, 1.0, 1e-14);
  EXPECT_NEAR(rep.rows[1].ratio, 0.1, 1e-14);
  EXPECT_TRUE(rep.monotone);
}

TEST(DensityDecay, MonotoneForIncreasingRadii) {
  std::vector<double> radii;
  for (double r = 1.5; r < 1e8; r *= 1.7) radii.push_back(r);
  EXPECT_TRUE(density_decay_check(DensityModel::exterior_disk(1.0), radii).monotone);
  EXPECT_FALSE(density_decay_check(DensityModel::exterior_disk(1.0), {5.0, 3.0}).monotone);
  EXPECT_FALSE(density_decay_check(DensityModel::exterior_disk(2.0), {1.0}).monotone);
}

TEST(ShrinkingProfile, PowerMapMatchesExplicitRay) {
  const MapSpec m = MapSpec::polynomial(2, {0.0, 0.0});
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(std::ldexp(1.0, -k));
  const auto prof = shrinking_profile(m, std::vector<PolyAngle>{PolyAngle::parse("0", 2)}, grid, Window{0, 100});
  for (const auto& row : prof.rows) {
    EXPECT_NEAR(row.max_length, std::exp(2 * row.t) - std::exp(row.t), 1e-10) << row.t;
    EXPECT_EQ(row.n_samples, 1);
  }
}

TEST(ShrinkingProfile, BasilicaSampleAnglesShrink) {
  const MapSpec m = MapSpec::polynomial(2, {-1.0, 0.0});
  std::vector<PolyAngle> angles;
  for (auto s : {"0", "1/3", "2/3", "1/7", "2/7", "4/7"}) angles.push_back(PolyAngle::parse(s, 2));
  std::vector<double> grid;
  for (int k = 0; k <= 12; ++k) grid.push_back(std::ldexp(1.0, -k));
  const auto prof = shrinking_profile(m, angles, grid, Window{0, 10});
  EXPECT_TRUE(prof.warnings.empty());
  EXPECT_TRUE(prof.strictly_decreasing());
  EXPECT_LT(prof.rows.back().max_length, 0.05);
  const double te = prof.t_eps(0.05);
  ASSERT_FALSE(std::isnan(te));
  EXPECT_GT(te, 0.0);
  EXPECT_EQ(prof.rows.back().n_samples, 6);
}

TEST(ShrinkingProfile, ExponentialPullbackFamilyShrinks) {
  const MapSpec m = MapSpec::exponential({-2.0, 0.0});
  const auto family = pullback_family(ExpAddress::parse("[0]"), 3, 2);
  EXPECT_EQ(family.size(), 1u + 5 + 25 + 125);
  const GrowthModel F(m);
  std::vector<double> grid;
  for (double t = 2.0; grid.size() < 10; t = F.Finv(t)) grid.push_back(t);
  const auto prof = shrinking_profile(m, family, grid, Window{1.1462, 5.0});
  EXPECT_TRUE(prof.strictly_decreasing());
  EXPECT_LT(prof.rows.back().max_length, 0.1);
  for (const auto& row : prof.rows) EXPECT_GT(row.n_samples, 0);
}

TEST(ShrinkingProfile, RejectsIncreasingGrid) {
  const MapSpec m = MapSpec::polynomial(2, {0.0, 0.0});
  EXPECT_THROW(shrinking_profile(m, std::vector<PolyAngle>{PolyAngle::parse("0", 2)}, {0.1, 0.2}, Window{0, 1}),
               ConfigError);
}

TEST(BoundedDomains, EmptyPrefixIsIdentity) {
  const MapSpec m = MapSpec::exponential({-2.0, 0.0});
  const auto rep = bounded_fundamental_domains_check(m, ExpAddress::parse("[0]"), {{}}, 20.0, 10.0);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].p1_error, 0.0);
  EXPECT_TRUE(rep.pass());
}

TEST(BoundedDomains, SingleDigitPrefixPasses) {
  const MapSpec m = MapSpec::exponential({-2.0, 0.0});
  const auto rep = bounded_fundamental_domains_check(m, ExpAddress::parse("[0]"), {{1}, {-2}, {2, 1}}, 20.0, 10.0);
  EXPECT_TRUE(rep.pass()) << rep.kappa;
  for (const auto& row : rep.rows) {
    EXPECT_GT(row.p1_checks, 0);
    EXPECT_LT(row.p1_error, 1e-8);
    EXPECT_GT(row.p2_margin, 0.0);
  }
  // I_20 is nearly the real segment [20, e^20 - 1].
  EXPECT_NEAR(rep.kappa, 1.0, 1e-3);
}

TEST(BoundedDomains, ThresholdPreconditions) {
  const MapSpec m = MapSpec::exponential({-2.0, 0.0});
  EXPECT_THROW(bounded_fundamental_domains_check(m, ExpAddress::parse("[0]"), {{1}}, 1.0, 10.0), ConfigError);
  EXPECT_THROW(bounded_fundamental_domains_check(m, ExpAddress::parse("[0]"), {{1}}, 800.0, 10.0), ConfigError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dynrays/landing.hpp"

using namespace dynrays;

namespace {

const MapSpec kSquare = MapSpec::polynomial(2, {0.0, 0.0});
const MapSpec kBasilica = MapSpec::polynomial(2, {-1.0, 0.0});
const MapSpec kExp = MapSpec::exponential({-2.0, 0.0});

// Real fixed point of e^x - 2 by backward iteration x -> log(x + 2).
double exp_fixed_point() {
  double x = 5.0;
  for (int i = 0; i < 200; ++i) x = std::log(x + 2.0);
  return x;
}

// Fixed points of z^2 + c from the quadratic formula.
complex quadratic_fixed_point(complex c, int sign) { return 0.5 + static_cast<double>(sign) * std::sqrt(0.25 - c); }

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

// ---------------------------------------------------------------------------
// Single rays

TEST(LinearFit, RecoversExactLine) {
  const auto fit = linear_fit({0, 1, 2, 3}, {1.0, -1.0, -3.0, -5.0});
  EXPECT_NEAR(fit.slope, -2.0, 1e-14);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-14);
  EXPECT_NEAR(fit.r2, 1.0, 1e-14);
  EXPECT_EQ(fit.n, 4);
}

TEST(LandRay, PowerMapAngleZeroLandsAtOneWithRateTwo) {
  const auto v = land_ray(kSquare, PolyAngle::parse("0", 2));
  ASSERT_TRUE(v.landed) << v.diagnostics;
  EXPECT_LT(std::abs(v.point - 1.0), 1e-6);
  EXPECT_NEAR(v.nu, 2.0, 0.2);
  EXPECT_GT(v.r2, 0.99);
}

TEST(LandRay, BasilicaAngleZeroLandsAtBeta) {
  const auto v = land_ray(kBasilica, PolyAngle::parse("0", 2));
  ASSERT_TRUE(v.landed) << v.diagnostics;
  EXPECT_LT(std::abs(v.point - quadratic_fixed_point(-1.0, +1)), 1e-6);
}

TEST(LandRay, ExponentialZeroAddressLandsAtRealFixedPoint) {
  const auto v = land_ray(kExp, ExpAddress::parse("[0]"));
  ASSERT_TRUE(v.landed) << v.diagnostics;
  EXPECT_LT(std::abs(v.point - exp_fixed_point()), 1e-6);
  // nu tracks the multiplier e^x of the landing point.
  EXPECT_NEAR(v.nu, std::exp(exp_fixed_point()), 0.1 * std::exp(exp_fixed_point()));
}

TEST(LandRay, RadiiSatisfyFittedEnvelope) {
  const auto v = land_ray(kBasilica, PolyAngle::parse("1/3", 2));
  ASSERT_TRUE(v.landed) << v.diagnostics;
  for (std::size_t m = 0; m < v.radii.size(); ++m)
    EXPECT_LE(v.radii[m], v.A / std::pow(v.nu, static_cast<double>(m)) * (1 + 1e-12)) << m;
}

TEST(LandRay, FastContractionReachesNoiseFloor) {
  // |multiplier| of the fixed point in strip 2 is about 14.6; few levels
  // stay above the noise floor but the decay is seen in full.
  const auto v = land_ray(kExp, ExpAddress::parse("[2]"));
  ASSERT_TRUE(v.landed) << v.diagnostics;
  const complex z = v.point;
  EXPECT_LT(std::abs(std::exp(z) - 2.0 - z), 1e-9);
}

TEST(LandRay, TooFewLevelsIsNotConverged) {
  LandingConfig cfg;
  cfg.max_levels = 4;
  cfg.trace.max_levels = 4;
  const auto v = land_ray(kBasilica, PolyAngle::parse("1/3", 2), cfg);
  EXPECT_FALSE(v.landed);
  EXPECT_FALSE(v.diagnostics.empty());
}

// ---------------------------------------------------------------------------
// Pullback construction

TEST(PullbackLanding, PowerMapFixedPoint) {
  const auto pt = make_periodic_point(kSquare, 1.0, 1);
  const auto [set, run] = pullback_landing(kSquare, pt);
  ASSERT_EQ(set.angles.size(), 1u);
  EXPECT_EQ(set.angles[0], PolyAngle::parse("0", 2));
  EXPECT_EQ(set.period, 1);
  EXPECT_TRUE(set.verified(1e-6));
  // The only angle fixed by doubling is 0: brute force over k / (2 - 1).
  for (std::int64_t k = 0; k < 1; ++k) EXPECT_EQ(PolyAngle(k, 1, 2).times_base(), PolyAngle(k, 1, 2));
}

TEST(PullbackLanding, BasilicaAlpha) {
  const complex alpha = quadratic_fixed_point(-1.0, -1);
  const auto pt = make_periodic_point(kBasilica, alpha, 1);
  const auto [set, run] = pullback_landing(kBasilica, pt);
  EXPECT_EQ(as_set(set.coordinates()), (std::set<std::string>{"1/3", "2/3"}));
  EXPECT_EQ(set.period, 2);
  EXPECT_EQ(run.cycle_period, 2u);
  // Independent traces of both angles land at alpha.
  for (auto a : {"1/3", "2/3"}) {
    const auto v = land_ray(kBasilica, PolyAngle::parse(a, 2));
    ASSERT_TRUE(v.landed) << a;
    EXPECT_LT(std::abs(v.point - alpha), 1e-6) << a;
  }
}

TEST(PullbackLanding, RabbitAlphaHasThreeRays) {
  const complex c(-0.12256116687665, 0.74486176661974);
  const MapSpec rabbit = MapSpec::polynomial(2, c);
  const auto pt = make_periodic_point(rabbit, quadratic_fixed_point(c, -1), 1);
  const auto [set, run] = pullback_landing(rabbit, pt);
  EXPECT_EQ(as_set(set.coordinates()), (std::set<std::string>{"1/7", "2/7", "4/7"}));
  EXPECT_EQ(set.period, 3);
  EXPECT_TRUE(set.verified(1e-6));
}

TEST(PullbackLanding, BasilicaPeriodThreePoints) {
  // Each repelling period-3 point of the basilica receives exactly one ray
  // of period 3, and the six points account for all six period-3 angles.
  std::set<std::string> seen;
  int points = 0;
  for (const auto& pt : find_periodic_points(kBasilica, 3)) {
    if (pt.period != 3) continue;
    ++points;
    const auto [set, run] = pullback_landing(kBasilica, pt);
    ASSERT_EQ(set.size(), 1u);
    EXPECT_EQ(set.period, 3);
    EXPECT_TRUE(set.verified(1e-6));
    seen.insert(set.coordinates()[0]);
  }
  EXPECT_EQ(points, 6);
  EXPECT_EQ(seen, (std::set<std::string>{"1/7", "2/7", "3/7", "4/7", "5/7", "6/7"}));
}

TEST(PullbackLanding, ExponentialStripZeroFixedPoint) {
  const auto pt = make_periodic_point(kExp, exp_fixed_point(), 1);
  EXPECT_NEAR(pt.location.real(), exp_fixed_point(), 1e-12);
  const auto [set, run] = pullback_landing(kExp, pt);
  ASSERT_EQ(set.addresses.size(), 1u);
  EXPECT_EQ(set.addresses[0], ExpAddress::parse("[0]"));
  EXPECT_TRUE(set.verified(1e-6));
  EXPECT_LE(run.max_sup_norm, run.M);
  ASSERT_TRUE(run.postsingular.has_value());
  EXPECT_TRUE(run.postsingular->bounded);
  // Other fixed addresses j-bar land elsewhere.
  for (long j : {-2L, -1L, 1L, 2L}) {
    const auto v = land_ray(kExp, ExpAddress::constant(j));
    EXPECT_TRUE(!v.landed || std::abs(v.point - pt.location) > 1e-3) << j;
  }
}

TEST(PullbackLanding, ExponentialOffAxisPoints) {
  for (const auto& pt : find_periodic_points(kExp, 2)) {
    if (std::abs(pt.location.imag()) > 14 || !pt.repelling()) continue;
    const auto [set, run] = pullback_landing(kExp, pt);
    EXPECT_TRUE(set.verified(1e-6)) << pt.location;
    EXPECT_EQ(static_cast<int>(set.addresses.size()) * set.period % pt.period, 0) << pt.location;
    EXPECT_LE(run.max_sup_norm, run.M) << pt.location;
  }
}

// Invariants of the run, on every reference target.
class PullbackInvariants : public ::testing::TestWithParam<int> {
 protected:
  static std::pair<MapSpec, PeriodicPoint> target(int i) {
    switch (i) {
      case 0: return {kSquare, make_periodic_point(kSquare, 1.0, 1)};
      case 1: return {kBasilica, make_periodic_point(kBasilica, quadratic_fixed_point(-1.0, -1), 1)};
      case 2: return {kBasilica, make_periodic_point(kBasilica, quadratic_fixed_point(-1.0, +1), 1)};
      default: return {kExp, make_periodic_point(kExp, exp_fixed_point(), 1)};
    }
  }
};

TEST_P(PullbackInvariants, Hold) {
  const auto [m, pt] = target(GetParam());
  const auto [set, run] = pullback_landing(m, pt);
  EXPECT_TRUE(run.shift_consistent);
  EXPECT_TRUE(run.coherent);
  EXPECT_GT(run.coherence_checks, 0);
  EXPECT_GT(run.identity_checks, 0);
  EXPECT_LT(run.identity_error, 1e-8);
  EXPECT_LT(run.radius_U, run.radius_U_prime);
  EXPECT_NEAR(run.eps, run.radius_U_prime - run.radius_U, 1e-15);
  EXPECT_LT(run.t0, run.t_eps);
  for (double d : run.curve_max_distance) EXPECT_LT(d, run.radius_U_prime);
  // Containment decays like mu^{-m}.
  EXPECT_NEAR(run.containment_fit.slope, run.expected_slope, 0.1 * std::abs(run.expected_slope));
  EXPECT_GT(run.containment_fit.r2, 0.99);
  const double mu = pt.modulus();
  for (std::size_t k = 0; k < run.containment_radii.size(); ++k) {
    if (run.containment_radii[k] < 1e-11) break;
    EXPECT_LE(run.containment_radii[k],
              run.containment_constant * 2 * run.radius_U_prime / std::pow(mu, static_cast<double>(k)) * (1 + 1e-9));
  }
}

TEST_P(PullbackInvariants, StableUnderDoubledBudget) {
  const auto [m, pt] = target(GetParam());
  PullbackConfig cfg;
  const auto base = pullback_landing(m, pt, cfg).first.coordinates();
  cfg.budget *= 2;
  const auto doubled = pullback_landing(m, pt, cfg).first.coordinates();
  EXPECT_EQ(as_set(doubled), as_set(base));
}

INSTANTIATE_TEST_SUITE_P(Targets, PullbackInvariants, ::testing::Range(0, 4));

TEST(PullbackLanding, AddressBoundIndependentOfSeedRayOfEqualNorm) {
  const auto pt = make_periodic_point(kExp, exp_fixed_point(), 1);
  const auto a = pullback_landing(kExp, pt, ExpAddress::parse("[1]")).second;
  const auto b = pullback_landing(kExp, pt, ExpAddress::parse("[-1]")).second;
  EXPECT_EQ(a.M, b.M);
  EXPECT_LE(a.max_sup_norm, a.M);
  EXPECT_LE(b.max_sup_norm, b.M);
}

TEST(PullbackLanding, Errors) {
  // Attracting fixed point of z^2 - 1/4 + small: 0.5 - sqrt(...) has |f'| < 1.
  const MapSpec m = MapSpec::polynomial(2, {0.1, 0.0});
  const auto attracting = make_periodic_point(m, quadratic_fixed_point(0.1, -1), 1);
  EXPECT_THROW(pullback_landing(m, attracting), ConfigError);

  const auto pt = make_periodic_point(kBasilica, quadratic_fixed_point(-1.0, -1), 1);
  PullbackConfig no_seed;
  no_seed.seed_budget = 0;
  EXPECT_THROW(pullback_landing(kBasilica, pt, no_seed), NumericalError);
  PullbackConfig narrow;
  narrow.window = 3;  // a period-2 block cycle needs two full repeats
  EXPECT_THROW(pullback_landing(kBasilica, pt, narrow), NumericalError);

  // e^z + 1: the singular orbit escapes, so the probe rejects the map.
  const MapSpec escaping = MapSpec::exponential({1.0, 0.0});
  PeriodicPoint fake;
  fake.location = {0.3, 1.0};
  fake.multiplier = 3.0;
  EXPECT_THROW(pullback_landing(escaping, fake), ConfigError);
}

// ---------------------------------------------------------------------------
// Audit

TEST(LandingSetAudit, BasilicaPasses) {
  const auto pt = make_periodic_point(kBasilica, quadratic_fixed_point(-1.0, -1), 1);
  const auto set = pullback_landing(kBasilica, pt).first;
  const auto rep = landing_set_audit(set, kBasilica);
  EXPECT_TRUE(rep.pass());
  EXPECT_EQ(rep.rotations_checked, 2);
  EXPECT_EQ(circle_distance(set.angles[0], set.angles[1]), Rational(1, 3));
}

TEST(LandingSetAudit, NonAdjacentExponentialAddressesFlagged) {
  LandingSet set;
  set.kind = MapKind::Exponential;
  set.point = make_periodic_point(kExp, exp_fixed_point(), 1);
  set.period = 1;
  set.addresses = {ExpAddress::parse("[0]"), ExpAddress::parse("[2]")};
  const auto rep = landing_set_audit(set, kExp);
  EXPECT_FALSE(rep.adjacency_ok);
  EXPECT_FALSE(rep.pass());
  EXPECT_FALSE(rep.violations.empty());
}

TEST(LandingSetAudit, SingletonPasses) {
  LandingSet set;
  set.kind = MapKind::Exponential;
  set.point = make_periodic_point(kExp, exp_fixed_point(), 1);
  set.period = 1;
  set.addresses = {ExpAddress::parse("[0]")};
  EXPECT_TRUE(landing_set_audit(set, kExp).pass());
}

TEST(LandingSetAudit, FlagsDistantAnglesMixedPeriodsAndCap) {
  LandingSet set;
  set.kind = MapKind::Polynomial;
  set.point = make_periodic_point(kSquare, 1.0, 1);
  set.period = 1;
  set.angles = {PolyAngle::parse("0", 2), PolyAngle::parse("1/3", 2), PolyAngle::parse("2/3", 2)};
  AuditConfig cfg;
  cfg.check_rotations = false;
  cfg.max_rays = 2;
  const auto rep = landing_set_audit(set, kSquare, cfg);
  EXPECT_FALSE(rep.cycle_ok);
  EXPECT_FALSE(rep.cardinality_ok);
  EXPECT_TRUE(rep.adjacency_ok);  // pairwise distances are all 1/3
  set.angles = {PolyAngle::parse("1/7", 2), PolyAngle::parse("6/7", 2)};
  EXPECT_TRUE(landing_set_audit(set, kSquare, cfg).adjacency_ok);
  // For D = 2 the bound 1/2 never binds; under z^3 angles 1/2 apart violate 1/3.
  const MapSpec cube = MapSpec::polynomial(3, {0.0, 0.0});
  set.angles = {PolyAngle::parse("0", 3), PolyAngle::parse("1/2", 3)};
  EXPECT_FALSE(landing_set_audit(set, cube, cfg).adjacency_ok);
}

// ---------------------------------------------------------------------------
// Hyperbolic sets

TEST(HyperbolicAccessibility, SingleFixedPointAgreesWithPullback) {
  const auto pt = make_periodic_point(kBasilica, quadratic_fixed_point(-1.0, -1), 1);
  HyperbolicSetSpec spec{{pt.location}, 1.1, 0.05, 1};
  const auto rep = hyperbolic_accessibility(kBasilica, spec);
  ASSERT_TRUE(rep.pass());
  ASSERT_EQ(rep.points.size(), 1u);
  PullbackConfig cfg;
  cfg.max_radius = spec.delta;
  EXPECT_EQ(rep.points[0].set.coordinates(), pullback_landing(kBasilica, pt, cfg).first.coordinates());
}

TEST(HyperbolicAccessibility, PowerMapTwoCycle) {
  HyperbolicSetSpec spec{{std::polar(1.0, kTwoPi / 3), std::polar(1.0, 2 * kTwoPi / 3)}, 1.5, 0.2, 1};
  const auto rep = hyperbolic_accessibility(kSquare, spec);
  ASSERT_TRUE(rep.pass());
  EXPECT_EQ(rep.points[0].set.coordinates(), std::vector<std::string>{"1/3"});
  EXPECT_EQ(rep.points[1].set.coordinates(), std::vector<std::string>{"2/3"});
  for (const auto& p : rep.points) EXPECT_EQ(p.period, 2);
}

TEST(HyperbolicAccessibility, PreperiodicPointGetsPulledBackRay) {
  HyperbolicSetSpec spec{{-1.0, 1.0}, 1.5, 0.2, 1};
  const auto rep = hyperbolic_accessibility(kSquare, spec);
  ASSERT_TRUE(rep.pass());
  EXPECT_EQ(rep.points[0].preperiod, 1);
  EXPECT_EQ(rep.points[0].set.coordinates(), std::vector<std::string>{"1/2"});
}

TEST(HyperbolicAccessibility, ExponentialFixedPointsSeparately) {
  for (const auto& pt : find_periodic_points(kExp, 1)) {
    if (std::abs(pt.location.imag()) > 8) continue;
    const auto rep = hyperbolic_accessibility(kExp, {{pt.location}, 2.0, 0.1, 1});
    ASSERT_TRUE(rep.pass()) << pt.location;
    EXPECT_LE(rep.points[0].max_sup_norm, rep.M);
    EXPECT_EQ(rep.points[0].set.addresses.at(0), ExpAddress::constant(strip_index(pt.location)));
  }
}

TEST(HyperbolicAccessibility, RejectsWeakExpansionAndSparseSamples) {
  EXPECT_FALSE(hyperbolic_accessibility(kSquare, {{1.0}, 2.5, 0.2, 1}).validation.expanding);
  // The image of 1/2 + i/2 is far from every sample.
  const auto rep = hyperbolic_accessibility(kSquare, {{1.0, complex(0.9, 0.9)}, 1.1, 0.05, 1});
  EXPECT_FALSE(rep.validation.invariant);
  EXPECT_FALSE(rep.pass());
  EXPECT_THROW(hyperbolic_accessibility(kSquare, {{}, 1.5, 0.2, 1}), ConfigError);
}

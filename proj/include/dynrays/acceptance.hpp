#ifndef DYNRAYS_ACCEPTANCE_HPP
#define DYNRAYS_ACCEPTANCE_HPP

// The acceptance criteria as library code, shared by the acceptance binary
// and `dynrays verify`. Every criterion returns its evidence as JSON; no
// timings are recorded, so two runs serialize to the same bytes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dynrays/estimates.hpp"
#include "dynrays/geometry.hpp"
#include "dynrays/io.hpp"
#include "dynrays/landing.hpp"

namespace dynrays {

struct AcceptanceConfig {
  std::uint64_t seed = 20240601;
  double landing_tol = 1e-6;
  double nu_tol = 0.10;          // relative, against the multiplier
  double slope_tol = 0.10;       // relative, against -log mu
  double r2_min = 0.99;
  double residual_tol = 1e-8;    // functional equation
  double C_univ = 1.0;
  double K = 2.0;                // |c| bound in the asymptotic estimate
  int n_prefixes = 20;
  int max_prefix = 6;
  long prefix_bound = 2;
  double tau = 800.0;
  double basilica_profile_max = 0.05;
  double exp_profile_max = 0.1;
  int metric_max_len = 8;        // strings of this length or less
  int metric_pair_len = 4;       // every pair up to this length
  int metric_partner_len = 3;    // partners of the longer strings
  PullbackConfig pullback;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  Json data;
};

inline constexpr int kCriteria = 11;

inline std::string criterion_name(int id) {
  static const std::array<const char*, kCriteria> names = {
      "metric expansion under the shift",
      "landing at the repelling fixed point of z^2",
      "basilica alpha landing set",
      "exponential fixed point landing set",
      "exponential ray asymptotics",
      "functional equation along traced rays",
      "logarithm-branch pullback estimates",
      "shrinking fundamental domains",
      "geometric containment rate",
      "budget doubling adds no rays",
      "determinism",
  };
  if (id < 1 || id > kCriteria) throw ConfigError("no acceptance criterion " + std::to_string(id));
  return names[id - 1];
}

/// Named groups of criteria for `dynrays verify --suite`.
inline std::vector<int> suite_criteria(const std::string& suite) {
  static const std::map<std::string, std::vector<int>> suites = {
      {"all", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}},
      {"symbolic", {1}},
      {"polynomial-basics", {2, 3, 6}},
      {"exponential", {4, 5, 6, 7}},
      {"geometry", {8}},
      {"landing", {2, 3, 4, 9, 10}},
      {"determinism", {11}},
  };
  const auto it = suites.find(suite);
  if (it == suites.end()) throw ConfigError("unknown suite '" + suite + "'");
  return it->second;
}

inline std::vector<std::string> suite_names() {
  return {"all", "symbolic", "polynomial-basics", "exponential", "geometry", "landing", "determinism"};
}

namespace detail {

inline double real_fixed_point_bisection(double c, double lo, double hi) {
  auto g = [c](double x) { return std::exp(x) + c - x; };
  if (!(g(lo) < 0 && g(hi) > 0)) throw NumericalError("bisection bracket does not change sign");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// All digit strings over {0..D-1} of length 1..n.
inline std::vector<std::vector<int>> all_strings(int D, int n) {
  std::vector<std::vector<int>> out, layer{{}};
  for (int len = 1; len <= n; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& w : layer)
      for (int d = 0; d < D; ++d) {
        auto v = w;
        v.push_back(d);
        next.push_back(std::move(v));
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

// A string read as the periodic sequence w w w ... and as w 0 0 0 ...
inline std::array<DigitSequence, 2> both_readings(int D, const std::vector<int>& w) {
  return {DigitSequence(D, {}, w), DigitSequence(D, w, {0})};
}

struct TargetRun {
  std::string name;
  MapSpec map;
  PeriodicPoint point;
  LandingSet set;
  PullbackRun run;
};

}  // namespace detail

class AcceptanceRunner {
 public:
  explicit AcceptanceRunner(AcceptanceConfig cfg) : cfg_(std::move(cfg)) {}

  const AcceptanceConfig& config() const { return cfg_; }

  CriterionResult run(int id) {
    if (auto it = done_.find(id); it != done_.end()) return it->second;
    CriterionResult r;
    r.id = id;
    r.name = criterion_name(id);
    try {
      switch (id) {
        case 1: metric(r); break;
        case 2: square(r); break;
        case 3: basilica(r); break;
        case 4: exponential(r); break;
        case 5: asymptotics(r); break;
        case 6: functional_equation(r); break;
        case 7: estimates(r); break;
        case 8: profiles(r); break;
        case 9: containment(r); break;
        case 10: budget(r); break;
        case 11: determinism(r); break;
      }
    } catch (const Error& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    done_[id] = r;
    return r;
  }

  std::vector<CriterionResult> run(const std::vector<int>& ids) {
    std::vector<CriterionResult> out;
    for (int id : ids) out.push_back(run(id));
    return out;
  }

 private:
  // Three pullback targets shared by several criteria, computed once.
  const detail::TargetRun& target(int i) {
    if (!targets_[i]) {
      detail::TargetRun t;
      if (i == 0) {
        t.name = "z^2, z = 1";
        t.map = MapSpec::polynomial(2, {0.0, 0.0});
        t.point = make_periodic_point(t.map, 1.0, 1);
      } else if (i == 1) {
        t.name = "z^2 - 1, alpha";
        t.map = MapSpec::polynomial(2, {-1.0, 0.0});
        t.point = make_periodic_point(t.map, 0.5 * (1.0 - std::sqrt(5.0)), 1);
      } else {
        t.name = "e^z - 2, real repelling fixed point";
        t.map = MapSpec::exponential({-2.0, 0.0});
        // Located by the library's own periodic-point search; criterion 4
        // compares it with bisection on the real line.
        for (const auto& p : find_periodic_points(t.map, 1))
          if (p.repelling() && std::abs(p.location.imag()) < 1e-9 && p.location.real() > 0) t.point = p;
        if (t.point.orbit.empty()) throw NumericalError("real repelling fixed point of e^z - 2 not found");
      }
      auto [set, run] = pullback_landing(t.map, t.point, cfg_.pullback);
      t.set = std::move(set);
      t.run = std::move(run);
      targets_[i] = std::move(t);
    }
    return *targets_[i];
  }

  static Json summary(const detail::TargetRun& t) {
    Json j;
    j["target"] = t.name;
    j["landing_set"] = to_json(t.set);
    j["run"] = to_json(t.run);
    return j;
  }

  // 1: d(sigma s, sigma s') = D d(s, s') whenever s_0 = s'_0, in exact
  // rationals. Every pair of strings up to metric_pair_len is checked, and
  // every string up to metric_max_len against all partners up to
  // metric_partner_len, each string read both as w w w ... and w 0 0 ...
  void metric(CriterionResult& r) {
    long checks = 0, failures = 0;
    Json per_degree = Json::array();
    std::string first_failure;
    for (int D : {2, 3, 4}) {
      long d_checks = 0;
      auto check = [&](const DigitSequence& a, const DigitSequence& b) {
        ++d_checks;
        const Rational lhs = sigma_d_metric(a.shifted(), b.shifted());
        const Rational rhs = Rational(D) * sigma_d_metric(a, b);
        if (lhs != rhs) {
          if (failures == 0) first_failure = a.str() + " vs " + b.str() + " (D=" + std::to_string(D) + ")";
          ++failures;
        }
      };
      const auto short_strings = detail::all_strings(D, cfg_.metric_pair_len);
      for (const auto& u : short_strings)
        for (const auto& v : short_strings) {
          if (u[0] != v[0]) continue;
          for (const auto& a : detail::both_readings(D, u))
            for (const auto& b : detail::both_readings(D, v)) check(a, b);
        }
      const auto partners = detail::all_strings(D, cfg_.metric_partner_len);
      for (const auto& w : detail::all_strings(D, cfg_.metric_max_len)) {
        if (static_cast<int>(w.size()) <= cfg_.metric_pair_len) continue;
        for (const auto& a : detail::both_readings(D, w))
          for (const auto& u : partners) {
            if (u[0] != w[0]) continue;
            for (const auto& b : detail::both_readings(D, u)) check(a, b);
          }
      }
      per_degree.push_back({{"D", D}, {"checks", d_checks}});
      checks += d_checks;
    }
    r.pass = failures == 0;
    r.detail = std::to_string(checks) + " exact pairs, " + std::to_string(failures) + " failures";
    if (!first_failure.empty()) r.detail += "; first: " + first_failure;
    r.data = {{"checks", checks}, {"failures", failures}, {"degrees", per_degree},
              {"max_length", cfg_.metric_max_len}, {"pair_length", cfg_.metric_pair_len},
              {"partner_length", cfg_.metric_partner_len}};
  }

  // 2: the only ray landing at 1 for z^2 is the angle 0.
  void square(CriterionResult& r) {
    const auto& t = target(0);
    const auto coords = t.set.coordinates();
    const bool set_ok = coords == std::vector<std::string>{"0/1"} && t.set.period == 1;
    const bool landed = t.set.verified(cfg_.landing_tol);
    const double nu = t.set.verdicts.empty() ? NAN : t.set.verdicts[0].nu;
    const bool nu_ok = std::abs(nu - 2.0) < cfg_.nu_tol * 2.0;
    r.pass = set_ok && landed && nu_ok;
    r.detail = "rays {" + join(coords) + "}, landing error " + format_short(max_of(t.set.landing_errors)) +
               ", nu " + format_short(nu);
    r.data = summary(t);
  }

  // 3: alpha of the basilica receives exactly 1/3 and 2/3, swapped by doubling.
  void basilica(CriterionResult& r) {
    const auto& t = target(1);
    const auto coord_list = t.set.coordinates();
    const std::set<std::string> coords(coord_list.begin(), coord_list.end());
    const bool set_ok = coords == std::set<std::string>{"1/3", "2/3"} && t.set.period == 2;
    // Each ray traced again on its own, outside the pullback machinery.
    double worst = 0.0;
    bool independent = true;
    Json verdicts = Json::array();
    for (const char* a : {"1/3", "2/3"}) {
      const auto v = land_ray(t.map, PolyAngle::parse(a, 2), cfg_.pullback.landing);
      const double err = std::abs(v.point - t.point.location);
      independent = independent && v.landed && err < cfg_.landing_tol;
      worst = std::max(worst, err);
      verdicts.push_back(to_json(v));
    }
    const auto audit = landing_set_audit(t.set, t.map);
    r.pass = set_ok && t.set.verified(cfg_.landing_tol) && independent && audit.pass();
    r.detail = "rays {" + join(coord_list) + "}, period " + std::to_string(t.set.period) +
               ", independent landing error " + format_short(worst) + ", audit " + (audit.pass() ? "ok" : "failed");
    r.data = summary(t);
    r.data["independent_verdicts"] = std::move(verdicts);
    r.data["audit"] = to_json(audit);
  }

  // 4: e^z - 2 at its real repelling fixed point.
  void exponential(CriterionResult& r) {
    const MapSpec m = MapSpec::exponential({-2.0, 0.0});
    const auto probe = postsingular_probe(m, cfg_.pullback.probe_iterations, cfg_.pullback.probe_radius);
    const double oracle = detail::real_fixed_point_bisection(-2.0, 1.0, 2.0);
    const auto& t = target(2);
    const double loc_err = std::abs(t.point.location - oracle);
    const auto coords = t.set.coordinates();
    const bool has_zero = std::find(coords.begin(), coords.end(), "[0]") != coords.end();
    const auto audit = landing_set_audit(t.set, t.map);
    const bool norms_ok = t.run.max_sup_norm <= t.run.M;
    r.pass = probe.bounded && loc_err < cfg_.landing_tol && has_zero && t.set.verified(cfg_.landing_tol) &&
             norms_ok && audit.adjacency_ok;
    r.detail = "fixed point " + format_short(t.point.location.real()) + " (oracle error " + format_short(loc_err) +
               "), rays {" + join(coords) + "}, sup norm " + std::to_string(t.run.max_sup_norm) + " <= M = " +
               std::to_string(t.run.M) + ", adjacency " + (audit.adjacency_ok ? "ok" : "violated");
    r.data = summary(t);
    r.data["oracle"] = oracle;
    r.data["probe"] = {{"bounded", probe.bounded}, {"iterations", probe.iterations},
                       {"max_modulus", json_number(probe.max_modulus)}};
    r.data["audit"] = to_json(audit);
  }

  // 5: g_s(t) - t - 2 pi i s_0 decays like e^{-t}.
  void asymptotics(CriterionResult& r) {
    const MapSpec m = MapSpec::exponential({-2.0, 0.0});
    bool ok = true;
    double needed = 0.0;
    Json rows = Json::array();
    for (long k : {0L, 1L}) {
      const auto s = ExpAddress::constant(k);
      const double r20 = std::abs(exp_ray_point(m, s, 20.0).z - complex(20.0, kTwoPi * k));
      const double r25 = std::abs(exp_ray_point(m, s, 25.0).z - complex(25.0, kTwoPi * k));
      const double ratio = r25 / r20;
      const double scale = 2.0 * std::exp(-25.0);
      const double bound = scale * (cfg_.K + 2.0 + kTwoPi * std::abs(k) + kTwoPi * cfg_.C_univ);
      const double smallest = std::max(0.0, (r25 / scale - cfg_.K - 2.0 - kTwoPi * std::abs(k)) / kTwoPi);
      needed = std::max(needed, smallest);
      const bool row_ok = ratio > std::exp(-5.0) / 10 && ratio < std::exp(-5.0) * 10 && r25 < bound;
      ok = ok && row_ok;
      rows.push_back({{"address", s.str()}, {"residual_20", r20}, {"residual_25", r25}, {"ratio", ratio},
                      {"bound", bound}, {"pass", row_ok}});
    }
    r.pass = ok;
    r.detail = "ratio within a factor 10 of e^-5; smallest passing universal constant " + format_short(needed);
    r.data = {{"rows", rows}, {"C_univ", cfg_.C_univ}, {"smallest_C_univ", needed}};
  }

  template <class Coord>
  static double family_residual(const MapSpec& m, const Coord& s, int levels, long& checks) {
    RayFamily<Coord> fam(m, s);
    fam.descend_to(levels);
    const GrowthModel F(m);
    const int S = fam.lattice().substeps();
    double worst = 0.0;
    for (std::size_t i = 0; i < fam.members().size(); ++i) {
      const auto up = fam.evaluator(fam.next(i));
      for (int L = 0; L < fam.levels(); ++L)
        for (int j = 0; j < S; ++j) {
          const complex lhs = dynrays::apply(m, fam.point(i, L, j));
          // The top level is compared against an independent evaluation of
          // the image ray above the lattice.
          const complex rhs = L == 0 ? up(F.F(fam.lattice().potential(0, j))) : fam.point(fam.next(i), L - 1, j);
          worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
          ++checks;
        }
    }
    return worst;
  }

  // 6: f(g_s(t)) = g_{sigma s}(F(t)) at every lattice sample.
  void functional_equation(CriterionResult& r) {
    const MapSpec sq = MapSpec::polynomial(2, {0.0, 0.0}), bas = MapSpec::polynomial(2, {-1.0, 0.0});
    const MapSpec ex = MapSpec::exponential({-2.0, 0.0});
    Json rows = Json::array();
    double worst = 0.0;
    auto add = [&](const std::string& label, double res, long checks) {
      worst = std::max(worst, res);
      rows.push_back({{"ray", label}, {"residual", json_number(res)}, {"checks", checks}});
    };
    for (const auto& [m, a] : std::vector<std::pair<MapSpec, const char*>>{{sq, "0"}, {bas, "0"}, {bas, "1/3"}, {bas, "1/7"}}) {
      long n = 0;
      const double res = family_residual(m, PolyAngle::parse(a, 2).digits(), 24, n);
      add(m.describe() + " angle " + a, res, n);
    }
    for (const char* s : {"[0]", "[1]", "[-1 2]"}) {
      long n = 0;
      const double res = family_residual(ex, ExpAddress::parse(s), 24, n);
      add(ex.describe() + " address " + s, res, n);
    }
    r.pass = worst < cfg_.residual_tol;
    r.detail = "worst relative residual " + format_short(worst);
    r.data = {{"rays", rows}, {"worst", json_number(worst)}};
  }

  // 7: seeded random prefixes over the base address 0 0 0 ...
  void estimates(CriterionResult& r) {
    const MapSpec m = MapSpec::exponential({-2.0, 0.0});
    std::mt19937_64 rng(cfg_.seed);
    const long width = 2 * cfg_.prefix_bound + 1;
    Json rows = Json::array();
    int passed = 0;
    for (int n = 0; n < cfg_.n_prefixes; ++n) {
      const int len = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg_.max_prefix));
      std::vector<long> prefix;
      for (int i = 0; i < len; ++i) prefix.push_back(static_cast<long>(rng() % width) - cfg_.prefix_bound);
      const auto rep = verify_pullback_estimates(m, ExpAddress::constant(0), prefix, cfg_.tau);
      passed += rep.pass();
      Json row = to_json(rep);
      row["prefix"] = prefix;
      rows.push_back(std::move(row));
    }
    r.pass = passed == cfg_.n_prefixes;
    r.detail = std::to_string(passed) + "/" + std::to_string(cfg_.n_prefixes) + " prefixes satisfy every estimate";
    r.data = {{"seed", cfg_.seed}, {"tau", cfg_.tau}, {"prefixes", rows}};
  }

  // 8: largest fundamental domain meeting a window shrinks down the grid.
  void profiles(CriterionResult& r) {
    const MapSpec bas = MapSpec::polynomial(2, {-1.0, 0.0});
    std::vector<PolyAngle> angles;
    for (auto s : {"0", "1/3", "2/3", "1/7", "2/7", "4/7"}) angles.push_back(PolyAngle::parse(s, 2));
    std::vector<double> grid;
    for (int k = 0; k <= 12; ++k) grid.push_back(std::ldexp(1.0, -k));
    const auto pb = shrinking_profile(bas, angles, grid, Window{0, 10});

    const MapSpec ex = MapSpec::exponential({-2.0, 0.0});
    const GrowthModel F(ex);
    std::vector<double> egrid;
    for (double t = 2.0; egrid.size() < 10; t = F.Finv(t)) egrid.push_back(t);
    const auto pe = shrinking_profile(ex, pullback_family(ExpAddress::constant(0), 3, 2), egrid, Window{1.1462, 5.0});

    const bool b_ok = pb.strictly_decreasing() && pb.rows.back().max_length < cfg_.basilica_profile_max;
    const bool e_ok = pe.strictly_decreasing() && pe.rows.back().max_length < cfg_.exp_profile_max;
    r.pass = b_ok && e_ok;
    r.detail = "basilica final " + format_short(pb.rows.back().max_length) + ", exponential final " +
               format_short(pe.rows.back().max_length);
    r.data = {{"basilica", to_json(pb)}, {"exponential", to_json(pe)}};
  }

  // 9: containment radii decay at the rate of the multiplier.
  void containment(CriterionResult& r) {
    bool ok = true;
    Json rows = Json::array();
    std::string detail;
    for (int i = 0; i < 3; ++i) {
      const auto& t = target(i);
      const auto& fit = t.run.containment_fit;
      const double rel = std::abs(fit.slope - t.run.expected_slope) / std::abs(t.run.expected_slope);
      const bool row_ok = rel < cfg_.slope_tol && fit.r2 > cfg_.r2_min;
      ok = ok && row_ok;
      rows.push_back({{"target", t.name}, {"fit", to_json(fit)}, {"expected_slope", t.run.expected_slope},
                      {"relative_error", rel}, {"pass", row_ok}});
      detail += (i ? "; " : "") + t.name + ": slope error " + format_short(rel) + ", R2 " + format_short(fit.r2);
    }
    r.pass = ok;
    r.detail = detail;
    r.data = {{"targets", rows}};
  }

  // 10: twice the pullback budget finds nothing new.
  void budget(CriterionResult& r) {
    bool ok = true;
    Json rows = Json::array();
    for (int i = 0; i < 3; ++i) {
      const auto& t = target(i);
      PullbackConfig doubled = cfg_.pullback;
      doubled.budget *= 2;
      const auto [set2, run2] = pullback_landing(t.map, t.point, doubled);
      const auto a = t.set.coordinates(), b = set2.coordinates();
      const std::set<std::string> before(a.begin(), a.end()), after(b.begin(), b.end());
      std::vector<std::string> added;
      for (const auto& c : after)
        if (!before.count(c)) added.push_back(c);
      ok = ok && added.empty();
      rows.push_back({{"target", t.name}, {"budget", doubled.budget}, {"coordinates", b}, {"added", added}});
    }
    r.pass = ok;
    r.detail = ok ? "no new coordinates at any target" : "new coordinates appeared";
    r.data = {{"targets", rows}};
  }

  // 11: a fresh runner reproduces the evidence of criteria 2-10 byte for byte.
  void determinism(CriterionResult& r) {
    AcceptanceRunner fresh(cfg_);
    std::string mismatch;
    int compared = 0;
    for (int id = 2; id <= 10; ++id) {
      const auto a = run(id), b = fresh.run(id);
      ++compared;
      if (a.data.dump() != b.data.dump() || a.pass != b.pass) mismatch += (mismatch.empty() ? "" : ", ") + std::to_string(id);
    }
    r.pass = mismatch.empty();
    r.detail = r.pass ? std::to_string(compared) + " criteria reproduced byte for byte" : "differences in " + mismatch;
    r.data = {{"compared", compared}, {"mismatch", mismatch}};
  }

  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
    return s;
  }
  static double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
  }
  static std::string format_short(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
  }

  AcceptanceConfig cfg_;
  std::array<std::optional<detail::TargetRun>, 3> targets_;
  std::map<int, CriterionResult> done_;
};

inline Json to_json(const CriterionResult& r) {
  Json j;
  j["id"] = r.id;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["detail"] = r.detail;
  j["data"] = r.data;
  return j;
}

/// One line per criterion, as printed by the acceptance binary and `verify`.
inline std::string result_line(const CriterionResult& r) {
  char head[32];
  std::snprintf(head, sizeof head, "[%s] %2d ", r.pass ? "PASS" : "FAIL", r.id);
  return std::string(head) + r.name + ": " + r.detail;
}

}  // namespace dynrays

#endif  // DYNRAYS_ACCEPTANCE_HPP

#ifndef DYNRAYS_IO_HPP
#define DYNRAYS_IO_HPP

// JSON and CSV serialization. JSON objects keep insertion order, so a given
// result always serializes to the same bytes.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynrays/estimates.hpp"
#include "dynrays/geometry.hpp"
#include "dynrays/landing.hpp"

namespace dynrays {

using Json = nlohmann::ordered_json;

/// %.17g round-trips every finite double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Non-finite doubles have no JSON literal; they are written as strings.
inline Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

inline Json to_json(complex z) { return Json::array({json_number(z.real()), json_number(z.imag())}); }

inline Json to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

inline Json to_json(const MapSpec& m) {
  Json j;
  j["kind"] = m.is_poly() ? "polynomial" : "exponential";
  if (m.is_poly()) j["degree"] = m.degree;
  j["c"] = to_json(m.c);
  return j;
}

inline Json to_json(const PeriodicPoint& p) {
  Json j;
  j["location"] = to_json(p.location);
  j["period"] = p.period;
  j["multiplier"] = to_json(p.multiplier);
  j["stability"] = to_string(p.stability);
  return j;
}

inline Json to_json(const LinearFit& f) {
  Json j;
  j["slope"] = json_number(f.slope);
  j["intercept"] = json_number(f.intercept);
  j["r2"] = json_number(f.r2);
  j["n"] = f.n;
  return j;
}

inline Json to_json(const RaySegment& s) {
  Json j;
  j["coordinate"] = s.coordinate;
  j["map"] = to_json(s.map);
  j["truncated"] = s.truncated;
  if (s.truncated) j["truncation_reason"] = s.truncation_reason;
  j["max_residual"] = json_number(s.max_residual());
  Json pts = Json::array();
  for (const auto& p : s.samples) {
    Json q;
    q["t"] = json_number(p.t);
    q["z"] = to_json(p.z);
    q["residual"] = json_number(p.residual);
    pts.push_back(std::move(q));
  }
  j["samples"] = std::move(pts);
  return j;
}

inline Json to_json(const LandingVerdict& v) {
  Json j;
  j["coordinate"] = v.coordinate;
  j["landed"] = v.landed;
  j["point"] = to_json(v.point);
  j["A"] = json_number(v.A);
  j["nu"] = json_number(v.nu);
  j["r2"] = json_number(v.r2);
  j["levels"] = v.levels;
  j["fitted_levels"] = v.fitted_levels;
  j["final_motion"] = json_number(v.final_motion);
  j["radii"] = to_json(v.radii);
  j["diagnostics"] = v.diagnostics;
  return j;
}

inline Json to_json(const LandingSet& s) {
  Json j;
  j["point"] = to_json(s.point);
  j["kind"] = s.kind == MapKind::Polynomial ? "polynomial" : "exponential";
  j["period"] = s.period;
  j["coordinates"] = s.coordinates();
  j["landing_errors"] = to_json(s.landing_errors);
  Json v = Json::array();
  for (const auto& x : s.verdicts) v.push_back(to_json(x));
  j["verdicts"] = std::move(v);
  return j;
}

inline Json to_json(const ShrinkProfile& p) {
  Json rows = Json::array();
  for (const auto& r : p.rows) {
    Json q;
    q["t"] = json_number(r.t);
    q["max_length"] = json_number(r.max_length);
    q["n_samples"] = r.n_samples;
    rows.push_back(std::move(q));
  }
  Json j;
  j["rows"] = std::move(rows);
  j["strictly_decreasing"] = p.strictly_decreasing();
  j["warnings"] = p.warnings;
  return j;
}

/// Curves are left out unless asked for; they dominate the size.
inline Json to_json(const PullbackRun& r, bool with_curves = false) {
  Json j;
  j["target"] = to_json(r.target);
  j["linearization"] = {{"radius", json_number(r.chart.radius)},
                        {"distortion", json_number(r.chart.distortion)},
                        {"depth", r.chart.depth}};
  j["radius_U_prime"] = json_number(r.radius_U_prime);
  j["radius_U"] = json_number(r.radius_U);
  j["eps"] = json_number(r.eps);
  j["t_eps"] = json_number(r.t_eps);
  j["base"] = r.base_coordinate;
  j["seed"] = {{"coordinate", r.seed_coordinate},
               {"point", to_json(r.seed_point)},
               {"t0", json_number(r.t0)},
               {"forward_steps", r.seed_forward_steps},
               {"attempts", r.seed_attempts}};
  j["history"] = r.history;
  j["blocks"] = r.blocks;
  j["cycle_period"] = r.cycle_period;
  j["curve_max_distance"] = to_json(r.curve_max_distance);
  j["containment_radii"] = to_json(r.containment_radii);
  j["containment_fit"] = to_json(r.containment_fit);
  j["expected_slope"] = json_number(r.expected_slope);
  j["containment_constant"] = json_number(r.containment_constant);
  j["identity_error"] = json_number(r.identity_error);
  j["identity_checks"] = r.identity_checks;
  j["coherent"] = r.coherent;
  j["coherence_checks"] = r.coherence_checks;
  j["shift_consistent"] = r.shift_consistent;
  if (r.postsingular) {
    j["postsingular"] = {{"bounded", r.postsingular->bounded},
                         {"iterations", r.postsingular->iterations},
                         {"max_modulus", json_number(r.postsingular->max_modulus)},
                         {"heuristic", r.postsingular->heuristic}};
  }
  j["M"] = r.M;
  j["max_sup_norm"] = r.max_sup_norm;
  j["profile"] = to_json(r.profile);
  if (with_curves) {
    Json cs = Json::array();
    for (const auto& c : r.curves) {
      Json pts = Json::array();
      for (complex z : c.points) pts.push_back(to_json(z));
      cs.push_back(std::move(pts));
    }
    j["curves"] = std::move(cs);
  }
  return j;
}

inline Json to_json(const LandingSetAudit& a) {
  Json j;
  j["pass"] = a.pass();
  j["cycle_ok"] = a.cycle_ok;
  j["adjacency_ok"] = a.adjacency_ok;
  j["cardinality_ok"] = a.cardinality_ok;
  j["rotation_ok"] = a.rotation_ok;
  j["rotations_checked"] = a.rotations_checked;
  j["violations"] = a.violations;
  return j;
}

inline Json to_json(const PullbackEstimateReport& r) {
  Json j;
  j["pass"] = r.pass();
  j["m"] = r.m;
  j["C"] = json_number(r.C);
  j["eps"] = json_number(r.eps);
  j["C_prime"] = json_number(r.C_prime);
  j["tau"] = json_number(r.tau);
  j["margin_compare"] = json_number(r.margin_compare);
  j["margin_floor"] = json_number(r.margin_floor);
  j["margin_distance"] = json_number(r.margin_distance);
  j["margin_derivative"] = json_number(r.margin_derivative);
  j["margin_real_part"] = json_number(r.margin_real_part);
  j["real_part_checks"] = r.real_part_checks;
  return j;
}

inline Json to_json(const AccessibilityReport& r) {
  Json j;
  j["pass"] = r.pass();
  j["expanding"] = r.validation.expanding;
  j["invariant"] = r.validation.invariant;
  j["min_expansion"] = json_number(r.validation.min_expansion);
  j["cover_size"] = r.validation.cover_size;
  j["problems"] = r.validation.problems;
  j["M"] = r.M;
  Json pts = Json::array();
  for (const auto& p : r.points) {
    Json q;
    q["x0"] = to_json(p.x0);
    q["preperiod"] = p.preperiod;
    q["period"] = p.period;
    q["coordinates"] = p.set.coordinates();
    q["landed"] = p.landed;
    q["ladder_ok"] = p.ladder_ok;
    q["ladder_margin"] = to_json(p.ladder_margin);
    q["max_sup_norm"] = p.max_sup_norm;
    pts.push_back(std::move(q));
  }
  j["points"] = std::move(pts);
  return j;
}

/// Indented JSON with a trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV

inline std::string csv(const RaySegment& s) {
  std::ostringstream os;
  os << "t,re,im,residual\n";
  for (const auto& p : s.samples)
    os << format_double(p.t) << ',' << format_double(p.z.real()) << ',' << format_double(p.z.imag()) << ','
       << format_double(p.residual) << '\n';
  return os.str();
}

inline std::string csv(const ShrinkProfile& p) {
  std::ostringstream os;
  os << "t,max_length,n_samples\n";
  for (const auto& r : p.rows) os << format_double(r.t) << ',' << format_double(r.max_length) << ',' << r.n_samples << '\n';
  return os.str();
}

inline std::string csv(const LandingSet& s) {
  std::ostringstream os;
  os << "coordinate,landed,re,im,error,nu,r2\n";
  const auto coords = s.coordinates();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& v = s.verdicts.at(i);
    os << coords[i] << ',' << (v.landed ? 1 : 0) << ',' << format_double(v.point.real()) << ','
       << format_double(v.point.imag()) << ',' << format_double(s.landing_errors.at(i)) << ','
       << format_double(v.nu) << ',' << format_double(v.r2) << '\n';
  }
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f << content;
  if (!f) throw ConfigError("failed writing " + path);
}

}  // namespace dynrays

#endif  // DYNRAYS_IO_HPP

// dynrays: dynamic rays of z^D + c and e^z + c from the command line.
//
// Exit codes: 0 success, 1 numerical failure (or a failed verification),
// 2 usage or configuration error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "dynrays/dynrays.hpp"
#include "dynrays/render.hpp"

using namespace dynrays;

namespace {

struct MapOptions {
  std::string kind = "poly";
  int degree = 2;
  std::string c = "0,0";

  void add(CLI::App* app) {
    app->add_option("--kind", kind, "poly (z^D + c) or exp (e^z + c)")
        ->check(CLI::IsMember({"poly", "exp"}))
        ->capture_default_str();
    app->add_option("--degree", degree, "D for polynomial maps")->capture_default_str();
    app->add_option("--c", c, "parameter as re,im")->capture_default_str();
  }
  MapSpec build() const { return make_map(kind, degree, c); }
};

// One ray: --angle p/q for polynomials, --address for exponentials.
struct RayOption {
  std::string angle, address;

  void add(CLI::App* app) {
    auto* a = app->add_option("--angle", angle, "external angle p/q (polynomial maps)");
    auto* b = app->add_option("--address", address, "external address such as [0] or 1 [2 -1] (exponential maps)");
    a->excludes(b);
  }
  std::string text(const MapSpec& m) const {
    if (m.is_poly()) {
      if (!address.empty()) throw ConfigError("polynomial rays take --angle");
      if (angle.empty()) throw ConfigError("--angle is required for polynomial maps");
      return angle;
    }
    if (!angle.empty()) throw ConfigError("exponential rays take --address");
    if (address.empty()) throw ConfigError("--address is required for exponential maps");
    return address;
  }
};

struct TraceOptions {
  TraceConfig cfg;
  std::string range;  // lo:hi

  void add(CLI::App* app) {
    app->add_option("--t", range, "potential range lo:hi (sets the floor and the lattice top)");
    app->add_option("--substeps", cfg.substeps, "lattice points per fundamental interval")->capture_default_str();
    app->add_option("--max-levels", cfg.max_levels, "cap on traced levels")->capture_default_str();
    app->add_option("--anchor", cfg.anchor_potential, "exponential anchor potential")->capture_default_str();
  }
  TraceConfig build() const {
    TraceConfig out = cfg;
    if (!range.empty()) {
      const auto colon = range.find(':');
      if (colon == std::string::npos) throw ParseError("--t takes lo:hi");
      out.floor = parse_complex(range.substr(0, colon)).real();
      out.top = parse_complex(range.substr(colon + 1)).real();
      if (range.find(',') != std::string::npos || !(out.floor > 0) || !(out.top > out.floor))
        throw ConfigError("--t needs 0 < lo < hi");
    }
    return out;
  }
};

struct PullbackOptions {
  PullbackConfig cfg;

  void add(CLI::App* app) {
    app->add_option("--budget", cfg.budget, "pullback iterations")->capture_default_str();
    app->add_option("--seed-budget", cfg.seed_budget, "forward iterations in the seed search")->capture_default_str();
    app->add_option("--seed-attempts", cfg.seed_attempts, "seed candidates to try")->capture_default_str();
    app->add_option("--landing-tol", cfg.landing_tol, "landing point tolerance")->capture_default_str();
    app->add_option("--max-radius", cfg.max_radius, "cap on the linearization radius (0 = none)")->capture_default_str();
    app->add_option("--probe-iterations", cfg.probe_iterations, "singular orbit probe length")->capture_default_str();
    app->add_option("--probe-radius", cfg.probe_radius, "singular orbit probe radius")->capture_default_str();
  }
};

struct Files {
  std::string json, csv;

  void add(CLI::App* app, bool with_csv = true) {
    app->add_option("--json", json, "write JSON here");
    if (with_csv) app->add_option("--csv", csv, "write CSV here");
  }
  void write(const Json& j) const {
    if (!json.empty()) write_file(json, dump(j));
  }
  void write(const std::string& table) const {
    if (!csv.empty()) write_file(csv, table);
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

RaySegment trace_text(const MapSpec& m, const std::string& ray, const TraceConfig& cfg) {
  if (m.is_poly()) return trace_poly_ray(m, PolyAngle::parse(ray, m.degree), cfg);
  return trace_exp_ray(m, ExpAddress::parse(ray), cfg);
}

LandingVerdict land_text(const MapSpec& m, const std::string& ray, const LandingConfig& cfg) {
  if (m.is_poly()) return land_ray(m, PolyAngle::parse(ray, m.degree), cfg);
  return land_ray(m, ExpAddress::parse(ray), cfg);
}

// Repelling points of exact period p: refined from --point, or every one
// the default seeding finds, nearest the origin first.
std::vector<PeriodicPoint> targets(const MapSpec& m, const std::string& point, int period, std::size_t max_points) {
  if (period < 1) throw ConfigError("period must be at least 1");
  std::vector<complex> seeds;
  if (!point.empty()) seeds.push_back(parse_complex(point));
  std::vector<PeriodicPoint> out;
  for (const auto& p : find_periodic_points(m, period, seeds))
    if (p.period == period && p.repelling()) out.push_back(p);
  if (!point.empty()) {
    if (out.empty())
      throw ConfigError("no repelling point of exact period " + std::to_string(period) + " near " + point);
    return {out.front()};
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PeriodicPoint& a, const PeriodicPoint& b) { return std::abs(a.location) < std::abs(b.location); });
  if (out.size() > max_points) out.resize(max_points);
  if (out.empty()) throw NumericalError("no repelling point of period " + std::to_string(period) + " found");
  return out;
}

std::pair<LandingSet, PullbackRun> landing_set_for(const MapSpec& m, const PeriodicPoint& pt, const std::string& base,
                                                   const PullbackConfig& cfg) {
  if (base.empty()) return pullback_landing(m, pt, cfg);
  if (m.is_poly()) return pullback_landing(m, pt, PolyAngle::parse(base, m.degree), cfg);
  return pullback_landing(m, pt, ExpAddress::parse(base), cfg);
}

std::string point_text(complex z) { return fmt("%.10g", z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt("%.10g", std::abs(z.imag())) + "i"; }

// Human-readable table: coordinate, period, landing error, fitted nu.
void print_table(std::ostream& os, const LandingSet& set) {
  os << "point " << point_text(set.point.location) << ", multiplier modulus " << fmt("%.6g", set.point.modulus()) << "\n";
  os << "  coordinate            period  landing error  nu\n";
  const auto coords = set.coordinates();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-20s  %6d  %13.3e  %.6g%s\n", coords[i].c_str(), set.period, set.landing_errors[i],
                  set.verdicts[i].nu, set.verdicts[i].landed ? "" : "  (not landed)");
    os << line;
  }
}

struct RenderOptions {
  RenderConfig cfg;
  std::string center = "0,0", viewport;
  std::vector<std::string> rays;
  std::string points;

  void add(CLI::App* app) {
    app->add_option("--width", cfg.view.width, "pixels")->capture_default_str();
    app->add_option("--height", cfg.view.height, "pixels (derived from --viewport when that is given)")
        ->capture_default_str();
    app->add_option("--center", center, "picture center as re,im")->capture_default_str();
    app->add_option("--span", cfg.view.span, "width of the picture in the plane")->capture_default_str();
    app->add_option("--viewport", viewport, "xmin,xmax,ymin,ymax (overrides --center and --span)");
    app->add_option("--max-iter", cfg.max_iter, "escape-time iterations")->capture_default_str();
    app->add_option("--ray,--angle,--address", rays, "rays to overlay (angles p/q or addresses)");
    app->add_option("--points", points, "markers as 're,im; re,im'");
  }
  View view() const {
    View v = cfg.view;
    v.center = parse_complex(center);
    if (!viewport.empty()) {
      std::vector<double> r;
      std::stringstream ss(viewport);
      for (std::string part; std::getline(ss, part, ',');) r.push_back(parse_complex(part).real());
      if (r.size() != 4) throw ParseError("--viewport takes xmin,xmax,ymin,ymax");
      if (!(r[1] > r[0]) || !(r[3] > r[2])) throw ConfigError("viewport has zero or negative size");
      v.center = complex(0.5 * (r[0] + r[1]), 0.5 * (r[2] + r[3]));
      v.span = r[1] - r[0];
      v.height = static_cast<int>(std::lround(v.width * (r[3] - r[2]) / (r[1] - r[0])));
    }
    if (!(v.span > 0) || v.width <= 0 || v.height <= 0) throw ConfigError("viewport has zero or negative size");
    return v;
  }
  Image draw(const MapSpec& m, const TraceConfig& trace, const std::vector<std::string>& extra_rays,
             const std::vector<complex>& extra_points) const {
    RenderConfig rc = cfg;
    rc.view = view();
    Image img = render_escape(m, rc);
    std::vector<std::string> all = rays;
    all.insert(all.end(), extra_rays.begin(), extra_rays.end());
    for (std::size_t i = 0; i < all.size(); ++i)
      draw_curve(img, rc.view, trace_text(m, all[i], trace).curve(), overlay_color(i));
    auto pts = parse_complex_list(points);
    pts.insert(pts.end(), extra_points.begin(), extra_points.end());
    for (complex z : pts) draw_marker(img, rc.view, z, {255, 255, 255});
    return img;
  }
};

std::string ray_samples_csv(const MapSpec& m, const std::vector<std::string>& rays, const TraceConfig& cfg) {
  std::string out = "coordinate,t,re,im,residual\n";
  for (const auto& c : rays)
    for (const auto& p : trace_text(m, c, cfg).samples)
      out += c + "," + format_double(p.t) + "," + format_double(p.z.real()) + "," + format_double(p.z.imag()) + "," +
             format_double(p.residual) + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic rays of z^D + c and e^z + c: tracing, landing and verification"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "read options from a file written by --dump-config");
  bool dump_config = false;
  app.add_flag("--dump-config", dump_config, "print the effective configuration and exit")->configurable(false);

  // trace
  auto* trace = app.add_subcommand("trace", "trace one ray over a potential range");
  MapOptions trace_map;
  RayOption trace_ray;
  TraceOptions trace_opts;
  Files trace_files;
  trace_map.add(trace);
  trace_ray.add(trace);
  trace_opts.add(trace);
  trace_files.add(trace);

  // land
  auto* land = app.add_subcommand("land", "decide whether a ray lands, and where");
  MapOptions land_map;
  RayOption land_ray_opt;
  TraceOptions land_trace;
  Files land_files;
  LandingConfig land_cfg;
  land_map.add(land);
  land_ray_opt.add(land);
  land->add_option("--min-levels", land_cfg.min_levels, "fitted levels required")->capture_default_str();
  land->add_option("--r2-min", land_cfg.r2_min, "coefficient of determination required")->capture_default_str();
  land_trace.add(land);
  land_files.add(land);

  // landing-set
  auto* lset = app.add_subcommand("landing-set", "rays landing at repelling periodic points");
  MapOptions lset_map;
  PullbackOptions lset_pb;
  Files lset_files;
  std::string lset_point, lset_base;
  int lset_period = 1;
  std::size_t lset_max = 8;
  bool lset_curves = false;
  lset_map.add(lset);
  lset->add_option("--point", lset_point, "approximate periodic point as re,im (default: search)");
  lset->add_option("--period", lset_period, "exact period")->capture_default_str();
  lset->add_option("--max-points", lset_max, "points handled when searching, nearest the origin first")
      ->capture_default_str();
  lset->add_option("--base", lset_base, "base ray of the construction (default: angle 0 or address [0])");
  lset->add_flag("--curves", lset_curves, "include the pulled-back curves in the JSON");
  lset_pb.add(lset);
  lset_files.add(lset);

  // access
  auto* access = app.add_subcommand("access", "accessibility of a sampled hyperbolic set");
  MapOptions access_map;
  PullbackOptions access_pb;
  Files access_files;
  HyperbolicSetSpec access_spec;
  std::string access_samples;
  int access_orbit = 64;
  access_map.add(access);
  access->add_option("--samples", access_samples, "points of the set as 're,im; re,im'")->required();
  access->add_option("--eta", access_spec.eta, "expansion factor")->capture_default_str();
  access->add_option("--delta", access_spec.delta, "neighbourhood radius")->capture_default_str();
  access->add_option("--k", access_spec.k, "iterate on which expansion holds")->capture_default_str();
  access->add_option("--max-orbit", access_orbit, "orbit steps before giving up on recurrence")->capture_default_str();
  access_pb.add(access);
  access_files.add(access, false);

  // shrink-profile
  auto* shrink = app.add_subcommand("shrink-profile", "largest fundamental domains meeting a window");
  MapOptions shrink_map;
  TraceOptions shrink_trace;
  Files shrink_files;
  std::vector<std::string> shrink_rays;
  std::string shrink_family, shrink_window = "0,0";
  int shrink_depth = 3, shrink_rows = 10;
  long shrink_bound = 2;
  double shrink_radius = 10.0, shrink_top = 1.0;
  shrink_map.add(shrink);
  shrink->add_option("--ray,--angle,--address", shrink_rays, "member rays (angles or addresses)");
  shrink->add_option("--family", shrink_family, "exponential base address; members are its prefixed pullbacks");
  shrink->add_option("--depth", shrink_depth, "prefix length of the family")->capture_default_str();
  shrink->add_option("--bound", shrink_bound, "|entries| of the family prefixes")->capture_default_str();
  shrink->add_option("--grid-top", shrink_top, "first potential of the grid")->capture_default_str();
  shrink->add_option("--grid-rows", shrink_rows, "rows; each potential is F^-1 of the previous")->capture_default_str();
  shrink->add_option("--window", shrink_window, "window center as re,im")->capture_default_str();
  shrink->add_option("--radius", shrink_radius, "window radius")->capture_default_str();
  shrink_trace.add(shrink);
  shrink_files.add(shrink);

  // verify
  auto* verify = app.add_subcommand("verify", "run acceptance criteria");
  AcceptanceConfig vcfg;
  Files verify_files;
  std::string verify_suite = "all";
  verify->add_option("--suite", verify_suite, "all, symbolic, polynomial-basics, exponential, geometry, landing, determinism")
      ->capture_default_str();
  verify->add_option("--seed", vcfg.seed, "seed of the random prefixes")->capture_default_str();
  verify->add_option("--landing-tol", vcfg.landing_tol, "landing point tolerance")->capture_default_str();
  verify->add_option("--residual-tol", vcfg.residual_tol, "functional equation tolerance")->capture_default_str();
  verify->add_option("--slope-tol", vcfg.slope_tol, "relative containment slope tolerance")->capture_default_str();
  verify->add_option("--nu-tol", vcfg.nu_tol, "relative landing rate tolerance")->capture_default_str();
  verify->add_option("--r2-min", vcfg.r2_min, "coefficient of determination required")->capture_default_str();
  verify->add_option("--c-univ", vcfg.C_univ, "universal constant of the asymptotic bound")->capture_default_str();
  verify->add_option("--prefixes", vcfg.n_prefixes, "random prefixes for the estimates")->capture_default_str();
  verify->add_option("--tau", vcfg.tau, "potential for the estimates")->capture_default_str();
  verify_files.add(verify, false);

  // render
  auto* render = app.add_subcommand("render", "escape-time picture with ray overlays (PNG)");
  MapOptions render_map;
  TraceOptions render_trace;
  RenderOptions render_opts;
  std::string render_path;
  render_map.add(render);
  render_opts.add(render);
  render_trace.add(render);
  render->add_option("--out", render_path, "PNG file")->required();

  // report
  auto* report = app.add_subcommand("report", "landing set, audit, ray samples and picture in one directory");
  MapOptions report_map;
  PullbackOptions report_pb;
  TraceOptions report_trace;
  RenderOptions report_render;
  std::string report_dir, report_point, report_base;
  int report_period = 1;
  report_map.add(report);
  report->add_option("--point", report_point, "approximate periodic point as re,im")->required();
  report->add_option("--period", report_period, "exact period")->capture_default_str();
  report->add_option("--base", report_base, "base ray of the construction");
  report->add_option("--out-dir", report_dir, "directory for report.json, rays.csv and picture.png")->required();
  report_pb.add(report);
  report_trace.add(report);
  report_render.add(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (dump_config) {
    // Only the invoked subcommand; feeding this back through --config with
    // the same subcommand reproduces the run.
    const std::string prefix = app.get_subcommands().front()->get_name() + ".";
    std::istringstream all(app.config_to_str(true, false));
    for (std::string line; std::getline(all, line);)
      if (line.rfind(prefix, 0) == 0) std::cout << line << "\n";
    return kExitOk;
  }

  try {
    if (trace->parsed()) {
      const MapSpec m = trace_map.build();
      const std::string ray = trace_ray.text(m);
      const auto seg = trace_text(m, ray, trace_opts.build());
      trace_files.write(to_json(seg));
      trace_files.write(csv(seg));
      std::cout << seg.coordinate << ": " << seg.samples.size() << " samples, t in [" << fmt("%.6g", seg.lowest_potential())
                << ", " << fmt("%.6g", seg.highest_potential()) << "], max residual " << fmt("%.3e", seg.max_residual())
                << "\n";
      if (seg.truncated) {
        std::cerr << "dynrays: trace truncated: " << seg.truncation_reason << "\n";
        return kExitNumerical;
      }
      return kExitOk;
    }
    if (land->parsed()) {
      const MapSpec m = land_map.build();
      land_cfg.trace = land_trace.build();
      const auto v = land_text(m, land_ray_opt.text(m), land_cfg);
      land_files.write(to_json(v));
      std::string radii = "level,radius\n";
      for (std::size_t i = 0; i < v.radii.size(); ++i) radii += std::to_string(i) + "," + format_double(v.radii[i]) + "\n";
      land_files.write(radii);
      std::cout << v.coordinate << (v.landed ? " lands at " : " not certified; estimate ") << point_text(v.point)
                << ", nu " << fmt("%.6g", v.nu) << ", R2 " << fmt("%.6f", v.r2) << "\n";
      if (!v.landed) std::cerr << "dynrays: " << v.diagnostics << "\n";
      return v.landed ? kExitOk : kExitNumerical;
    }
    if (lset->parsed()) {
      const MapSpec m = lset_map.build();
      Json runs = Json::array();
      std::string table = "point_re,point_im,coordinate,period,landed,re,im,error,nu,r2\n";
      bool all = true;
      for (const auto& pt : targets(m, lset_point, lset_period, lset_max)) {
        const auto [set, run] = landing_set_for(m, pt, lset_base, lset_pb.cfg);
        print_table(std::cout, set);
        const auto audit = landing_set_audit(set, m);
        if (!audit.pass())
          for (const auto& v : audit.violations) std::cout << "  audit: " << v << "\n";
        all = all && set.verified(lset_pb.cfg.landing_tol) && audit.pass();
        const auto coords = set.coordinates();
        for (std::size_t i = 0; i < coords.size(); ++i) {
          const auto& v = set.verdicts[i];
          table += format_double(pt.location.real()) + "," + format_double(pt.location.imag()) + "," + coords[i] + "," +
                   std::to_string(set.period) + "," + (v.landed ? "1" : "0") + "," + format_double(v.point.real()) + "," +
                   format_double(v.point.imag()) + "," + format_double(set.landing_errors[i]) + "," +
                   format_double(v.nu) + "," + format_double(v.r2) + "\n";
        }
        Json j;
        j["landing_set"] = to_json(set);
        j["audit"] = to_json(audit);
        j["run"] = to_json(run, lset_curves);
        runs.push_back(std::move(j));
      }
      Json j;
      j["map"] = to_json(m);
      j["period"] = lset_period;
      j["results"] = std::move(runs);
      lset_files.write(j);
      lset_files.write(table);
      return all ? kExitOk : kExitNumerical;
    }
    if (access->parsed()) {
      const MapSpec m = access_map.build();
      access_spec.samples = parse_complex_list(access_samples);
      const auto rep = hyperbolic_accessibility(m, access_spec, access_pb.cfg, access_orbit);
      Json j;
      j["map"] = to_json(m);
      j["report"] = to_json(rep);
      access_files.write(j);
      for (const auto& p : rep.validation.problems) std::cout << "set: " << p << "\n";
      for (const auto& p : rep.points) {
        std::cout << point_text(p.x0) << ": preperiod " << p.preperiod << ", period " << p.period << ", rays {";
        const auto coords = p.set.coordinates();
        for (std::size_t i = 0; i < coords.size(); ++i) std::cout << (i ? ", " : "") << coords[i];
        std::cout << "}" << (p.landed && p.ladder_ok ? "" : " (not verified)") << "\n";
      }
      std::cout << (rep.pass() ? "accessible" : "accessibility not verified") << "\n";
      return rep.pass() ? kExitOk : kExitNumerical;
    }
    if (shrink->parsed()) {
      const MapSpec m = shrink_map.build();
      const auto grid = pullback_grid(m, shrink_top, shrink_rows);
      const Window K{parse_complex(shrink_window), shrink_radius};
      const TraceConfig tc = shrink_trace.build();
      ShrinkProfile prof;
      if (m.is_poly()) {
        if (!shrink_family.empty()) throw ConfigError("--family applies to exponential maps");
        std::vector<PolyAngle> members;
        for (const auto& r : shrink_rays) members.push_back(PolyAngle::parse(r, m.degree));
        if (members.empty()) throw ConfigError("shrink-profile needs at least one --ray");
        prof = shrinking_profile(m, members, grid, K, tc);
      } else {
        std::vector<ExpAddress> members;
        for (const auto& r : shrink_rays) members.push_back(ExpAddress::parse(r));
        if (!shrink_family.empty()) {
          const auto fam = pullback_family(ExpAddress::parse(shrink_family), shrink_depth, shrink_bound);
          members.insert(members.end(), fam.begin(), fam.end());
        }
        if (members.empty()) throw ConfigError("shrink-profile needs --ray or --family");
        prof = shrinking_profile(m, members, grid, K, tc);
      }
      shrink_files.write(to_json(prof));
      shrink_files.write(csv(prof));
      std::cout << csv(prof);
      for (const auto& w : prof.warnings) std::cerr << "warning: " << w << "\n";
      return kExitOk;
    }
    if (verify->parsed()) {
      AcceptanceRunner runner(vcfg);
      Json j;
      j["suite"] = verify_suite;
      j["seed"] = vcfg.seed;
      j["criteria"] = Json::array();
      bool all = true;
      for (int id : suite_criteria(verify_suite)) {
        const auto r = runner.run(id);
        std::cout << result_line(r) << std::endl;
        j["criteria"].push_back(to_json(r));
        all = all && r.pass;
      }
      j["pass"] = all;
      verify_files.write(j);
      return all ? kExitOk : kExitNumerical;
    }
    if (render->parsed()) {
      const MapSpec m = render_map.build();
      write_png(render_path, render_opts.draw(m, render_trace.build(), {}, {}));
      return kExitOk;
    }
    if (report->parsed()) {
      const MapSpec m = report_map.build();
      const auto pt = targets(m, report_point, report_period, 1).front();
      const auto [set, run] = landing_set_for(m, pt, report_base, report_pb.cfg);
      const auto audit = landing_set_audit(set, m);
      const TraceConfig tc = report_trace.build();
      std::filesystem::create_directories(report_dir);
      const std::filesystem::path dir(report_dir);
      Json j;
      j["map"] = to_json(m);
      j["landing_set"] = to_json(set);
      j["audit"] = to_json(audit);
      j["run"] = to_json(run);
      write_file((dir / "report.json").string(), dump(j));
      write_file((dir / "rays.csv").string(), ray_samples_csv(m, set.coordinates(), tc));
      write_png((dir / "picture.png").string(), report_render.draw(m, tc, set.coordinates(), pt.orbit));
      print_table(std::cout, set);
      std::cout << "audit " << (audit.pass() ? "ok" : "failed") << "\n";
      return set.verified(report_pb.cfg.landing_tol) && audit.pass() ? kExitOk : kExitNumerical;
    }
  } catch (const std::exception& e) {
    std::cerr << "dynrays: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

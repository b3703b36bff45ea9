// Runs every acceptance criterion, prints one line per criterion and writes
// the evidence to <out>/acceptance.json. Exit status 0 only if all pass.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "dynrays/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace dynrays;
  CLI::App app{"dynrays acceptance criteria"};
  std::string out;
  std::vector<int> only;
  AcceptanceConfig cfg;
  app.add_option("--out", out, "directory for acceptance.json");
  app.add_option("--only", only, "run these criteria only")->check(CLI::Range(1, kCriteria));
  app.add_option("--seed", cfg.seed, "seed for the random prefixes");
  CLI11_PARSE(app, argc, argv);

  std::vector<int> ids = only;
  if (ids.empty())
    for (int id = 1; id <= kCriteria; ++id) ids.push_back(id);

  AcceptanceRunner runner(cfg);
  Json report;
  report["criteria"] = Json::array();
  bool all = true;
  for (int id : ids) {
    const auto r = runner.run(id);
    std::cout << result_line(r) << std::endl;
    report["criteria"].push_back(to_json(r));
    all = all && r.pass;
  }
  report["pass"] = all;

  if (!out.empty()) {
    try {
      std::filesystem::create_directories(out);
      write_file((std::filesystem::path(out) / "acceptance.json").string(), dump(report));
    } catch (const std::exception& e) {
      std::cerr << "acceptance: " << e.what() << "\n";
      return 2;
    }
  }
  std::cout << (all ? "all criteria passed" : "some criteria FAILED") << std::endl;
  return all ? 0 : 1;
}

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "indtime/catalog.hpp"
#include "indtime/report.hpp"
#include "indtime/scenario.hpp"

namespace {

int severity(int code) {
  switch (code) {
    case indtime::exit_code::validation:
      return 4;
    case indtime::exit_code::budget:
      return 3;
    case indtime::exit_code::mismatch:
      return 2;
    case indtime::exit_code::inconclusive:
      return 1;
    default:
      return 0;
  }
}

void print_checks(const std::string& file, const indtime::RunResult& r) {
  for (const auto& c : r.checks) {
    std::cout << file << '\t' << c.name << '\t' << indtime::to_string(c.report.verdict);
    if (c.expected) std::cout << "\texpected=" << indtime::to_string(*c.expected);
    if (!c.matched()) std::cout << "\tMISMATCH";
    if (!c.report.note.empty()) std::cout << "\t(" << c.report.note << ')';
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks independence properties of random times on simulated and exact paths"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  std::string out_dir = "indtime-out";
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "Run one or more scenario files");
  run->add_option("files", files, "Scenario YAML files")->required()->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = run->add_option("--seed-override", seed, "Replace the master seed of every scenario")
                       ->envname("INDTIME_SEED_OVERRIDE");
  run->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  std::string filter;
  auto* list = app.add_subcommand("list", "List engines, events, statistics, times and bundled scenarios");
  list->add_option("filter", filter, "Show names containing this text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : indtime::exit_code::validation;
  }

  if (*list) {
    std::cout << indtime::list_catalog(filter);
    return 0;
  }

  indtime::RunOptions opts;
  opts.out_dir = out_dir;
  opts.jobs = jobs;
  if (*seed_opt) opts.seed_override = seed;

  int worst = indtime::exit_code::ok;
  for (const auto& f : files) {
    indtime::RunResult r;
    try {
      r = indtime::run_scenario_file(f, opts);
    } catch (const std::exception& e) {
      r.exit_status = indtime::exit_code::validation;
      r.message = f + ": " + e.what();
    }
    if (!r.message.empty()) std::cerr << r.message << '\n';
    print_checks(f, r);
    if (severity(r.exit_status) > severity(worst)) worst = r.exit_status;
  }
  return worst;
}

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "indtime/catalog.hpp"
#include "indtime/scenario.hpp"

using namespace indtime;
namespace fs = std::filesystem;

namespace {

const std::string kBase = R"(name: tiny
engine:
  kind: iid
  law: bernoulli(0.5)
time: {example: first-zero-minus-one}
statistics:
  past: [time]
  future: [step(1)]
budget:
  horizon: 12
)";

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "t.yaml");
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("indtime-test-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(ScenarioParse, Minimal) {
  const auto s = parse_scenario(kBase);
  EXPECT_EQ(s.name, "tiny");
  EXPECT_EQ(s.mode, Scenario::Mode::exact);
  EXPECT_EQ(s.time.example, "first-zero-minus-one");
  EXPECT_EQ(s.budget.horizon, 12);
}

TEST(ScenarioParse, UnknownPredicateNamesField) {
  const std::string text = R"(name: bad
engine: {kind: iid, law: bernoulli(0.5)}
time:
  kind: char-time
  clauses:
    - past: steps-all-equal(1)
      future: first-step-is(0)
statistics: {past: [time], future: [step(1)]}
budget: {horizon: 5}
)";
  const auto e = error_of(text);
  EXPECT_NE(e.find("t.yaml:7:"), std::string::npos) << e;
  EXPECT_NE(e.find("time.clauses[0].future"), std::string::npos) << e;
  EXPECT_NE(e.find("first-step-is"), std::string::npos) << e;
}

TEST(ScenarioParse, UnknownKey) {
  const auto e = error_of(kBase + "colour: blue\n");
  EXPECT_NE(e.find("unknown key 'colour'"), std::string::npos) << e;
  EXPECT_NE(e.find("t.yaml:11:1"), std::string::npos) << e;
}

TEST(ScenarioParse, SyntaxError) { EXPECT_NE(error_of("name: [unclosed\n").find("t.yaml:"), std::string::npos); }

TEST(ScenarioValidate, ExactNeedsFiniteLaw) {
  auto text = kBase;
  text.replace(text.find("bernoulli(0.5)"), 14, "gaussian(0, 1)");
  EXPECT_NE(error_of(text).find("finite law"), std::string::npos);
}

TEST(ScenarioValidate, ExpectationNeedsCheck) {
  EXPECT_NE(error_of(kBase + "expect: {law: pass}\n").find("expect.law"), std::string::npos);
}

TEST(ScenarioValidate, PresentNeedsExactMode) {
  const std::string text = R"(name: p
engine: {kind: bm-drift, mu: -1, sigma: 1}
time: {kind: first-passage, level: -1}
statistics: {past: [time], future: [increment-at(1)], present: [value]}
mode: monte-carlo
budget: {horizon: 5, step: 0.01}
)";
  EXPECT_NE(error_of(text).find("present statistics need exact mode"), std::string::npos);
}

TEST(ScenarioValidate, BudgetGuard) {
  EXPECT_THROW(parse_scenario(R"(name: big
engine: {kind: iid, law: bernoulli(0.5)}
time: {example: first-zero-minus-one}
statistics: {past: [time], future: [step(1)]}
budget: {horizon: 40, exact_route: full}
)"),
               BudgetGuardError);
  EXPECT_THROW(parse_scenario(kBase.substr(0, kBase.size() - 1) + "\n  permutations: 1000000\n"), BudgetGuardError);
}

TEST(ScenarioParse, CompactAndMappingFormsAgree) {
  const auto a = parse_scenario(kBase);
  auto text = kBase;
  text.replace(text.find("[step(1)]"), 9, "[{kind: step, index: 1}]");
  const auto b = parse_scenario(text);
  EXPECT_EQ(nlohmann::json(a.future), nlohmann::json(b.future));
}

TEST(ScenarioParse, BundledFilesParse) {
  for (const auto& name : bundled_scenarios()) {
    const auto s = load_scenario(fs::path(INDTIME_SCENARIO_DIR) / (name + ".yaml"));
    EXPECT_EQ(s.name, name);
    EXPECT_FALSE(s.description.empty());
    EXPECT_FALSE(s.expect.empty());
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(INDTIME_SCENARIO_DIR)) files += e.path().extension() == ".yaml";
  EXPECT_EQ(files, bundled_scenarios().size());
}

TEST(ScenarioRun, BernoulliFirstZero) {
  RunOptions o;
  o.out_dir = scratch("first-zero");
  const auto r = run_scenario_file(fs::path(INDTIME_SCENARIO_DIR) / "bernoulli-first-zero.yaml", o);
  EXPECT_EQ(r.exit_status, exit_code::ok) << r.message;
  EXPECT_EQ(r.checks.front().report.value, 0.0);
  const auto dir = o.out_dir / "bernoulli-first-zero";
  for (const char* f : {"report.json", "summary.csv", "metadata.json", "discrepancy.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["outcome"], "ok");
  EXPECT_FALSE(report["checks"][0]["details"].contains("table"));
}

TEST(ScenarioRun, CounterexampleExpectedVerdicts) {
  RunOptions o;
  o.write_files = false;
  const auto r = run_scenario_file(fs::path(INDTIME_SCENARIO_DIR) / "counterexample-walk.yaml", o);
  EXPECT_EQ(r.exit_status, exit_code::ok);
  ASSERT_EQ(r.checks.size(), 2u);
  EXPECT_EQ(r.checks[0].report.verdict, Verdict::fail);
  EXPECT_EQ(r.checks[1].report.verdict, Verdict::pass);
}

TEST(ScenarioRun, MismatchExitCode) {
  auto s = parse_scenario(kBase + "expect: {independence: fail}\n");
  RunOptions o;
  o.write_files = false;
  EXPECT_EQ(run_scenario(s, o).exit_status, exit_code::mismatch);
}

TEST(ScenarioRun, ValidationExitCode) {
  const auto dir = scratch("invalid");
  fs::create_directories(dir);
  std::ofstream(dir / "x.yaml") << "name: x\nengine: {kind: warp}\n";
  RunOptions o;
  o.write_files = false;
  const auto r = run_scenario_file(dir / "x.yaml", o);
  EXPECT_EQ(r.exit_status, exit_code::validation);
  EXPECT_NE(r.message.find("unknown engine 'warp'"), std::string::npos) << r.message;
}

TEST(ScenarioRun, ReportIsReproducibleAcrossJobs) {
  const auto s = parse_scenario(R"(name: walk
engine:
  kind: random-walk
  law: {kind: finite, values: [-2, -1, 1], probs: [0.3, 0.4, 0.3]}
time: {kind: first-passage, level: -3, direction: down}
statistics: {past: [time, value], future: [step(1)]}
mode: monte-carlo
budget: {horizon: 60, paths: 400, permutations: 99}
reference: {kind: unconditional}
)");
  RunOptions a;
  a.write_files = false;
  RunOptions b = a;
  b.jobs = 3;
  EXPECT_EQ(run_scenario(s, a).report.dump(), run_scenario(s, b).report.dump());
  RunOptions c = a;
  c.seed_override = 99;
  EXPECT_NE(run_scenario(s, a).report.dump(), run_scenario(s, c).report.dump());
}

TEST(Catalog, ListsRequiredEntries) {
  const auto all = list_catalog();
  for (const char* name : {"last-supremum", "unit-drift-then-jump", "first-passage"})
    EXPECT_NE(all.find(name), std::string::npos) << name;
  const auto jump = list_catalog("jump");
  std::istringstream lines(jump);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    ++n;
    std::istringstream cols(line);
    std::string category, name;
    std::getline(cols, category, '\t');
    std::getline(cols, name, '\t');
    EXPECT_NE(name.find("jump"), std::string::npos) << line;
  }
  EXPECT_GT(n, 3);
  EXPECT_LT(jump.size(), all.size());
}

TEST(Catalog, ExamplesResolve) {
  for (const auto& name : example_time_names()) EXPECT_TRUE(example_time(name).has_value()) << name;
  EXPECT_FALSE(example_time("nope").has_value());
}

TEST(ScenarioRun, ReportDoesNotDependOnJobs) {
  const fs::path root = fs::temp_directory_path() / "indtime-jobs-test";
  fs::remove_all(root);
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string reports[2];
  for (unsigned jobs : {1u, 3u}) {
    RunOptions o;
    o.out_dir = root / std::to_string(jobs);
    o.jobs = jobs;
    const auto r = run_scenario_file(fs::path(INDTIME_SCENARIO_DIR) / "walk-first-passage.yaml", o);
    EXPECT_EQ(r.exit_status, exit_code::ok);
    reports[jobs == 1 ? 0 : 1] = read(o.out_dir / "walk-first-passage" / "report.json");
  }
  EXPECT_FALSE(reports[0].empty());
  EXPECT_EQ(reports[0], reports[1]);
  fs::remove_all(root);
}

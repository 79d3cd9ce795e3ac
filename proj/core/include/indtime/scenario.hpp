#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "indtime/engines.hpp"
#include "indtime/exact.hpp"
#include "indtime/regen.hpp"
#include "indtime/stats.hpp"
#include "indtime/times.hpp"

namespace indtime {

/// Process exit codes of the scenario runner.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int mismatch = 1;
inline constexpr int validation = 2;
inline constexpr int inconclusive = 3;
inline constexpr int budget = 4;
}  // namespace exit_code

/// Parse or validation failure; the message starts with "file:line:column:".
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A budget outside the configured guards.
class BudgetGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Guards applied to every scenario.
namespace guard {
inline constexpr std::size_t max_effective = 10'000'000;
inline constexpr std::size_t max_paths = 100'000'000;
inline constexpr std::size_t max_permutations = 100'000;
inline constexpr double max_grid_points = 1e7;
}  // namespace guard

struct Scenario {
  enum class Mode { exact, monte_carlo, both };

  struct Reference {
    enum class Kind { unconditional, conditional, strict_formula };
    Kind kind = Kind::unconditional;
    PathEvent event = PathEvent::whole();
    IncrementalFunctional functional{};
    std::size_t paths = 0;  ///< reference samples (rejection) or fresh paths (strict formula); 0 = budget.paths
    std::size_t pilot = 2000;
    double floor = 1e-3;
  };

  struct Factorize {
    std::size_t first = 0;
    std::size_t last = 0;
  };

  struct IfIdentity {
    IncrementalFunctional functional{};
    FutureFunctional weight = FutureFunctional::constant(1.0);
    PastProcessSpec process = PastProcessSpec::one();
    std::size_t paths = 100000;
    double k = 3.0;
    double max_discard = 0.01;
  };

  std::string name;
  std::string description;
  std::string source;  ///< file the scenario came from

  EngineSpec engine = EngineSpec::random_walk(StepLaw::bernoulli(0.5));
  SampleBudget budget{};
  TimeSpec time{};
  std::vector<PastStatistic> past;
  std::vector<FutureFunctional> future;
  std::vector<PastStatistic> present;
  Mode mode = Mode::exact;

  std::size_t paths = 10000;  ///< effective Monte Carlo samples
  std::size_t max_paths = 1'000'000;
  std::size_t permutations = 999;
  std::uint64_t exact_budget = kExactBudget;
  ExactRoute exact_route = ExactRoute::automatic;
  std::uint64_t seed = 1;
  double tail_margin = kInf;
  double alpha = 0.01;
  double max_discard = 0.01;
  std::size_t bins = 8;
  IndependenceStatistic independence = IndependenceStatistic::chi_square_binned;
  LawStatistic law = LawStatistic::ks;

  std::optional<Reference> reference;
  std::optional<Factorize> factorization;
  std::optional<IfIdentity> if_identity;
  std::map<std::string, Verdict> expect;  ///< check name -> expected verdict
};

/// Throws ScenarioError (validation) or BudgetGuardError.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::filesystem::path& file);

/// Checks cross-field rules; throws ScenarioError or BudgetGuardError.
void validate(const Scenario& s);

struct RunOptions {
  std::filesystem::path out_dir = "indtime-out";
  std::optional<std::uint64_t> seed_override;
  unsigned jobs = 1;
  bool write_files = true;
};

struct CheckResult {
  std::string name;  ///< independence, conditional, law, factorization, if-identity
  TestReport report;
  std::optional<Verdict> expected;

  [[nodiscard]] bool matched() const { return !expected || *expected == report.verdict; }
};

struct RunResult {
  int exit_status = exit_code::ok;
  std::vector<CheckResult> checks;
  nlohmann::json report;  ///< deterministic content of report.json
  std::string message;    ///< error text for validation and budget failures
};

/// Runs every configured check and writes report.json, summary.csv,
/// metadata.json and plot data into out_dir/<name>/.
RunResult run_scenario(const Scenario& s, const RunOptions& opts = {});
/// Loads, validates and runs; parse and guard failures map to exit codes.
RunResult run_scenario_file(const std::filesystem::path& file, const RunOptions& opts = {});

std::string to_string(Scenario::Mode m);

}  // namespace indtime

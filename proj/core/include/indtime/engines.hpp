#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "indtime/paths.hpp"
#include "indtime/rng.hpp"

namespace indtime {

/// Law of a single step Y_1 (or of a jump size).
class StepLaw {
 public:
  enum class Kind { bernoulli, finite_support, gaussian, constant, exponential };

  static StepLaw bernoulli(double p);
  static StepLaw finite_support(std::vector<double> values, std::vector<double> probs);
  static StepLaw gaussian(double mu, double sigma);
  static StepLaw constant(double c);
  /// Exponential with the given rate (jump sizes of subordinators).
  static StepLaw exponential(double rate);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double sample(Rng& rng) const;
  [[nodiscard]] double mean() const;
  /// True when the law has finite support (bernoulli, finite-support, constant).
  [[nodiscard]] bool is_finite() const noexcept;
  /// Atoms and their probabilities; only for finite laws.
  [[nodiscard]] std::vector<double> support() const;
  [[nodiscard]] std::vector<double> probabilities() const;
  /// True when every value the law can produce is strictly positive.
  [[nodiscard]] bool strictly_positive() const;

  [[nodiscard]] double param(std::size_t i) const { return params_.at(i); }
  [[nodiscard]] std::string describe() const;

 private:
  StepLaw(Kind kind, std::vector<double> params, std::vector<double> values = {})
      : kind_(kind), params_(std::move(params)), values_(std::move(values)) {}

  Kind kind_;
  std::vector<double> params_;  // p | probs | (mu, sigma) | c | rate
  std::vector<double> values_;  // finite-support atoms
  std::vector<double> cdf_;
};

/// The continuous-time processes the library simulates.
struct LevySpec {
  enum class Kind { bm_drift, compound_poisson, drift_minus_cp };

  static LevySpec bm_drift(double mu, double sigma);
  static LevySpec compound_poisson(double rate, StepLaw jump_law);
  /// drift * t minus a compound Poisson subordinator with positive jumps.
  static LevySpec drift_minus_cp(double drift, double rate, StepLaw jump_law);

  Kind kind = Kind::bm_drift;
  double mu = 0.0;
  double sigma = 1.0;
  double rate = 1.0;
  double drift = 0.0;
  StepLaw jump_law = StepLaw::constant(0.0);

  /// Long-run drift E[X_1].
  [[nodiscard]] double mean_drift() const;
};

// Samplers ---------------------------------------------------------------------

SequencePath sample_iid(const StepLaw& law, std::size_t horizon, Rng& rng);
SequencePath sample_random_walk(const StepLaw& law, std::size_t horizon, Rng& rng);
GridPath sample_bm_drift(double mu, double sigma, double step, double horizon, Rng& rng);
EventPath sample_compound_poisson(double rate, const StepLaw& jump_law, double horizon, Rng& rng);
EventPath sample_drift_minus_cp(double drift, double rate, const StepLaw& jump_law, double horizon,
                                Rng& rng);

using Path = std::variant<SequencePath, GridPath, EventPath>;

/// Any sampler the library offers, as a single value.
struct EngineSpec {
  enum class Kind { iid, random_walk, levy };

  static EngineSpec iid(StepLaw law) { return {Kind::iid, std::move(law), {}}; }
  static EngineSpec random_walk(StepLaw law) { return {Kind::random_walk, std::move(law), {}}; }
  static EngineSpec levy(LevySpec spec) { return {Kind::levy, StepLaw::constant(0.0), std::move(spec)}; }

  Kind kind = Kind::random_walk;
  StepLaw law = StepLaw::constant(0.0);
  LevySpec levy_spec{};

  /// Drift of the walk or process, used by tail rules.
  [[nodiscard]] double mean_drift() const;
};

/// Horizon and grid used when sampling an EngineSpec.
struct SampleBudget {
  double horizon = 100.0;  ///< L for discrete engines, T_max for continuous ones
  double step = 0.01;      ///< grid step for Brownian engines
};

/// Discrete engines always return a walk (iid values are returned as the
/// walk of their partial sums so every consumer sees the same view).
Path sample_path(const EngineSpec& spec, const SampleBudget& budget, Rng& rng);

/// Paths for stream indices first..first+count-1 in domain seed_domain::paths.
std::vector<Path> sample_batch(const EngineSpec& spec, const SampleBudget& budget, std::size_t count,
                               std::uint64_t master_seed, std::uint64_t first = 0, unsigned jobs = 1);

}  // namespace indtime

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "indtime/engines.hpp"
#include "indtime/regen.hpp"
#include "indtime/stats.hpp"
#include "indtime/times.hpp"

namespace indtime {

// Samples at a random time ---------------------------------------------------------

struct CollectOptions {
  std::size_t target = 10000;       ///< effective samples wanted
  std::size_t max_paths = 2'000'000;
  std::size_t batch = 1024;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  EvalOptions eval{};
};

/// (Z_R, H(Delta_R X)) on {R < inf}, collected from paths 0, 1, 2, ... in
/// order until `target` effective samples exist.
struct McCollection {
  SampleRows z;
  SampleRows h;
  SampleRows present;
  std::vector<double> times;
  std::size_t paths = 0;
  std::size_t infinite = 0;
  std::size_t undecided = 0;     ///< R undecided
  std::size_t short_future = 0;  ///< H reads past the horizon
  std::size_t invalid = 0;       ///< the time fired more than once
  std::size_t tail_assumed = 0;  ///< effective samples decided by the tail rule
  bool exhausted = false;        ///< max_paths reached before the target

  [[nodiscard]] std::size_t effective() const noexcept { return z.size(); }
  /// Discarded over (discarded + effective).
  [[nodiscard]] double discard_fraction() const noexcept;
};

McCollection collect_samples(const EngineSpec& engine, const SampleBudget& budget, const TimeSpec& r,
                             const std::vector<PastStatistic>& z, const std::vector<FutureFunctional>& h,
                             const CollectOptions& opts, const std::vector<PastStatistic>& present = {});

// Reference laws ------------------------------------------------------------------

class AcceptanceTooLow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReferenceOptions {
  std::size_t target = 10000;
  std::size_t pilot = 2000;
  double floor = 1e-3;  ///< minimum pilot acceptance
  std::size_t max_paths = 5'000'000;
  std::size_t batch = 256;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  EvalOptions eval{};
};

struct ReferenceStats {
  std::size_t tried = 0;
  std::size_t accepted = 0;
  std::size_t undecided = 0;  ///< G undecided at the horizon (rejected)
  double pilot_acceptance = 0.0;

  [[nodiscard]] double acceptance() const noexcept {
    return tried == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(tried);
  }
};

/// Truth of an increment-path event on a whole path started at 0.
Truth evaluate_on_path(const PathEvent& g, const Path& path, const EvalOptions& opts = {});

/// Streams paths of L(. | G) by rejection, in stream-index order, until the
/// sink returns false, `target` paths were accepted or max_paths were tried.
/// A pilot run estimates the acceptance first; below the floor it throws
/// AcceptanceTooLow.
ReferenceStats reference_conditional_sampler(const EngineSpec& engine, const SampleBudget& budget,
                                             const PathEvent& g, const ReferenceOptions& opts,
                                             const std::function<bool(const Path&)>& sink);

/// H evaluated on `target` accepted reference paths.
SampleRows reference_samples(const EngineSpec& engine, const SampleBudget& budget, const PathEvent& g,
                             const std::vector<FutureFunctional>& h, const ReferenceOptions& opts,
                             ReferenceStats* stats = nullptr);

/// Estimate of P'(H) = E int_0^1 H(Delta_u X) dA_u / E A_1 for a strict time
/// built from A, from paired per-path sums.
struct StrictLawEstimate {
  std::vector<double> ratio;  ///< per coordinate of H
  std::vector<double> se;
  double mean_a1 = 0.0;
  double se_a1 = 0.0;
  std::size_t paths = 0;
  std::size_t discarded = 0;
  /// H at every unit atom of A in [0, 1]; rows follow path order. Atoms of
  /// other masses and slope parts enter the ratio only.
  SampleRows samples;
};

struct StrictLawOptions {
  std::size_t paths = 100000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  EvalOptions eval{};
};

/// Throws std::domain_error when E A_1 is not distinguishable from 0.
StrictLawEstimate strict_time_law_formula(const EngineSpec& engine, const SampleBudget& budget,
                                          const IncrementalFunctional& a, const std::vector<FutureFunctional>& h,
                                          const StrictLawOptions& opts);

}  // namespace indtime

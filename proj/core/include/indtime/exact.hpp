#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "indtime/engines.hpp"
#include "indtime/report.hpp"
#include "indtime/times.hpp"

namespace indtime {

/// Largest number of weighted sequences the exact oracle will visit.
inline constexpr std::uint64_t kExactBudget = 100'000'000;

class ExactBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// I.i.d. steps on a finite alphabet over L steps. Sequences are visited as
/// walks X_0 = 0, X_n = Y_1 + ... + Y_n with weight prod p(Y_i).
struct ExactModel {
  std::vector<double> alphabet;
  std::vector<double> probs;
  std::size_t horizon = 0;

  static ExactModel from_law(const StepLaw& law, std::size_t horizon);

  /// |alphabet|^horizon, saturating at UINT64_MAX.
  [[nodiscard]] std::uint64_t sequence_count() const noexcept;
  /// Throws std::invalid_argument on bad probabilities and ExactBudgetExceeded
  /// above the budget.
  void validate(std::uint64_t budget = kExactBudget) const;
};

enum class ExactRoute {
  full,       ///< enumerate every sequence
  factored,   ///< char-times only: prefix atoms x suffix atoms per clause and index
  automatic,  ///< full within budget, factored otherwise
};

struct ExactOptions {
  EvalOptions eval{};
  ExactRoute route = ExactRoute::automatic;
  unsigned jobs = 1;
  std::uint64_t budget = kExactBudget;
  double tolerance = 1e-12;
  double max_undecided = 0.01;
};

using Cell = std::vector<double>;
using LawTable = std::map<Cell, long double>;

/// Exact joint law of (present, Z_R, H(Delta_R X)) on {R < inf}, unnormalized.
struct ExactTally {
  std::map<Cell, LawTable> cells;  ///< present -> (z ++ h) -> mass
  std::size_t z_dim = 0;
  long double total = 0;         ///< mass of all visited sequences
  long double finite = 0;        ///< R < inf, decided, H defined
  long double infinite = 0;
  long double undecided = 0;     ///< R undecided, or H reads past the horizon
  long double tail_assumed = 0;  ///< part of `finite` decided by the tail rule
  long double invalid = 0;       ///< the time specification does not give a single time
  std::uint64_t sequences = 0;
  ExactRoute route = ExactRoute::full;
};

ExactTally exact_tally(const ExactModel& model, const TimeSpec& r, const std::vector<PastStatistic>& z,
                       const std::vector<FutureFunctional>& h, const std::vector<PastStatistic>& present,
                       const ExactOptions& opts = {});

/// Max |P'(z, h) - P'(z) P'(h)| over the product of the supports, within each
/// present slice (conditional probabilities given the slice).
double max_discrepancy(const ExactTally& tally);

TestReport exact_independence_check(const ExactModel& model, const TimeSpec& r,
                                    const std::vector<PastStatistic>& z,
                                    const std::vector<FutureFunctional>& h, const ExactOptions& opts = {});

TestReport exact_cond_independence_check(const ExactModel& model, const TimeSpec& r,
                                         const std::vector<PastStatistic>& z,
                                         const std::vector<FutureFunctional>& h,
                                         const std::vector<PastStatistic>& present,
                                         const ExactOptions& opts = {});

// Laws --------------------------------------------------------------------------

/// Normalized law of H(Delta_R X) under P'.
LawTable exact_law(const ExactModel& model, const TimeSpec& r, const std::vector<FutureFunctional>& h,
                   const ExactOptions& opts = {});
/// Normalized law of H(X) given X in G; sequences where G is undecided are excluded.
LawTable exact_reference_law(const ExactModel& model, const PathEvent& g, const std::vector<FutureFunctional>& h,
                             const ExactOptions& opts = {});
/// Max absolute difference over the union of cells.
double law_distance(const LawTable& a, const LawTable& b);

TestReport exact_law_check(const ExactModel& model, const TimeSpec& r, const std::vector<FutureFunctional>& h,
                           const PathEvent& g, const ExactOptions& opts = {});

// Factorization -----------------------------------------------------------------

/// Outcome of splitting {R = n} into a prefix event and a suffix event.
struct Factorization {
  std::size_t n = 0;
  bool factorizable = false;
  long double probability = 0;  ///< P(R = n)
  double residual = 0.0;        ///< max |1(R=n) - P(R=n | prefix) P(R=n | suffix) / P(R=n)|
  std::vector<std::vector<double>> prefixes;  ///< F_n as step sequences of length n
  std::vector<std::vector<double>> suffixes;  ///< G_n as step sequences of length L - n
};

/// Throws std::domain_error when P(R = n) = 0.
Factorization factorize_event(const ExactModel& model, const TimeSpec& r, std::size_t n,
                              const ExactOptions& opts = {});

/// G_n as a set of step sequences of length `depth`, when membership in G_n
/// depends only on the first `depth` steps; nullopt otherwise.
std::optional<std::vector<std::vector<double>>> project_suffixes(const ExactModel& model,
                                                                 const Factorization& f, std::size_t depth);

/// Factorizes {R = n} for every n in [first, last] with positive mass and
/// checks that the projected G_n agree. Passes when all factorize and agree.
TestReport check_factorization(const ExactModel& model, const TimeSpec& r, std::size_t first, std::size_t last,
                               const ExactOptions& opts = {});

}  // namespace indtime

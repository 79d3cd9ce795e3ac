#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "indtime/engines.hpp"
#include "indtime/predicates.hpp"
#include "indtime/report.hpp"
#include "indtime/stopping.hpp"

namespace indtime {

/// Options shared by path evaluators.
struct EvalOptions {
  TailRule tail{};
  Tolerance tol{};
};

// Terminal times ---------------------------------------------------------------

/// Incremental terminal time T: 0, infinity, exponential, a first jump with
/// size in (low, high), or the minimum of an inner terminal time with an
/// independent exponential time.
struct TerminalTimeSpec {
  enum class Kind { infinite, zero, exponential, jump_pattern, min_with_exponential };

  Kind kind = Kind::infinite;
  double rate = 0.0;
  double low = 0.0;
  double high = 0.0;
  std::vector<TerminalTimeSpec> inner;  // one entry for min_with_exponential

  static TerminalTimeSpec infinite() { return {}; }
  static TerminalTimeSpec zero() { return {Kind::zero, 0.0, 0.0, 0.0, {}}; }
  static TerminalTimeSpec exponential(double rate);
  static TerminalTimeSpec jump_pattern(double low, double high);
  static TerminalTimeSpec min_with_exponential(TerminalTimeSpec inner, double rate);

  /// 1 / E[T] when it follows from the terminal-time specification alone (0 for infinite, inf for zero).
  [[nodiscard]] std::optional<double> known_rate() const;
};

/// Exponential kinds draw from rng independently of the path; jump patterns
/// read the path (an event path is required) and are undecided when no
/// matching jump occurs before the horizon.
TimeValue sample_itt(const TerminalTimeSpec& spec, const Path* path, Rng& rng);

// Incremental functionals ------------------------------------------------------

/// Nondecreasing right-continuous A with A_0 = 0.
struct IncrementalFunctional {
  enum class Kind {
    lebesgue,              ///< A_t = t
    unit_drift_then_jump,  ///< unit atoms at t where the increment path drifts `a` spatial units, then jumps
    eps_excursion,         ///< unit atoms at t where the increment path hits a before 0, never to return to a
    weighted,              ///< int H(Delta_s X) dA_s over the base
    stopped,               ///< base stopped at a terminal time
  };

  Kind kind = Kind::lebesgue;
  double a = 0.0;
  std::vector<IncrementalFunctional> base;  // weighted, stopped
  std::vector<FutureFunctional> weight;     // weighted
  std::vector<TerminalTimeSpec> terminal;   // stopped

  static IncrementalFunctional lebesgue() { return {}; }
  static IncrementalFunctional unit_drift_then_jump(double units = 1.0);
  static IncrementalFunctional eps_excursion(double eps);
  static IncrementalFunctional weighted(IncrementalFunctional base, FutureFunctional h);
  static IncrementalFunctional stopped(IncrementalFunctional base, TerminalTimeSpec t);

  /// Terminal time of the outermost stopped layer (infinite otherwise).
  [[nodiscard]] TerminalTimeSpec terminal_time() const;
};

/// Realization of A on one path.
struct RealizedIF {
  struct Atom {
    double time;
    double mass;
  };
  struct Slope {
    double begin;
    double end;
    double rate;
  };

  std::vector<Atom> atoms;
  std::vector<Slope> segments;
  /// A is known exactly on [0, decided_until].
  double decided_until = 0.0;
  /// Candidate atom times left undecided (lookahead past the horizon).
  std::vector<double> undecided;
  /// Realized terminal time (infinite when A is not stopped).
  TimeValue terminal = TimeValue::infinite();

  /// A_t; t must not exceed decided_until.
  [[nodiscard]] double value(double t) const;
  /// A((a, b]) restricted to atoms plus slope mass over [a, b].
  [[nodiscard]] double mass(double a, double b) const;
};

RealizedIF realize_if(const IncrementalFunctional& a, const Path& path, Rng& terminal_rng,
                      const EvalOptions& opts = {});
/// A^T for a known T.
RealizedIF stopped_at(RealizedIF a, TimeValue t);

// IF identity ------------------------------------------------------------------

/// Adapted nonnegative process M used on the left of the identity.
struct PastProcessSpec {
  enum class Kind { one, until, after };

  Kind kind = Kind::one;
  double c = 0.0;             ///< until: M = 1 on [0, c]
  StoppingSpec stopping{};    ///< after: M = 1 on [S, inf)

  static PastProcessSpec one() { return {}; }
  static PastProcessSpec until(double c) { return {Kind::until, c, {}}; }
  static PastProcessSpec after(StoppingSpec s) { return {Kind::after, 0.0, s}; }
};

struct IfIdentityConfig {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  double k = 3.0;                         ///< agreement within k standard errors
  double max_discard = 0.01;              ///< above this the verdict is inconclusive
  double quadrature_step = 0.01;          ///< for slope segments with a non-constant H
  std::vector<StoppingSpec> declared_stopping;  ///< atom collision check
  EvalOptions eval{};
};

/// Monte Carlo estimates of both sides of
///   E int M_u H(Delta_u X) dA_u = E int_0^1 H(Delta_u X) dA_u * E int_0^T M_u du * lambda / (1 - e^-lambda)
/// with delta-method standard errors; lambda = 1/E T and the factor is 1 at lambda = 0.
TestReport check_if_identity(const EngineSpec& engine, const SampleBudget& budget,
                             const IncrementalFunctional& a, const FutureFunctional& h,
                             const PastProcessSpec& m, const IfIdentityConfig& config);

/// lambda / (1 - exp(-lambda)), continuous at 0.
double if_factor(double lambda);

void to_json(nlohmann::json& j, const TerminalTimeSpec& t);
void to_json(nlohmann::json& j, const IncrementalFunctional& a);
void to_json(nlohmann::json& j, const PastProcessSpec& m);

}  // namespace indtime

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "indtime/engines.hpp"
#include "indtime/predicates.hpp"
#include "indtime/regen.hpp"
#include "indtime/stopping.hpp"

namespace indtime {

/// Raised when a specification does not define a single random time on a
/// path (two char-time indices fire, two thin components fire, O.dA has
/// more than one atom, ...).
class InvalidTimeConstruction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One clause {R = n} = F_n and {Delta_n X in G}.
struct CharClause {
  EventSpec past;
  PathEvent future;
};

/// Family of stopping times S_j: for the j-th strict ladder epoch of the
/// path (time 0 counts), the first time the drawdown from that epoch's
/// level reaches `depth` before the next ladder epoch.
struct LadderDrawdownFamily {
  double depth = 1.0;
  EventSpec past = EventSpec::always();
};

struct ThinComponent {
  StoppingSpec stopping;
  EventSpec past = EventSpec::always();
};

struct ThinTimeSpec {
  std::vector<ThinComponent> components;
  std::optional<LadderDrawdownFamily> ladder;
  PathEvent future = PathEvent::whole();
};

struct IfTimeSpec {
  IncrementalFunctional functional;
  EventSpec optional = EventSpec::always();
  /// Atoms after this time are ignored (restriction to an optional set).
  double max_time = kInf;
};

struct LastSupSpec {
  enum class Variant {
    discrete,           ///< last time at the running supremum, two clauses on the step after it
    global,             ///< L: last time at the global supremum
    r_eps,              ///< last t with X_t + eps >= global supremum
    r_eps_before_max,   ///< last t before L with X_t <= global supremum - eps
    delta_l_hitting,    ///< 0 if X never reaches `level`, else first hitting of -depth by Delta_L X
  };

  Variant variant = Variant::global;
  double eps = 0.1;
  double level = 1.0;
  double depth = 1.0;
  /// discrete: window of future steps checked by the clauses (0 = whole tail).
  std::size_t window = 0;
  /// discrete: largest index at which R may occur.
  double max_time = kInf;
};

struct TimeSpec {
  enum class Kind { deterministic, first_passage, char_time, thin_time, if_time, last_sup, restriction };

  Kind kind = Kind::deterministic;
  StoppingSpec stopping{};
  std::vector<CharClause> clauses;
  double max_time = kInf;  ///< char-time: F_n = empty for n > max_time
  ThinTimeSpec thin{};
  std::vector<IfTimeSpec> if_time;  // one entry
  LastSupSpec last_sup{};
  std::shared_ptr<const TimeSpec> inner;
  std::optional<EventSpec> restrict_past;
  std::optional<PathEvent> restrict_future;
  std::string example;  ///< catalog name when built from a catalog entry

  static TimeSpec deterministic(double t);
  static TimeSpec first_passage(double level, bool above);
  static TimeSpec char_time(EventSpec f, PathEvent g, double max_time = kInf);
  static TimeSpec char_time(std::vector<CharClause> clauses, double max_time = kInf);
  static TimeSpec thin_time(ThinTimeSpec spec);
  static TimeSpec if_time_of(IfTimeSpec spec);
  static TimeSpec last_supremum(LastSupSpec spec);
  static TimeSpec restricted(TimeSpec inner, EventSpec optional_set);
  static TimeSpec restricted(TimeSpec inner, PathEvent increment_event);

  /// True for deterministic and first-passage kinds.
  [[nodiscard]] bool is_stopping() const noexcept {
    return kind == Kind::deterministic || kind == Kind::first_passage;
  }
};

/// Per-path evaluation context. The terminal stream feeds exponential
/// terminal times of if-time functionals.
struct TimeContext {
  EvalOptions eval{};
  SeedStream terminal{};
};

// Evaluators -------------------------------------------------------------------

TimeValue eval_char_time(const std::vector<CharClause>& clauses, const SampledView& walk,
                         double max_time = kInf, const EvalOptions& opts = {});
/// Accepts a value sequence (Y) or a walk (X).
TimeValue eval_char_time(const EventSpec& f, const PathEvent& g, const SequencePath& path,
                         const EvalOptions& opts = {});

/// Clauses of the discrete last-supremum char-time (window 0 checks the whole tail).
std::vector<CharClause> last_sup_clauses(std::size_t window);

TimeValue eval_last_sup_time(const LastSupSpec& spec, const SampledView& path, const EvalOptions& opts = {});
TimeValue eval_last_sup_time(const LastSupSpec& spec, const EventPath& path, const EvalOptions& opts = {});

/// Stopping times S_j of the ladder family on one path, increasing.
std::vector<double> ladder_drawdown_times(const LadderDrawdownFamily& family, const SampledView& path,
                                          const EvalOptions& opts = {});

TimeValue eval_thin_time(const ThinTimeSpec& spec, const SampledView& path, const EvalOptions& opts = {});
TimeValue eval_thin_time(const ThinTimeSpec& spec, const EventPath& path, const EvalOptions& opts = {});

TimeValue eval_if_time(const IfTimeSpec& spec, const Path& path, Rng& terminal_rng,
                       const EvalOptions& opts = {});

/// Any TimeSpec on any path.
TimeValue evaluate(const TimeSpec& spec, const Path& path, const TimeContext& ctx = {});
TimeValue evaluate(const TimeSpec& spec, const SampledView& path, const TimeContext& ctx = {});

/// R restricted to an optional set or to an increment event.
TimeValue restrict_time(TimeValue r, const EventSpec& optional_set, const Path& path,
                        const EvalOptions& opts = {});
TimeValue restrict_time(TimeValue r, const PathEvent& increment_event, const Path& path,
                        const EvalOptions& opts = {});

// Past and future at a time ------------------------------------------------------

/// Z evaluated on the path truncated at t.
double past_at(const PastStatistic& z, const Path& path, double t, const Tolerance& tol = {});
/// H evaluated on Delta_t X; nullopt when the horizon is too short.
std::optional<double> future_at(const FutureFunctional& h, const Path& path, double t,
                                const EvalOptions& opts = {});

void to_json(nlohmann::json& j, const TimeSpec& t);

}  // namespace indtime

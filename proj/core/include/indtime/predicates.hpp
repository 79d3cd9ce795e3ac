#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "indtime/paths.hpp"

namespace indtime {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Three-valued truth. `assumed` marks a value decided by the tail rule.
struct Truth {
  enum class Value { no, yes, undecided };
  Value value = Value::no;
  bool assumed = false;

  static Truth yes(bool assumed = false) { return {Value::yes, assumed}; }
  static Truth no(bool assumed = false) { return {Value::no, assumed}; }
  static Truth undecided() { return {Value::undecided, false}; }
  static Truth of(bool b) { return b ? yes() : no(); }

  [[nodiscard]] bool is_yes() const noexcept { return value == Value::yes; }
  [[nodiscard]] bool is_no() const noexcept { return value == Value::no; }
  [[nodiscard]] bool is_undecided() const noexcept { return value == Value::undecided; }

  friend bool operator==(const Truth&, const Truth&) = default;
};

/// Kleene connectives; the assumed flag propagates from the operands that
/// decided the result.
Truth operator&&(Truth a, Truth b);
Truth operator||(Truth a, Truth b);
Truth operator!(Truth a);

/// How tail-dependent events are resolved at the horizon.
///
/// "Never reaches level" on a path whose observed part stays below the level
/// is resolved to true (assumed) only when the drift is negative and the
/// final observed value sits at least `margin` below the level. With a
/// nonnegative drift such events are a.s. false and resolve to false
/// (assumed). Otherwise they stay undecided.
struct TailRule {
  /// Mean drift of the process; NaN when unknown (tail questions stay undecided).
  double drift = std::numeric_limits<double>::quiet_NaN();
  double margin = kInf;
};

/// Numeric tolerance for real comparisons in predicates.
struct Tolerance {
  double value = 0.0;
  double time = 1e-9;
};

/// Read-only view of a sampled path (walk or grid): x[0] is at time 0,
/// values are reported relative to `base`.
struct SampledView {
  std::span<const double> x;
  double h = 1.0;
  double base = 0.0;

  [[nodiscard]] std::size_t last() const noexcept { return x.size() - 1; }
  [[nodiscard]] double at(std::size_t i) const noexcept { return x[i] - base; }
  [[nodiscard]] double step_value(std::size_t k) const noexcept { return x[k] - x[k - 1]; }
  [[nodiscard]] double horizon() const noexcept { return h * static_cast<double>(last()); }
  [[nodiscard]] double time(std::size_t i) const noexcept { return h * static_cast<double>(i); }
  /// Index of time t rounded to the grid (t may exceed the horizon).
  [[nodiscard]] std::size_t index(double t) const;

  /// The adapted view on [0, time(k)].
  [[nodiscard]] SampledView prefix(std::size_t k) const { return {x.first(k + 1), h, base}; }
  /// The increment path after index k.
  [[nodiscard]] SampledView increments(std::size_t k) const { return {x.subspan(k), h, x[k]}; }
};

SampledView view_of(const SequencePath& walk);
SampledView view_of(const GridPath& path);
// A view must not outlive its path.
SampledView view_of(SequencePath&&) = delete;
SampledView view_of(GridPath&&) = delete;

enum class Cmp { lt, le, eq, ne, ge, gt };

bool compare(double lhs, Cmp op, double rhs, double tol = 0.0);
std::string to_string(Cmp op);
Cmp parse_cmp(const std::string& text);

// Past events ------------------------------------------------------------------

/// Adapted event family n -> F_n (or t -> F_t), evaluated on the path
/// truncated to [0, t].
struct EventSpec {
  enum class Kind {
    always,
    never,
    all_of,
    any_of,
    negate,
    steps_all_equal,  ///< Y_1 = ... = Y_n = a
    last_step_eq,     ///< Y_n = a (false at n = 0)
    value_cmp,        ///< X_t op a
    sup_cmp,          ///< sup_{[0,t]} X op a
    at_sup,           ///< X_t = sup_{[0,t]} X
    drawdown_cmp,     ///< sup_{[0,t]} X - X_t op a
    time_cmp,         ///< t op a
    jump_count_cmp,   ///< number of jumps in (0, t] op a
  };

  Kind kind = Kind::always;
  Cmp op = Cmp::eq;
  double a = 0.0;
  std::vector<EventSpec> args;

  static EventSpec always() { return {}; }
  static EventSpec never() { return {Kind::never, Cmp::eq, 0.0, {}}; }
  static EventSpec all_of(std::vector<EventSpec> xs) { return {Kind::all_of, Cmp::eq, 0.0, std::move(xs)}; }
  static EventSpec any_of(std::vector<EventSpec> xs) { return {Kind::any_of, Cmp::eq, 0.0, std::move(xs)}; }
  static EventSpec negate(EventSpec x) { return {Kind::negate, Cmp::eq, 0.0, {std::move(x)}}; }
  static EventSpec steps_all_equal(double v) { return {Kind::steps_all_equal, Cmp::eq, v, {}}; }
  static EventSpec last_step_eq(double v) { return {Kind::last_step_eq, Cmp::eq, v, {}}; }
  static EventSpec value_cmp(Cmp op, double c) { return {Kind::value_cmp, op, c, {}}; }
  static EventSpec sup_cmp(Cmp op, double c) { return {Kind::sup_cmp, op, c, {}}; }
  static EventSpec at_sup() { return {Kind::at_sup, Cmp::eq, 0.0, {}}; }
  static EventSpec drawdown_cmp(Cmp op, double c) { return {Kind::drawdown_cmp, op, c, {}}; }
  static EventSpec time_cmp(Cmp op, double c) { return {Kind::time_cmp, op, c, {}}; }
  static EventSpec jump_count_cmp(Cmp op, double k) { return {Kind::jump_count_cmp, op, k, {}}; }
};

/// `past` is the path truncated at the evaluation time (its last point).
bool evaluate(const EventSpec& event, const SampledView& past, const Tolerance& tol = {});
bool evaluate(const EventSpec& event, const EventPath& past, const Tolerance& tol = {});

// Path events ------------------------------------------------------------------

/// Event on an increment path (starting at 0), possibly tail dependent.
struct PathEvent {
  enum class Kind {
    whole,
    empty,
    all_of,
    any_of,
    negate,
    step_eq,               ///< k-th step equals a (k = index)
    stays_below,           ///< value < a at every time in [from, to]; to = inf is tail dependent
    never_reaches,         ///< value < a forever (tail dependent)
    value_at_cmp,          ///< value at time u op a
    unit_drift_then_jump,  ///< no jump before a/drift, a jump exactly at a/drift
    first_jump_size_in,    ///< first jump size in (a, b)
    no_jump_before,        ///< no jump in (0, u)
  };

  Kind kind = Kind::whole;
  Cmp op = Cmp::eq;
  double a = 0.0;
  double b = 0.0;
  double from = 0.0;
  double to = kInf;
  std::size_t k = 1;
  std::vector<PathEvent> args;

  static PathEvent whole() { return {}; }
  static PathEvent empty() {
    PathEvent e;
    e.kind = Kind::empty;
    return e;
  }
  static PathEvent all_of(std::vector<PathEvent> xs);
  static PathEvent any_of(std::vector<PathEvent> xs);
  static PathEvent negate(PathEvent x);
  static PathEvent step_eq(std::size_t k, double v);
  static PathEvent stays_below(double level, double from, double to = kInf);
  static PathEvent never_reaches(double level);
  static PathEvent value_at_cmp(double u, Cmp op, double c);
  static PathEvent unit_drift_then_jump(double units = 1.0);
  static PathEvent first_jump_size_in(double lo, double hi);
  static PathEvent no_jump_before(double u);

  /// True when a truncated path may leave the event undecided for ever
  /// (the decision depends on the unobserved tail).
  [[nodiscard]] bool tail_dependent() const;
};

Truth evaluate(const PathEvent& event, const SampledView& increments, const TailRule& tail = {},
               const Tolerance& tol = {});
Truth evaluate(const PathEvent& event, const EventPath& increments, const TailRule& tail = {},
               const Tolerance& tol = {});

// Statistics -------------------------------------------------------------------

/// Adapted statistic Z evaluated on the path truncated at R.
struct PastStatistic {
  enum class Kind {
    time,
    value,
    running_sup,
    running_inf,
    drawdown,
    jump_count,
    last_step,
    count_steps_eq,  ///< number of steps equal to a
    time_since_sup,
    value_at_lag,    ///< X_{t - a}, or X_0 when a exceeds t
    last_jump_size,  ///< 0 without jumps
    indicator,       ///< 1 when the event holds
    constant,
  };

  Kind kind = Kind::time;
  double a = 0.0;
  std::vector<EventSpec> event;  // one entry for indicator

  static PastStatistic of(Kind kind, double a = 0.0) { return {kind, a, {}}; }
  static PastStatistic indicator(EventSpec e) { return {Kind::indicator, 0.0, {std::move(e)}}; }

  [[nodiscard]] std::string name() const;
};

double evaluate(const PastStatistic& z, const SampledView& past, const Tolerance& tol = {});
double evaluate(const PastStatistic& z, const EventPath& past, const Tolerance& tol = {});

/// Nonnegative or real functional H of an increment path.
struct FutureFunctional {
  enum class Kind {
    step,             ///< k-th step
    increment_at,     ///< value at time u
    sup_over,         ///< sup over [0, u]
    inf_over,         ///< inf over [0, u]
    indicator,        ///< 1 on the path event
    first_jump_time,  ///< min(first jump time, u)
    first_jump_size,  ///< 0 without a jump before the horizon
    jump_count,       ///< number of jumps in (0, u]
    constant,
  };

  Kind kind = Kind::constant;
  double u = 0.0;
  std::size_t k = 1;
  std::vector<PathEvent> event;  // one entry for indicator

  static FutureFunctional step(std::size_t k) { return {Kind::step, 0.0, k, {}}; }
  static FutureFunctional of(Kind kind, double u) { return {kind, u, 1, {}}; }
  static FutureFunctional constant(double c) { return {Kind::constant, c, 1, {}}; }
  static FutureFunctional indicator(PathEvent e) { return {Kind::indicator, 0.0, 1, {std::move(e)}}; }

  [[nodiscard]] std::string name() const;
  /// Time span of the increment path the functional reads (inf when it may read the tail).
  [[nodiscard]] double lookahead() const;
};

/// nullopt when the increment path is too short to decide the value.
std::optional<double> evaluate(const FutureFunctional& h, const SampledView& increments,
                               const TailRule& tail = {}, const Tolerance& tol = {});
std::optional<double> evaluate(const FutureFunctional& h, const EventPath& increments,
                               const TailRule& tail = {}, const Tolerance& tol = {});

// Serialization ----------------------------------------------------------------

void to_json(nlohmann::json& j, const EventSpec& e);
void to_json(nlohmann::json& j, const PathEvent& e);
void to_json(nlohmann::json& j, const PastStatistic& z);
void to_json(nlohmann::json& j, const FutureFunctional& h);

}  // namespace indtime

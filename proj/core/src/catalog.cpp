#include "indtime/catalog.hpp"

#include <algorithm>
#include <sstream>

namespace indtime {

namespace {

TimeSpec first_zero_minus_one() {
  return TimeSpec::char_time(EventSpec::steps_all_equal(1.0), PathEvent::step_eq(1, 0.0), 10.0);
}

TimeSpec windowed_last_supremum() {
  LastSupSpec s;
  s.variant = LastSupSpec::Variant::discrete;
  s.window = 7;
  s.max_time = 7.0;
  return TimeSpec::last_supremum(s);
}

TimeSpec delta_l_hitting_thin() {
  ThinTimeSpec t;
  t.components.push_back({StoppingSpec::deterministic(0.0), EventSpec::always()});
  t.ladder = LadderDrawdownFamily{1.0, EventSpec::sup_cmp(Cmp::ge, 1.0)};
  t.future = PathEvent::never_reaches(1.0);
  return TimeSpec::thin_time(std::move(t));
}

TimeSpec unit_drift_then_jump_strict() {
  IfTimeSpec s;
  s.functional = IncrementalFunctional::unit_drift_then_jump(1.0);
  s.optional = EventSpec::all_of({EventSpec::jump_count_cmp(Cmp::eq, 1.0), EventSpec::value_cmp(Cmp::ge, 0.0)});
  s.max_time = 25.0;
  return TimeSpec::if_time_of(std::move(s));
}

struct Example {
  const char* name;
  const char* summary;
  TimeSpec (*make)();
};

const Example kExamples[] = {
    {"delta-l-hitting", "thin time: 0 if X never reaches 1, else first drawdown of 1 after the global maximum",
     delta_l_hitting_thin},
    {"first-passage-below-one", "first time X <= -1",
     [] { return TimeSpec::first_passage(-1.0, false); }},
    {"first-zero-minus-one", "char-time: steps 1..n all equal 1 and step n+1 equals 0, n <= 10",
     first_zero_minus_one},
    {"unit-drift-strict-time", "strict time: the unit-drift-then-jump atom seen while exactly one jump has occurred",
     unit_drift_then_jump_strict},
    {"windowed-last-supremum", "discrete last supremum, clauses checked over 7 steps, n <= 7",
     windowed_last_supremum},
};

}  // namespace

std::vector<CatalogEntry> catalog_entries() {
  std::vector<CatalogEntry> out = {
      {"engine", "iid", "i.i.d. values Y_1..Y_L, seen as the walk of partial sums"},
      {"engine", "random-walk", "walk X_n = Y_1 + ... + Y_n"},
      {"engine", "bm-drift", "Brownian motion with drift on a uniform grid"},
      {"engine", "compound-poisson", "compound Poisson process, exact jump times"},
      {"engine", "drift-minus-cp", "linear drift minus a compound Poisson subordinator"},
      {"law", "bernoulli", "values 0 and 1"},
      {"law", "finite", "finite support with explicit probabilities"},
      {"law", "gaussian", "normal law"},
      {"law", "constant", "a single value"},
      {"law", "exponential", "exponential law (jump sizes)"},
      {"past-event", "always", "every path"},
      {"past-event", "never", "no path"},
      {"past-event", "all-of", "intersection"},
      {"past-event", "any-of", "union"},
      {"past-event", "not", "complement"},
      {"past-event", "steps-all-equal", "Y_1 = ... = Y_n = value"},
      {"past-event", "last-step-eq", "Y_n = value"},
      {"past-event", "value", "X_t compared with a value"},
      {"past-event", "running-sup", "running supremum compared with a value"},
      {"past-event", "at-sup", "X_t equals its running supremum"},
      {"past-event", "drawdown", "running supremum minus X_t compared with a value"},
      {"past-event", "time", "t compared with a value"},
      {"past-event", "jump-count", "number of jumps in (0, t] compared with a value"},
      {"path-event", "whole", "every increment path"},
      {"path-event", "empty", "no increment path"},
      {"path-event", "step-eq", "k-th step equals a value"},
      {"path-event", "stays-below", "stays below a level over a time window"},
      {"path-event", "never-reaches", "never reaches a level (tail dependent)"},
      {"path-event", "value-at", "value at a time compared with a value"},
      {"path-event", "unit-drift-then-jump", "drifts the given units without jumping, then jumps"},
      {"path-event", "first-jump-size-in", "first jump size in (low, high)"},
      {"path-event", "no-jump-before", "no jump before a time"},
      {"statistic", "time", "R"},
      {"statistic", "value", "X_R"},
      {"statistic", "running-sup", "running supremum at R"},
      {"statistic", "running-inf", "running infimum at R"},
      {"statistic", "drawdown", "running supremum minus X_R"},
      {"statistic", "jump-count", "jumps in (0, R]"},
      {"statistic", "last-step", "Y_R"},
      {"statistic", "count-steps-eq", "number of steps equal to a value up to R"},
      {"statistic", "time-since-sup", "R minus the last time at the running supremum"},
      {"statistic", "value-at-lag", "X at R minus a lag"},
      {"statistic", "last-jump-size", "size of the last jump before R"},
      {"statistic", "indicator", "indicator of a past event at R"},
      {"statistic", "constant", "a constant"},
      {"functional", "step", "k-th step after R"},
      {"functional", "increment-at", "increment over u time units"},
      {"functional", "sup-over", "supremum of the increment path over [0, u]"},
      {"functional", "inf-over", "infimum of the increment path over [0, u]"},
      {"functional", "indicator", "indicator of a path event"},
      {"functional", "first-jump-time", "first jump time, capped"},
      {"functional", "first-jump-size", "first jump size"},
      {"functional", "jump-count", "jumps of the increment path in (0, u]"},
      {"functional", "constant", "a constant"},
      {"increasing", "lebesgue", "A_t = t"},
      {"increasing", "unit-drift-then-jump", "unit atoms where the increment path drifts then jumps"},
      {"increasing", "eps-excursion", "unit atoms at excursions reaching eps"},
      {"increasing", "weighted", "integral of a functional against a base"},
      {"increasing", "stopped", "base stopped at a terminal time"},
      {"terminal", "infinite", "never stops"},
      {"terminal", "zero", "stops at once"},
      {"terminal", "exponential", "independent exponential time"},
      {"terminal", "jump-pattern", "first jump with size in (low, high)"},
      {"terminal", "min-with-exponential", "minimum of a terminal time and an exponential time"},
      {"time", "deterministic", "a fixed time"},
      {"time", "first-passage", "first time X crosses a level"},
      {"time", "char-time", "R = n when F_n holds and the increment path lies in G"},
      {"time", "thin-time", "stopping times S_i with past events and a common increment event"},
      {"time", "if-time", "single atom of an optional set times an increasing functional"},
      {"time", "last-supremum", "last time at the supremum and its variants"},
      {"time", "restriction", "a time restricted to an optional set or an increment event"},
  };
  for (const auto& e : kExamples) out.push_back({"example", e.name, e.summary});
  for (const auto& s : bundled_scenarios()) out.push_back({"scenario", s, "bundled scenario file"});
  std::sort(out.begin(), out.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
    return a.category != b.category ? a.category < b.category : a.name < b.name;
  });
  return out;
}

std::string list_catalog(const std::string& filter) {
  std::ostringstream os;
  for (const auto& e : catalog_entries()) {
    if (!filter.empty() && e.name.find(filter) == std::string::npos) continue;
    os << e.category << '\t' << e.name << '\t' << e.summary << '\n';
  }
  return os.str();
}

const std::vector<std::string>& bundled_scenarios() {
  static const std::vector<std::string> names = {
      "bernoulli-first-zero",       "bernoulli-restricted-increment", "bernoulli-restricted-optional",
      "bm-delta-l-hitting",         "bm-first-passage",               "counterexample-walk",
      "drift-jump-strict-time",     "exponential-if-identity",        "walk-first-passage",
  };
  return names;
}

std::optional<TimeSpec> example_time(const std::string& name) {
  for (const auto& e : kExamples) {
    if (name == e.name) {
      TimeSpec t = e.make();
      t.example = name;
      return t;
    }
  }
  return std::nullopt;
}

std::vector<std::string> example_time_names() {
  std::vector<std::string> out;
  for (const auto& e : kExamples) out.emplace_back(e.name);
  return out;
}

}  // namespace indtime

#include "indtime/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace indtime {

// Truth ------------------------------------------------------------------------

Truth operator&&(Truth a, Truth b) {
  if (a.is_no() && b.is_no()) return Truth::no(a.assumed && b.assumed);
  if (a.is_no()) return a;
  if (b.is_no()) return b;
  if (a.is_undecided() || b.is_undecided()) return Truth::undecided();
  return Truth::yes(a.assumed || b.assumed);
}

Truth operator||(Truth a, Truth b) {
  if (a.is_yes() && b.is_yes()) return Truth::yes(a.assumed && b.assumed);
  if (a.is_yes()) return a;
  if (b.is_yes()) return b;
  if (a.is_undecided() || b.is_undecided()) return Truth::undecided();
  return Truth::no(a.assumed || b.assumed);
}

Truth operator!(Truth a) {
  if (a.is_undecided()) return a;
  return a.is_yes() ? Truth::no(a.assumed) : Truth::yes(a.assumed);
}

// Views and comparisons --------------------------------------------------------

std::size_t SampledView::index(double t) const {
  if (t < 0.0) throw std::out_of_range("negative time");
  const double k = std::round(t / h);
  if (std::abs(t / h - k) > 1e-7) throw std::invalid_argument("time is off the grid");
  return static_cast<std::size_t>(k);
}

SampledView view_of(const SequencePath& walk) {
  if (walk.role() != SequenceRole::walk) throw std::invalid_argument("view_of needs a walk");
  return {walk.data(), 1.0, 0.0};
}

SampledView view_of(const GridPath& path) { return {path.values(), path.step(), 0.0}; }

bool compare(double lhs, Cmp op, double rhs, double tol) {
  switch (op) {
    case Cmp::lt:
      return lhs < rhs - tol;
    case Cmp::le:
      return lhs <= rhs + tol;
    case Cmp::eq:
      return std::abs(lhs - rhs) <= tol;
    case Cmp::ne:
      return std::abs(lhs - rhs) > tol;
    case Cmp::ge:
      return lhs >= rhs - tol;
    case Cmp::gt:
      return lhs > rhs + tol;
  }
  return false;
}

std::string to_string(Cmp op) {
  switch (op) {
    case Cmp::lt:
      return "<";
    case Cmp::le:
      return "<=";
    case Cmp::eq:
      return "==";
    case Cmp::ne:
      return "!=";
    case Cmp::ge:
      return ">=";
    case Cmp::gt:
      return ">";
  }
  return "?";
}

Cmp parse_cmp(const std::string& text) {
  if (text == "<" || text == "lt") return Cmp::lt;
  if (text == "<=" || text == "le") return Cmp::le;
  if (text == "==" || text == "=" || text == "eq") return Cmp::eq;
  if (text == "!=" || text == "ne") return Cmp::ne;
  if (text == ">=" || text == "ge") return Cmp::ge;
  if (text == ">" || text == "gt") return Cmp::gt;
  throw std::invalid_argument("unknown comparison '" + text + "'");
}

namespace {

double max_of(const SampledView& v, std::size_t from, std::size_t to) {
  double m = v.at(from);
  for (std::size_t i = from + 1; i <= to; ++i) m = std::max(m, v.at(i));
  return m;
}

double min_of(const SampledView& v, std::size_t from, std::size_t to) {
  double m = v.at(from);
  for (std::size_t i = from + 1; i <= to; ++i) m = std::min(m, v.at(i));
  return m;
}

// Supremum or infimum of an event path over [a, b]; left limits count.
double extreme(const EventPath& p, double a, double b, bool maximum) {
  double m = p.value(a);
  auto take = [&](double v) { m = maximum ? std::max(m, v) : std::min(m, v); };
  take(p.left_limit(b));
  take(p.value(b));
  for (std::size_t i = p.jumps_until(a); i < p.jump_count() && p.jump_times()[i] <= b; ++i) {
    take(p.left_limit(p.jump_times()[i]));
    take(p.value(p.jump_times()[i]));
  }
  return m;
}

// Latest time at which the event path attains (or approaches) its supremum on [0, horizon].
double last_sup_time(const EventPath& p, double tol) {
  const double sup = extreme(p, 0.0, p.horizon(), true);
  double last = 0.0;
  if (p.value(p.horizon()) >= sup - tol) return p.horizon();
  for (std::size_t i = 0; i < p.jump_count(); ++i) {
    const double t = p.jump_times()[i];
    if (p.left_limit(t) >= sup - tol || p.value(t) >= sup - tol) last = t;
  }
  return last;
}

std::size_t first_index_at_or_after(const SampledView& v, double t) {
  const double k = std::ceil(t / v.h - 1e-9);
  return k <= 0.0 ? 0 : static_cast<std::size_t>(k);
}

std::size_t last_index_at_or_before(double t, double h) {
  return static_cast<std::size_t>(std::floor(t / h + 1e-9));
}

// Resolution of "stays below level for ever" once the observed part stayed below.
Truth tail_below(double level, double final_value, const TailRule& tail) {
  if (tail.drift < 0.0) {
    if (level - final_value >= tail.margin) return Truth::yes(true);
    return Truth::undecided();
  }
  if (std::isnan(tail.drift)) return Truth::undecided();
  return Truth::no(true);
}

[[noreturn]] void needs_events(const char* what) {
  throw std::invalid_argument(std::string(what) + " needs an event path");
}

[[noreturn]] void needs_sampled(const char* what) {
  throw std::invalid_argument(std::string(what) + " needs a walk or grid path");
}

}  // namespace

// EventSpec --------------------------------------------------------------------

bool evaluate(const EventSpec& e, const SampledView& past, const Tolerance& tol) {
  using K = EventSpec::Kind;
  const std::size_t n = past.last();
  switch (e.kind) {
    case K::always:
      return true;
    case K::never:
      return false;
    case K::all_of:
      return std::all_of(e.args.begin(), e.args.end(),
                         [&](const EventSpec& x) { return evaluate(x, past, tol); });
    case K::any_of:
      return std::any_of(e.args.begin(), e.args.end(),
                         [&](const EventSpec& x) { return evaluate(x, past, tol); });
    case K::negate:
      return !evaluate(e.args.at(0), past, tol);
    case K::steps_all_equal:
      for (std::size_t k = 1; k <= n; ++k)
        if (!compare(past.step_value(k), Cmp::eq, e.a, tol.value)) return false;
      return true;
    case K::last_step_eq:
      return n >= 1 && compare(past.step_value(n), Cmp::eq, e.a, tol.value);
    case K::value_cmp:
      return compare(past.at(n), e.op, e.a, tol.value);
    case K::sup_cmp:
      return compare(max_of(past, 0, n), e.op, e.a, tol.value);
    case K::at_sup:
      return past.at(n) >= max_of(past, 0, n) - tol.value;
    case K::drawdown_cmp:
      return compare(max_of(past, 0, n) - past.at(n), e.op, e.a, tol.value);
    case K::time_cmp:
      return compare(past.time(n), e.op, e.a, tol.time);
    case K::jump_count_cmp:
      needs_events("jump-count");
  }
  return false;
}

bool evaluate(const EventSpec& e, const EventPath& past, const Tolerance& tol) {
  using K = EventSpec::Kind;
  const double t = past.horizon();
  switch (e.kind) {
    case K::always:
      return true;
    case K::never:
      return false;
    case K::all_of:
      return std::all_of(e.args.begin(), e.args.end(),
                         [&](const EventSpec& x) { return evaluate(x, past, tol); });
    case K::any_of:
      return std::any_of(e.args.begin(), e.args.end(),
                         [&](const EventSpec& x) { return evaluate(x, past, tol); });
    case K::negate:
      return !evaluate(e.args.at(0), past, tol);
    case K::steps_all_equal:
    case K::last_step_eq:
      needs_sampled("step predicates");
    case K::value_cmp:
      return compare(past.value(t), e.op, e.a, tol.value);
    case K::sup_cmp:
      return compare(extreme(past, 0.0, t, true), e.op, e.a, tol.value);
    case K::at_sup:
      return past.value(t) >= extreme(past, 0.0, t, true) - tol.value;
    case K::drawdown_cmp:
      return compare(extreme(past, 0.0, t, true) - past.value(t), e.op, e.a, tol.value);
    case K::time_cmp:
      return compare(t, e.op, e.a, tol.time);
    case K::jump_count_cmp:
      return compare(static_cast<double>(past.jump_count()), e.op, e.a, 0.0);
  }
  return false;
}

// PathEvent --------------------------------------------------------------------

PathEvent PathEvent::all_of(std::vector<PathEvent> xs) {
  PathEvent e;
  e.kind = Kind::all_of;
  e.args = std::move(xs);
  return e;
}

PathEvent PathEvent::any_of(std::vector<PathEvent> xs) {
  PathEvent e;
  e.kind = Kind::any_of;
  e.args = std::move(xs);
  return e;
}

PathEvent PathEvent::negate(PathEvent x) {
  PathEvent e;
  e.kind = Kind::negate;
  e.args.push_back(std::move(x));
  return e;
}

PathEvent PathEvent::step_eq(std::size_t k, double v) {
  if (k < 1) throw std::invalid_argument("step index starts at 1");
  PathEvent e;
  e.kind = Kind::step_eq;
  e.k = k;
  e.a = v;
  return e;
}

PathEvent PathEvent::stays_below(double level, double from, double to) {
  if (!(from >= 0.0) || !(to >= from)) throw std::invalid_argument("stays-below needs 0 <= from <= to");
  PathEvent e;
  e.kind = Kind::stays_below;
  e.a = level;
  e.from = from;
  e.to = to;
  return e;
}

PathEvent PathEvent::never_reaches(double level) {
  PathEvent e;
  e.kind = Kind::never_reaches;
  e.a = level;
  return e;
}

PathEvent PathEvent::value_at_cmp(double u, Cmp op, double c) {
  if (!(u >= 0.0)) throw std::invalid_argument("value-at needs u >= 0");
  PathEvent e;
  e.kind = Kind::value_at_cmp;
  e.from = u;
  e.op = op;
  e.a = c;
  return e;
}

PathEvent PathEvent::unit_drift_then_jump(double units) {
  if (!(units > 0.0)) throw std::invalid_argument("unit-drift-then-jump needs units > 0");
  PathEvent e;
  e.kind = Kind::unit_drift_then_jump;
  e.a = units;
  return e;
}

PathEvent PathEvent::first_jump_size_in(double lo, double hi) {
  PathEvent e;
  e.kind = Kind::first_jump_size_in;
  e.a = lo;
  e.b = hi;
  return e;
}

PathEvent PathEvent::no_jump_before(double u) {
  PathEvent e;
  e.kind = Kind::no_jump_before;
  e.from = u;
  return e;
}

bool PathEvent::tail_dependent() const {
  switch (kind) {
    case Kind::never_reaches:
      return true;
    case Kind::stays_below:
      return std::isinf(to);
    case Kind::all_of:
    case Kind::any_of:
    case Kind::negate:
      return std::any_of(args.begin(), args.end(), [](const PathEvent& x) { return x.tail_dependent(); });
    default:
      return false;
  }
}

namespace {

template <class View>
Truth combine(const PathEvent& e, const View& v, const TailRule& tail, const Tolerance& tol) {
  using K = PathEvent::Kind;
  if (e.kind == K::negate) return !evaluate(e.args.at(0), v, tail, tol);
  Truth acc = e.kind == K::all_of ? Truth::yes() : Truth::no();
  for (const auto& x : e.args) {
    const Truth t = evaluate(x, v, tail, tol);
    acc = e.kind == K::all_of ? (acc && t) : (acc || t);
    if ((e.kind == K::all_of && acc.is_no() && !acc.assumed) ||
        (e.kind == K::any_of && acc.is_yes() && !acc.assumed))
      break;
  }
  return acc;
}

}  // namespace

Truth evaluate(const PathEvent& e, const SampledView& v, const TailRule& tail, const Tolerance& tol) {
  using K = PathEvent::Kind;
  const std::size_t last = v.last();
  switch (e.kind) {
    case K::whole:
      return Truth::yes();
    case K::empty:
      return Truth::no();
    case K::all_of:
    case K::any_of:
    case K::negate:
      return combine(e, v, tail, tol);
    case K::step_eq:
      if (e.k > last) return Truth::undecided();
      return Truth::of(compare(v.step_value(e.k), Cmp::eq, e.a, tol.value));
    case K::stays_below:
    case K::never_reaches: {
      const double from = e.kind == K::never_reaches ? 0.0 : e.from;
      const double to = e.kind == K::never_reaches ? kInf : e.to;
      const std::size_t i0 = first_index_at_or_after(v, from);
      const std::size_t i1 = std::isinf(to) ? last : std::min(last, last_index_at_or_before(to, v.h));
      for (std::size_t i = i0; i <= i1 && i <= last; ++i)
        if (!(v.at(i) < e.a - tol.value)) return Truth::no();
      if (!std::isinf(to) && last_index_at_or_before(to, v.h) <= last) return Truth::yes();
      if (!std::isinf(to)) return Truth::undecided();
      return tail_below(e.a, v.at(last), tail);
    }
    case K::value_at_cmp: {
      const std::size_t i = v.index(e.from);
      if (i > last) return Truth::undecided();
      return Truth::of(compare(v.at(i), e.op, e.a, tol.value));
    }
    case K::unit_drift_then_jump:
    case K::first_jump_size_in:
    case K::no_jump_before:
      needs_events("jump predicates");
  }
  return Truth::undecided();
}

Truth evaluate(const PathEvent& e, const EventPath& p, const TailRule& tail, const Tolerance& tol) {
  using K = PathEvent::Kind;
  const double horizon = p.horizon();
  const double s = p.start();
  switch (e.kind) {
    case K::whole:
      return Truth::yes();
    case K::empty:
      return Truth::no();
    case K::all_of:
    case K::any_of:
    case K::negate:
      return combine(e, p, tail, tol);
    case K::step_eq:
      needs_sampled("step-eq");
    case K::stays_below:
    case K::never_reaches: {
      const double from = e.kind == K::never_reaches ? 0.0 : e.from;
      const double to = e.kind == K::never_reaches ? kInf : e.to;
      if (from <= horizon) {
        const double b = std::min(to, horizon);
        if (!(extreme(p, from, b, true) - s < e.a - tol.value)) return Truth::no();
      }
      if (!std::isinf(to) && to <= horizon) return Truth::yes();
      if (!std::isinf(to)) return Truth::undecided();
      return tail_below(e.a, p.value(horizon) - s, tail);
    }
    case K::value_at_cmp:
      if (e.from > horizon + tol.time) return Truth::undecided();
      return Truth::of(compare(p.value(std::min(e.from, horizon)) - s, e.op, e.a, tol.value));
    case K::unit_drift_then_jump: {
      if (!(p.drift() > 0.0)) return Truth::no();
      const double u = e.a / p.drift();
      if (p.jump_count() > 0) {
        const double t1 = p.jump_times()[0];
        return Truth::of(std::abs(t1 - u) <= tol.time * std::max(1.0, u));
      }
      return horizon > u + tol.time ? Truth::no() : Truth::undecided();
    }
    case K::first_jump_size_in:
      if (p.jump_count() == 0) return Truth::undecided();
      return Truth::of(p.jump_sizes()[0] > e.a && p.jump_sizes()[0] < e.b);
    case K::no_jump_before:
      if (p.jump_count() > 0 && p.jump_times()[0] < e.from) return Truth::no();
      return horizon >= e.from ? Truth::yes() : Truth::undecided();
  }
  return Truth::undecided();
}

// PastStatistic ----------------------------------------------------------------

std::string PastStatistic::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::time:
      return "time";
    case Kind::value:
      return "value";
    case Kind::running_sup:
      return "running-sup";
    case Kind::running_inf:
      return "running-inf";
    case Kind::drawdown:
      return "drawdown";
    case Kind::jump_count:
      return "jump-count";
    case Kind::last_step:
      return "last-step";
    case Kind::count_steps_eq:
      os << "count-steps-eq(" << a << ")";
      return os.str();
    case Kind::time_since_sup:
      return "time-since-sup";
    case Kind::value_at_lag:
      os << "value-at-lag(" << a << ")";
      return os.str();
    case Kind::last_jump_size:
      return "last-jump-size";
    case Kind::indicator:
      return "indicator";
    case Kind::constant:
      os << "constant(" << a << ")";
      return os.str();
  }
  return "?";
}

double evaluate(const PastStatistic& z, const SampledView& past, const Tolerance& tol) {
  using K = PastStatistic::Kind;
  const std::size_t n = past.last();
  switch (z.kind) {
    case K::time:
      return past.time(n);
    case K::value:
      return past.at(n);
    case K::running_sup:
      return max_of(past, 0, n);
    case K::running_inf:
      return min_of(past, 0, n);
    case K::drawdown:
      return max_of(past, 0, n) - past.at(n);
    case K::last_step:
      return n >= 1 ? past.step_value(n) : 0.0;
    case K::count_steps_eq: {
      double c = 0.0;
      for (std::size_t k = 1; k <= n; ++k)
        if (compare(past.step_value(k), Cmp::eq, z.a, tol.value)) c += 1.0;
      return c;
    }
    case K::time_since_sup: {
      const double m = max_of(past, 0, n);
      std::size_t i = n;
      while (past.at(i) < m - tol.value) --i;
      return past.time(n - i);
    }
    case K::value_at_lag: {
      const std::size_t lag = past.index(z.a);
      return past.at(lag >= n ? 0 : n - lag);
    }
    case K::indicator:
      return evaluate(z.event.at(0), past, tol) ? 1.0 : 0.0;
    case K::constant:
      return z.a;
    case K::jump_count:
    case K::last_jump_size:
      needs_events("jump statistics");
  }
  return 0.0;
}

double evaluate(const PastStatistic& z, const EventPath& past, const Tolerance& tol) {
  using K = PastStatistic::Kind;
  const double t = past.horizon();
  switch (z.kind) {
    case K::time:
      return t;
    case K::value:
      return past.value(t);
    case K::running_sup:
      return extreme(past, 0.0, t, true);
    case K::running_inf:
      return extreme(past, 0.0, t, false);
    case K::drawdown:
      return extreme(past, 0.0, t, true) - past.value(t);
    case K::jump_count:
      return static_cast<double>(past.jump_count());
    case K::time_since_sup:
      return t - last_sup_time(past, tol.value);
    case K::value_at_lag:
      return past.value(std::max(0.0, t - z.a));
    case K::last_jump_size:
      return past.jump_count() ? past.jump_sizes().back() : 0.0;
    case K::indicator:
      return evaluate(z.event.at(0), past, tol) ? 1.0 : 0.0;
    case K::constant:
      return z.a;
    case K::last_step:
    case K::count_steps_eq:
      needs_sampled("step statistics");
  }
  return 0.0;
}

// FutureFunctional -------------------------------------------------------------

std::string FutureFunctional::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::step:
      os << "step(" << k << ")";
      break;
    case Kind::increment_at:
      os << "increment-at(" << u << ")";
      break;
    case Kind::sup_over:
      os << "sup-over(" << u << ")";
      break;
    case Kind::inf_over:
      os << "inf-over(" << u << ")";
      break;
    case Kind::indicator:
      os << "indicator";
      break;
    case Kind::first_jump_time:
      os << "first-jump-time(" << u << ")";
      break;
    case Kind::first_jump_size:
      os << "first-jump-size";
      break;
    case Kind::jump_count:
      os << "jump-count(" << u << ")";
      break;
    case Kind::constant:
      os << "constant(" << u << ")";
      break;
  }
  return os.str();
}

double FutureFunctional::lookahead() const {
  switch (kind) {
    case Kind::step:
      return static_cast<double>(k);
    case Kind::increment_at:
    case Kind::sup_over:
    case Kind::inf_over:
    case Kind::first_jump_time:
    case Kind::jump_count:
      return u;
    case Kind::constant:
      return 0.0;
    case Kind::indicator:
    case Kind::first_jump_size:
      return kInf;
  }
  return kInf;
}

std::optional<double> evaluate(const FutureFunctional& h, const SampledView& v, const TailRule& tail,
                               const Tolerance& tol) {
  using K = FutureFunctional::Kind;
  const std::size_t last = v.last();
  switch (h.kind) {
    case K::step:
      if (h.k > last) return std::nullopt;
      return v.step_value(h.k);
    case K::increment_at: {
      const std::size_t i = v.index(h.u);
      if (i > last) return std::nullopt;
      return v.at(i);
    }
    case K::sup_over:
    case K::inf_over: {
      const std::size_t i = v.index(h.u);
      if (i > last) return std::nullopt;
      return h.kind == K::sup_over ? max_of(v, 0, i) : min_of(v, 0, i);
    }
    case K::indicator: {
      const Truth t = evaluate(h.event.at(0), v, tail, tol);
      if (t.is_undecided()) return std::nullopt;
      return t.is_yes() ? 1.0 : 0.0;
    }
    case K::constant:
      return h.u;
    case K::first_jump_time:
    case K::first_jump_size:
    case K::jump_count:
      needs_events("jump functionals");
  }
  return std::nullopt;
}

std::optional<double> evaluate(const FutureFunctional& h, const EventPath& p, const TailRule& tail,
                               const Tolerance& tol) {
  using K = FutureFunctional::Kind;
  const double horizon = p.horizon();
  const double s = p.start();
  switch (h.kind) {
    case K::step:
      needs_sampled("step");
    case K::increment_at:
      if (h.u > horizon + tol.time) return std::nullopt;
      return p.value(std::min(h.u, horizon)) - s;
    case K::sup_over:
    case K::inf_over:
      if (h.u > horizon + tol.time) return std::nullopt;
      return extreme(p, 0.0, std::min(h.u, horizon), h.kind == K::sup_over) - s;
    case K::indicator: {
      const Truth t = evaluate(h.event.at(0), p, tail, tol);
      if (t.is_undecided()) return std::nullopt;
      return t.is_yes() ? 1.0 : 0.0;
    }
    case K::first_jump_time:
      if (p.jump_count() > 0 && p.jump_times()[0] <= h.u) return p.jump_times()[0];
      if (horizon >= h.u) return h.u;
      return std::nullopt;
    case K::first_jump_size:
      if (p.jump_count() == 0) return std::nullopt;
      return p.jump_sizes()[0];
    case K::jump_count:
      if (h.u > horizon + tol.time) return std::nullopt;
      return static_cast<double>(p.jumps_until(h.u));
    case K::constant:
      return h.u;
  }
  return std::nullopt;
}

// Serialization ----------------------------------------------------------------

namespace {

const char* kind_name(EventSpec::Kind k) {
  using K = EventSpec::Kind;
  switch (k) {
    case K::always:
      return "always";
    case K::never:
      return "never";
    case K::all_of:
      return "all-of";
    case K::any_of:
      return "any-of";
    case K::negate:
      return "not";
    case K::steps_all_equal:
      return "steps-all-equal";
    case K::last_step_eq:
      return "last-step-eq";
    case K::value_cmp:
      return "value";
    case K::sup_cmp:
      return "running-sup";
    case K::at_sup:
      return "at-sup";
    case K::drawdown_cmp:
      return "drawdown";
    case K::time_cmp:
      return "time";
    case K::jump_count_cmp:
      return "jump-count";
  }
  return "?";
}

const char* kind_name(PathEvent::Kind k) {
  using K = PathEvent::Kind;
  switch (k) {
    case K::whole:
      return "whole";
    case K::empty:
      return "empty";
    case K::all_of:
      return "all-of";
    case K::any_of:
      return "any-of";
    case K::negate:
      return "not";
    case K::step_eq:
      return "step-eq";
    case K::stays_below:
      return "stays-below";
    case K::never_reaches:
      return "never-reaches";
    case K::value_at_cmp:
      return "value-at";
    case K::unit_drift_then_jump:
      return "unit-drift-then-jump";
    case K::first_jump_size_in:
      return "first-jump-size-in";
    case K::no_jump_before:
      return "no-jump-before";
  }
  return "?";
}

}  // namespace

void to_json(nlohmann::json& j, const EventSpec& e) {
  j = nlohmann::json{{"kind", kind_name(e.kind)}};
  using K = EventSpec::Kind;
  switch (e.kind) {
    case K::all_of:
    case K::any_of:
    case K::negate:
      j["args"] = e.args;
      break;
    case K::steps_all_equal:
    case K::last_step_eq:
      j["value"] = e.a;
      break;
    case K::value_cmp:
    case K::sup_cmp:
    case K::drawdown_cmp:
    case K::time_cmp:
    case K::jump_count_cmp:
      j["op"] = to_string(e.op);
      j["value"] = e.a;
      break;
    default:
      break;
  }
}

void to_json(nlohmann::json& j, const PathEvent& e) {
  j = nlohmann::json{{"kind", kind_name(e.kind)}};
  using K = PathEvent::Kind;
  switch (e.kind) {
    case K::all_of:
    case K::any_of:
    case K::negate:
      j["args"] = e.args;
      break;
    case K::step_eq:
      j["index"] = e.k;
      j["value"] = e.a;
      break;
    case K::stays_below:
      j["level"] = e.a;
      j["from"] = e.from;
      if (std::isinf(e.to))
        j["to"] = "inf";
      else
        j["to"] = e.to;
      break;
    case K::never_reaches:
      j["level"] = e.a;
      break;
    case K::value_at_cmp:
      j["time"] = e.from;
      j["op"] = to_string(e.op);
      j["value"] = e.a;
      break;
    case K::unit_drift_then_jump:
      j["units"] = e.a;
      break;
    case K::first_jump_size_in:
      j["low"] = e.a;
      j["high"] = e.b;
      break;
    case K::no_jump_before:
      j["time"] = e.from;
      break;
    default:
      break;
  }
}

void to_json(nlohmann::json& j, const PastStatistic& z) {
  j = nlohmann::json{{"kind", z.name()}};
  if (z.kind == PastStatistic::Kind::indicator) j["event"] = z.event.at(0);
}

void to_json(nlohmann::json& j, const FutureFunctional& h) {
  j = nlohmann::json{{"kind", h.name()}};
  if (h.kind == FutureFunctional::Kind::indicator) j["event"] = h.event.at(0);
}

}  // namespace indtime

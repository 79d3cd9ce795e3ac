#include "indtime/times.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace indtime {

// Constructors -----------------------------------------------------------------

TimeSpec TimeSpec::deterministic(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("deterministic time must be nonnegative");
  TimeSpec s;
  s.kind = Kind::deterministic;
  s.stopping = StoppingSpec::deterministic(t);
  return s;
}

TimeSpec TimeSpec::first_passage(double level, bool above) {
  TimeSpec s;
  s.kind = Kind::first_passage;
  s.stopping = StoppingSpec::first_passage(level, above);
  return s;
}

TimeSpec TimeSpec::char_time(EventSpec f, PathEvent g, double max_time) {
  return char_time(std::vector<CharClause>{{std::move(f), std::move(g)}}, max_time);
}

TimeSpec TimeSpec::char_time(std::vector<CharClause> clauses, double max_time) {
  if (clauses.empty()) throw std::invalid_argument("char-time needs at least one clause");
  TimeSpec s;
  s.kind = Kind::char_time;
  s.clauses = std::move(clauses);
  s.max_time = max_time;
  return s;
}

TimeSpec TimeSpec::thin_time(ThinTimeSpec spec) {
  if (spec.components.empty() && !spec.ladder) throw std::invalid_argument("thin time needs components");
  TimeSpec s;
  s.kind = Kind::thin_time;
  s.thin = std::move(spec);
  return s;
}

TimeSpec TimeSpec::if_time_of(IfTimeSpec spec) {
  TimeSpec s;
  s.kind = Kind::if_time;
  s.if_time.push_back(std::move(spec));
  return s;
}

TimeSpec TimeSpec::last_supremum(LastSupSpec spec) {
  if (!(spec.eps > 0.0) || !(spec.depth > 0.0)) throw std::invalid_argument("last-supremum needs eps, depth > 0");
  TimeSpec s;
  s.kind = Kind::last_sup;
  s.last_sup = spec;
  return s;
}

TimeSpec TimeSpec::restricted(TimeSpec inner, EventSpec optional_set) {
  TimeSpec s;
  s.kind = Kind::restriction;
  s.inner = std::make_shared<const TimeSpec>(std::move(inner));
  s.restrict_past = std::move(optional_set);
  return s;
}

TimeSpec TimeSpec::restricted(TimeSpec inner, PathEvent increment_event) {
  TimeSpec s;
  s.kind = Kind::restriction;
  s.inner = std::make_shared<const TimeSpec>(std::move(inner));
  s.restrict_future = std::move(increment_event);
  return s;
}

namespace {

TimeValue decided(double t, bool assumed) {
  return assumed ? TimeValue::tail_assumed(t) : TimeValue::finite(t);
}

std::string describe_time(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

}  // namespace

// Char-times -------------------------------------------------------------------

TimeValue eval_char_time(const std::vector<CharClause>& clauses, const SampledView& walk, double max_time,
                         const EvalOptions& opts) {
  const std::size_t last = walk.last();
  const bool covered = max_time <= walk.time(last);
  const std::size_t n_max =
      covered ? static_cast<std::size_t>(std::floor(max_time / walk.h + 1e-9)) : last;
  std::optional<std::size_t> fired;
  bool fired_assumed = false;
  bool undecided = false;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const SampledView past = walk.prefix(n);
    const SampledView future = walk.increments(n);
    Truth t = Truth::no();
    for (const auto& c : clauses) {
      if (!evaluate(c.past, past, opts.tol)) continue;
      t = t || evaluate(c.future, future, opts.tail, opts.tol);
      if (t.is_yes() && !t.assumed) break;
    }
    if (t.is_yes()) {
      if (fired)
        throw InvalidTimeConstruction("char-time fires at " + describe_time(walk.time(*fired)) + " and " +
                                      describe_time(walk.time(n)));
      fired = n;
      fired_assumed = t.assumed;
    } else if (t.is_undecided()) {
      undecided = true;
    }
  }
  if (fired) return decided(walk.time(*fired), fired_assumed);
  if (undecided || !covered) return TimeValue::undecided();
  return TimeValue::infinite();
}

TimeValue eval_char_time(const EventSpec& f, const PathEvent& g, const SequencePath& path,
                         const EvalOptions& opts) {
  const SequencePath walk = path.role() == SequenceRole::values ? path.cumulative() : path;
  return eval_char_time({{f, g}}, view_of(walk), kInf, opts);
}

// Last-supremum times ----------------------------------------------------------

std::vector<CharClause> last_sup_clauses(std::size_t window) {
  const double to = window == 0 ? kInf : static_cast<double>(window);
  CharClause nonzero{EventSpec::all_of({EventSpec::at_sup(), EventSpec::value_cmp(Cmp::ne, 0.0)}),
                     PathEvent::stays_below(0.0, 1.0, to)};
  std::vector<PathEvent> zero_future{PathEvent::step_eq(1, -1.0)};
  if (window == 0 || window >= 2) zero_future.push_back(PathEvent::stays_below(0.0, 2.0, to));
  CharClause zero{EventSpec::all_of({EventSpec::at_sup(), EventSpec::value_cmp(Cmp::eq, 0.0)}),
                  PathEvent::all_of(std::move(zero_future))};
  return {nonzero, zero};
}

namespace {

bool certified_below(double level, double final_value, const TailRule& tail) {
  return tail.drift < 0.0 && level - final_value >= tail.margin;
}

}  // namespace

TimeValue eval_last_sup_time(const LastSupSpec& spec, const SampledView& path, const EvalOptions& opts) {
  using V = LastSupSpec::Variant;
  if (spec.variant == V::discrete)
    return eval_char_time(last_sup_clauses(spec.window), path, spec.max_time, opts);

  const std::size_t last = path.last();
  const double tol = opts.tol.value;
  double m = path.at(0);
  for (std::size_t i = 1; i <= last; ++i) m = std::max(m, path.at(i));
  std::size_t i_max = last;
  while (path.at(i_max) < m - tol) --i_max;
  const double final_value = path.at(last);
  const bool max_settled = certified_below(m, final_value, opts.tail);
  if (opts.tail.drift >= 0.0 && spec.variant != V::r_eps) return TimeValue::infinite();

  switch (spec.variant) {
    case V::global:
      if (!max_settled) return TimeValue::undecided();
      return TimeValue::tail_assumed(path.time(i_max));
    case V::r_eps: {
      const double threshold = m - spec.eps;
      std::size_t r = last;
      while (path.at(r) < threshold - tol) --r;
      if (r == last) return TimeValue::finite(path.time(last));
      if (!certified_below(threshold, final_value, opts.tail)) return TimeValue::undecided();
      return TimeValue::tail_assumed(path.time(r));
    }
    case V::r_eps_before_max: {
      if (!max_settled) return TimeValue::undecided();
      for (std::size_t i = i_max + 1; i-- > 0;)
        if (path.at(i) <= m - spec.eps + tol) return TimeValue::tail_assumed(path.time(i));
      return TimeValue::infinite();
    }
    case V::delta_l_hitting: {
      if (m < spec.level - tol) {
        if (!certified_below(spec.level, final_value, opts.tail)) return TimeValue::undecided();
        return TimeValue::tail_assumed(0.0);
      }
      if (!max_settled) return TimeValue::undecided();
      for (std::size_t i = i_max + 1; i <= last; ++i)
        if (path.at(i) <= m - spec.depth + tol) return TimeValue::tail_assumed(path.time(i));
      return TimeValue::undecided();
    }
    case V::discrete:
      break;
  }
  return TimeValue::undecided();
}

TimeValue eval_last_sup_time(const LastSupSpec& spec, const EventPath& path, const EvalOptions& opts) {
  if (spec.variant != LastSupSpec::Variant::global)
    throw std::invalid_argument("only the global last-supremum variant is defined on event paths");
  if (opts.tail.drift >= 0.0) return TimeValue::infinite();
  const SupremumProfile sup = running_supremum(path);
  const double m = sup.value(path.horizon());
  if (!certified_below(m, path.value(path.horizon()), opts.tail)) return TimeValue::undecided();
  double t = 0.0;
  for (std::size_t i = 0; i < path.jump_count(); ++i) {
    const double tau = path.jump_times()[i];
    if (path.left_limit(tau) >= m - opts.tol.value || path.value(tau) >= m - opts.tol.value) t = tau;
  }
  if (path.start() >= m - opts.tol.value && t == 0.0) return TimeValue::tail_assumed(0.0);
  return TimeValue::tail_assumed(t);
}

// Thin times -------------------------------------------------------------------

std::vector<double> ladder_drawdown_times(const LadderDrawdownFamily& family, const SampledView& path,
                                          const EvalOptions& opts) {
  std::vector<double> out;
  double level = path.at(0);
  bool armed = true;
  for (std::size_t i = 1; i <= path.last(); ++i) {
    const double v = path.at(i);
    if (v > level + opts.tol.value) {
      level = v;
      armed = true;
      continue;
    }
    if (armed && level - v >= family.depth - opts.tol.value) {
      out.push_back(path.time(i));
      armed = false;
    }
  }
  return out;
}

namespace {

struct Firing {
  std::optional<double> time;
  bool assumed = false;
  bool undecided = false;

  void add(double t, Truth g) {
    if (g.is_undecided()) {
      undecided = true;
      return;
    }
    if (!g.is_yes()) return;
    if (time && std::abs(*time - t) > 1e-12)
      throw InvalidTimeConstruction("thin components fire at " + describe_time(*time) + " and " +
                                    describe_time(t));
    time = t;
    assumed = g.assumed;
  }

  [[nodiscard]] TimeValue result() const {
    if (time) return decided(*time, assumed);
    return undecided ? TimeValue::undecided() : TimeValue::infinite();
  }
};

}  // namespace

TimeValue eval_thin_time(const ThinTimeSpec& spec, const SampledView& path, const EvalOptions& opts) {
  Firing firing;
  auto consider = [&](double s, const EventSpec& past) {
    const std::size_t i = path.index(s);
    if (i > path.last()) return;
    if (!evaluate(past, path.prefix(i), opts.tol)) return;
    firing.add(path.time(i), evaluate(spec.future, path.increments(i), opts.tail, opts.tol));
  };
  for (const auto& c : spec.components) {
    const TimeValue s = eval_stopping_time(c.stopping, path);
    if (s.has_time()) consider(s.time(), c.past);
  }
  if (spec.ladder)
    for (double s : ladder_drawdown_times(*spec.ladder, path, opts)) consider(s, spec.ladder->past);
  return firing.result();
}

TimeValue eval_thin_time(const ThinTimeSpec& spec, const EventPath& path, const EvalOptions& opts) {
  if (spec.ladder) throw std::invalid_argument("ladder families need a walk or grid path");
  Firing firing;
  for (const auto& c : spec.components) {
    const TimeValue s = eval_stopping_time(c.stopping, path);
    if (!s.has_time() || s.time() > path.horizon()) continue;
    if (!evaluate(c.past, path.truncated(s.time()), opts.tol)) continue;
    firing.add(s.time(), evaluate(spec.future, delta_shift(path, s.time()), opts.tail, opts.tol));
  }
  return firing.result();
}

// If-times ---------------------------------------------------------------------

namespace {

bool optional_holds(const EventSpec& o, const Path& path, double t, const Tolerance& tol) {
  if (const auto* ev = std::get_if<EventPath>(&path)) return evaluate(o, ev->truncated(std::min(t, ev->horizon())), tol);
  const SampledView v = std::holds_alternative<GridPath>(path) ? view_of(std::get<GridPath>(path))
                                                               : view_of(std::get<SequencePath>(path));
  return evaluate(o, v.prefix(std::min(v.index(t), v.last())), tol);
}

}  // namespace

namespace {

// Latest time at which an optional set can hold, read off its structure.
double optional_bound(const EventSpec& e) {
  using K = EventSpec::Kind;
  switch (e.kind) {
    case K::never:
      return -kInf;
    case K::time_cmp:
      if (e.op == Cmp::lt || e.op == Cmp::le || e.op == Cmp::eq) return e.a;
      return kInf;
    case K::all_of: {
      double b = kInf;
      for (const auto& x : e.args) b = std::min(b, optional_bound(x));
      return b;
    }
    case K::any_of: {
      double b = -kInf;
      for (const auto& x : e.args) b = std::max(b, optional_bound(x));
      return b;
    }
    default:
      return kInf;
  }
}

}  // namespace

TimeValue eval_if_time(const IfTimeSpec& spec, const Path& path, Rng& terminal_rng, const EvalOptions& opts) {
  const double bound = optional_bound(spec.optional);
  if (bound < 0.0) return TimeValue::infinite();
  if (bound < spec.max_time) {
    IfTimeSpec narrowed = spec;
    narrowed.max_time = bound;
    return eval_if_time(narrowed, path, terminal_rng, opts);
  }
  const RealizedIF a = realize_if(spec.functional, path, terminal_rng, opts);
  if (a.terminal.is_undecided()) return TimeValue::undecided();
  for (const auto& s : a.segments) {
    if (s.rate <= 0.0 || s.begin > spec.max_time) continue;
    const double end = std::min(s.end, spec.max_time);
    for (double probe : {s.begin, 0.5 * (s.begin + end), end})
      if (optional_holds(spec.optional, path, probe, opts.tol))
        throw InvalidTimeConstruction("O.dA has non-atomic mass");
  }
  std::vector<RealizedIF::Atom> hits;
  for (const auto& atom : a.atoms)
    if (atom.time <= spec.max_time && optional_holds(spec.optional, path, atom.time, opts.tol))
      hits.push_back(atom);
  if (hits.size() > 1)
    throw InvalidTimeConstruction("O.dA has atoms at " + describe_time(hits[0].time) + " and " +
                                  describe_time(hits[1].time));
  if (hits.size() == 1) {
    if (std::abs(hits[0].mass - 1.0) > 1e-12)
      throw InvalidTimeConstruction("O.dA atom has mass " + describe_time(hits[0].mass));
    return TimeValue::finite(hits[0].time);
  }
  for (double u : a.undecided)
    if (u <= spec.max_time && optional_holds(spec.optional, path, u, opts.tol)) return TimeValue::undecided();
  if (a.decided_until < spec.max_time) return TimeValue::undecided();
  return TimeValue::infinite();
}

// Restriction ------------------------------------------------------------------

namespace {

SampledView view_or_throw(const Path& path, SequencePath& storage) {
  if (const auto* g = std::get_if<GridPath>(&path)) return view_of(*g);
  const auto& s = std::get<SequencePath>(path);
  if (s.role() == SequenceRole::walk) return view_of(s);
  storage = s.cumulative();
  return view_of(storage);
}

TimeValue restrict_sampled(TimeValue r, const EventSpec& a, const SampledView& v, const Tolerance& tol) {
  if (!r.has_time()) return r;
  const std::size_t i = v.index(r.time());
  if (i > v.last()) return TimeValue::undecided();
  return evaluate(a, v.prefix(i), tol) ? r : TimeValue::infinite();
}

TimeValue restrict_sampled(TimeValue r, const PathEvent& g, const SampledView& v, const EvalOptions& opts) {
  if (!r.has_time()) return r;
  const std::size_t i = v.index(r.time());
  if (i > v.last()) return TimeValue::undecided();
  const Truth t = evaluate(g, v.increments(i), opts.tail, opts.tol);
  if (t.is_undecided()) return TimeValue::undecided();
  if (t.is_no()) return TimeValue::infinite();
  return t.assumed ? TimeValue::tail_assumed(r.time()) : r;
}

}  // namespace

TimeValue restrict_time(TimeValue r, const EventSpec& optional_set, const Path& path, const EvalOptions& opts) {
  if (const auto* ev = std::get_if<EventPath>(&path)) {
    if (!r.has_time()) return r;
    if (r.time() > ev->horizon()) return TimeValue::undecided();
    return evaluate(optional_set, ev->truncated(r.time()), opts.tol) ? r : TimeValue::infinite();
  }
  SequencePath storage;
  return restrict_sampled(r, optional_set, view_or_throw(path, storage), opts.tol);
}

TimeValue restrict_time(TimeValue r, const PathEvent& increment_event, const Path& path,
                        const EvalOptions& opts) {
  if (const auto* ev = std::get_if<EventPath>(&path)) {
    if (!r.has_time()) return r;
    if (r.time() > ev->horizon()) return TimeValue::undecided();
    const Truth t = evaluate(increment_event, delta_shift(*ev, r.time()), opts.tail, opts.tol);
    if (t.is_undecided()) return TimeValue::undecided();
    if (t.is_no()) return TimeValue::infinite();
    return t.assumed ? TimeValue::tail_assumed(r.time()) : r;
  }
  SequencePath storage;
  return restrict_sampled(r, increment_event, view_or_throw(path, storage), opts);
}

// Dispatch ---------------------------------------------------------------------

TimeValue evaluate(const TimeSpec& spec, const SampledView& path, const TimeContext& ctx) {
  using K = TimeSpec::Kind;
  const EvalOptions& opts = ctx.eval;
  switch (spec.kind) {
    case K::deterministic:
    case K::first_passage:
      return eval_stopping_time(spec.stopping, path);
    case K::char_time:
      return eval_char_time(spec.clauses, path, spec.max_time, opts);
    case K::thin_time:
      return eval_thin_time(spec.thin, path, opts);
    case K::if_time: {
      Rng rng(ctx.terminal);
      const Path copy = GridPath(path.h, std::vector<double>(path.x.begin(), path.x.end()));
      return eval_if_time(spec.if_time.at(0), copy, rng, opts);
    }
    case K::last_sup:
      return eval_last_sup_time(spec.last_sup, path, opts);
    case K::restriction: {
      const TimeValue r = evaluate(*spec.inner, path, ctx);
      if (spec.restrict_past) return restrict_sampled(r, *spec.restrict_past, path, opts.tol);
      if (spec.restrict_future) return restrict_sampled(r, *spec.restrict_future, path, opts);
      return r;
    }
  }
  throw std::logic_error("unknown time kind");
}

TimeValue evaluate(const TimeSpec& spec, const Path& path, const TimeContext& ctx) {
  using K = TimeSpec::Kind;
  if (const auto* ev = std::get_if<EventPath>(&path)) {
    const EvalOptions& opts = ctx.eval;
    switch (spec.kind) {
      case K::deterministic:
      case K::first_passage:
        return eval_stopping_time(spec.stopping, *ev);
      case K::char_time:
        throw std::invalid_argument("char-times need a discrete walk");
      case K::thin_time:
        return eval_thin_time(spec.thin, *ev, opts);
      case K::if_time: {
        Rng rng(ctx.terminal);
        return eval_if_time(spec.if_time.at(0), path, rng, opts);
      }
      case K::last_sup:
        return eval_last_sup_time(spec.last_sup, *ev, opts);
      case K::restriction: {
        const TimeValue r = evaluate(*spec.inner, path, ctx);
        if (spec.restrict_past) return restrict_time(r, *spec.restrict_past, path, opts);
        if (spec.restrict_future) return restrict_time(r, *spec.restrict_future, path, opts);
        return r;
      }
    }
    throw std::logic_error("unknown time kind");
  }
  if (spec.kind == K::if_time) {
    Rng rng(ctx.terminal);
    return eval_if_time(spec.if_time.at(0), path, rng, ctx.eval);
  }
  SequencePath storage;
  return evaluate(spec, view_or_throw(path, storage), ctx);
}

// Past and future --------------------------------------------------------------

double past_at(const PastStatistic& z, const Path& path, double t, const Tolerance& tol) {
  if (const auto* ev = std::get_if<EventPath>(&path)) return evaluate(z, ev->truncated(t), tol);
  SequencePath storage;
  const SampledView v = view_or_throw(path, storage);
  return evaluate(z, v.prefix(v.index(t)), tol);
}

std::optional<double> future_at(const FutureFunctional& h, const Path& path, double t,
                                const EvalOptions& opts) {
  if (const auto* ev = std::get_if<EventPath>(&path)) {
    if (t > ev->horizon()) return std::nullopt;
    return evaluate(h, delta_shift(*ev, t), opts.tail, opts.tol);
  }
  SequencePath storage;
  const SampledView v = view_or_throw(path, storage);
  const std::size_t i = v.index(t);
  if (i > v.last()) return std::nullopt;
  return evaluate(h, v.increments(i), opts.tail, opts.tol);
}

// Serialization ----------------------------------------------------------------

namespace {

const char* variant_name(LastSupSpec::Variant v) {
  switch (v) {
    case LastSupSpec::Variant::discrete:
      return "discrete";
    case LastSupSpec::Variant::global:
      return "global";
    case LastSupSpec::Variant::r_eps:
      return "r-eps";
    case LastSupSpec::Variant::r_eps_before_max:
      return "r-eps-before-max";
    case LastSupSpec::Variant::delta_l_hitting:
      return "delta-l-hitting";
  }
  return "?";
}

nlohmann::json time_bound(double t) { return std::isinf(t) ? nlohmann::json("inf") : nlohmann::json(t); }

}  // namespace

void to_json(nlohmann::json& j, const TimeSpec& t) {
  using K = TimeSpec::Kind;
  switch (t.kind) {
    case K::deterministic:
    case K::first_passage:
      j = t.stopping;
      break;
    case K::char_time: {
      j = {{"kind", "char-time"}, {"max_time", time_bound(t.max_time)}};
      nlohmann::json clauses = nlohmann::json::array();
      for (const auto& c : t.clauses) clauses.push_back({{"past", c.past}, {"future", c.future}});
      j["clauses"] = clauses;
      break;
    }
    case K::thin_time: {
      j = {{"kind", "thin-time"}, {"future", t.thin.future}};
      nlohmann::json comps = nlohmann::json::array();
      for (const auto& c : t.thin.components) comps.push_back({{"stopping", c.stopping}, {"past", c.past}});
      j["components"] = comps;
      if (t.thin.ladder) j["ladder"] = {{"depth", t.thin.ladder->depth}, {"past", t.thin.ladder->past}};
      break;
    }
    case K::if_time:
      j = {{"kind", "if-time"},
           {"functional", t.if_time.at(0).functional},
           {"optional", t.if_time.at(0).optional},
           {"max_time", time_bound(t.if_time.at(0).max_time)}};
      break;
    case K::last_sup: {
      const auto& s = t.last_sup;
      j = {{"kind", "last-supremum"}, {"variant", variant_name(s.variant)}};
      switch (s.variant) {
        case LastSupSpec::Variant::discrete:
          j["window"] = s.window;
          j["max_time"] = time_bound(s.max_time);
          break;
        case LastSupSpec::Variant::r_eps:
        case LastSupSpec::Variant::r_eps_before_max:
          j["eps"] = s.eps;
          break;
        case LastSupSpec::Variant::delta_l_hitting:
          j["level"] = s.level;
          j["depth"] = s.depth;
          break;
        case LastSupSpec::Variant::global:
          break;
      }
      break;
    }
    case K::restriction:
      j = {{"kind", "restriction"}, {"inner", *t.inner}};
      if (t.restrict_past) j["optional_set"] = *t.restrict_past;
      if (t.restrict_future) j["increment_event"] = *t.restrict_future;
      break;
  }
  if (!t.example.empty()) j["example"] = t.example;
}

}  // namespace indtime

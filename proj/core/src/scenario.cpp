#include "indtime/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "indtime/catalog.hpp"
#include "indtime/reference.hpp"

namespace indtime {

namespace {

// Parsing helpers -----------------------------------------------------------------

struct Source {
  std::string name;
};

[[noreturn]] void fail(const Source& src, const YAML::Node& at, const std::string& what) {
  std::ostringstream os;
  os << src.name;
  if (at.IsDefined() && at.Mark().line >= 0) os << ':' << at.Mark().line + 1 << ':' << at.Mark().column + 1;
  os << ": " << what;
  throw ScenarioError(os.str());
}

class Fields {
 public:
  Fields(const Source& src, const YAML::Node& node, std::string where)
      : src_(src), node_(node), where_(std::move(where)) {
    if (!node_.IsMap()) fail(src_, node_, where_ + " must be a mapping");
  }

  [[nodiscard]] bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node get(const std::string& key) {
    used_.insert(key);
    return node_[key];
  }

  YAML::Node need(const std::string& key) {
    if (!has(key)) fail(src_, node_, "missing key '" + key + "' in " + where_);
    return get(key);
  }

  double number(const std::string& key, double def) { return has(key) ? to_number(get(key), key) : def; }
  double need_number(const std::string& key) { return to_number(need(key), key); }

  std::size_t count(const std::string& key, std::size_t def) {
    if (!has(key)) return def;
    const YAML::Node n = get(key);
    const double v = to_number(n, key);
    if (v < 0 || v != std::floor(v) || v > 1e18) fail(src_, n, where_ + "." + key + " must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const YAML::Node n = get(key);
    if (!n.IsScalar()) fail(src_, n, where_ + "." + key + " must be a string");
    return n.Scalar();
  }

  [[nodiscard]] std::string where(const std::string& key) const { return where_ + "." + key; }
  [[nodiscard]] const YAML::Node& node() const { return node_; }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!used_.contains(key)) fail(src_, kv.first, "unknown key '" + key + "' in " + where_);
    }
  }

  double to_number(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(src_, n, where_ + "." + key + " must be a number");
    const std::string& s = n.Scalar();
    if (s == "inf" || s == ".inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-.inf") return -kInf;
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(src_, n, where_ + "." + key + " must be a number, got '" + s + "'");
    }
  }

 private:
  const Source& src_;
  YAML::Node node_;
  std::string where_;
  std::set<std::string> used_;
};

// A node given either as a bare kind ("at-sup"), a compact call ("step(2)"),
// or a mapping with a `kind` key.
struct KindNode {
  std::string kind;
  std::vector<double> args;
  std::optional<Fields> fields;
};

KindNode read_kind(const Source& src, const YAML::Node& node, const std::string& where) {
  KindNode out;
  if (node.IsScalar()) {
    static const std::regex call(R"(^\s*([a-z][a-z0-9-]*)\s*(?:\(([^)]*)\))?\s*$)");
    std::smatch m;
    const std::string s = node.Scalar();
    if (!std::regex_match(s, m, call)) fail(src, node, where + ": cannot read '" + s + "'");
    out.kind = m[1];
    if (m[2].matched) {
      std::stringstream ss(m[2].str());
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          out.args.push_back(item.find("inf") != std::string::npos ? kInf : std::stod(item));
        } catch (const std::exception&) {
          fail(src, node, where + ": bad argument '" + item + "'");
        }
      }
    }
    return out;
  }
  out.fields.emplace(src, node, where);
  const YAML::Node k = out.fields->need("kind");
  if (!k.IsScalar()) fail(src, k, where + ".kind must be a string");
  out.kind = k.Scalar();
  return out;
}

// Reads argument i from a compact call or `key` from a mapping.
double arg(const Source& src, const YAML::Node& node, KindNode& kn, std::size_t i, const std::string& key,
           std::optional<double> def = std::nullopt) {
  if (kn.fields) {
    if (def) return kn.fields->number(key, *def);
    return kn.fields->need_number(key);
  }
  if (i < kn.args.size()) return kn.args[i];
  if (def) return *def;
  fail(src, node, "'" + kn.kind + "' needs argument " + key);
}

void done(const KindNode& kn) {
  if (kn.fields) kn.fields->finish();
}

Cmp read_cmp(const Source& src, KindNode& kn, const YAML::Node& node) {
  if (!kn.fields) fail(src, node, "'" + kn.kind + "' needs a mapping with op and value");
  const YAML::Node op = kn.fields->need("op");
  try {
    return parse_cmp(op.as<std::string>());
  } catch (const std::exception&) {
    fail(src, op, "unknown comparison '" + op.as<std::string>() + "'");
  }
}

[[noreturn]] void unknown(const Source& src, const YAML::Node& node, const std::string& where, const std::string& what,
                          const std::string& kind) {
  fail(src, node, where + ": unknown " + what + " '" + kind + "'");
}

template <class T, class F>
std::vector<T> read_list(const Source& src, const YAML::Node& node, const std::string& where, F&& one) {
  if (!node.IsSequence()) fail(src, node, where + " must be a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(one(node[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

// Building blocks -------------------------------------------------------------------

StepLaw read_law(const Source& src, const YAML::Node& node, const std::string& where) {
  KindNode kn = read_kind(src, node, where);
  try {
    StepLaw law = StepLaw::constant(0.0);
    if (kn.kind == "bernoulli") {
      law = StepLaw::bernoulli(arg(src, node, kn, 0, "p"));
    } else if (kn.kind == "finite") {
      if (!kn.fields) fail(src, node, where + ": finite law needs values and probs");
      auto nums = [&](const char* key) {
        return read_list<double>(src, kn.fields->need(key), kn.fields->where(key),
                                 [&](const YAML::Node& n, const std::string& w) {
                                   Fields dummy(src, YAML::Node(YAML::NodeType::Map), w);
                                   return dummy.to_number(n, key);
                                 });
      };
      auto values = nums("values");
      auto probs = nums("probs");
      law = StepLaw::finite_support(std::move(values), std::move(probs));
    } else if (kn.kind == "gaussian") {
      law = StepLaw::gaussian(arg(src, node, kn, 0, "mu", 0.0), arg(src, node, kn, 1, "sigma", 1.0));
    } else if (kn.kind == "constant") {
      law = StepLaw::constant(arg(src, node, kn, 0, "value"));
    } else if (kn.kind == "exponential") {
      law = StepLaw::exponential(arg(src, node, kn, 0, "rate"));
    } else {
      unknown(src, node, where, "law", kn.kind);
    }
    done(kn);
    return law;
  } catch (const std::invalid_argument& e) {
    fail(src, node, where + ": " + e.what());
  }
}

EngineSpec read_engine(const Source& src, const YAML::Node& node) {
  KindNode kn = read_kind(src, node, "engine");
  if (!kn.fields) fail(src, node, "engine must be a mapping");
  Fields& f = *kn.fields;
  try {
    EngineSpec e;
    if (kn.kind == "iid" || kn.kind == "random-walk") {
      StepLaw law = read_law(src, f.need("law"), "engine.law");
      e = kn.kind == "iid" ? EngineSpec::iid(std::move(law)) : EngineSpec::random_walk(std::move(law));
    } else if (kn.kind == "bm-drift") {
      e = EngineSpec::levy(LevySpec::bm_drift(f.number("mu", 0.0), f.number("sigma", 1.0)));
    } else if (kn.kind == "compound-poisson") {
      const double rate = f.need_number("rate");
      e = EngineSpec::levy(LevySpec::compound_poisson(rate, read_law(src, f.need("jumps"), "engine.jumps")));
    } else if (kn.kind == "drift-minus-cp") {
      const double drift = f.need_number("drift");
      const double rate = f.need_number("rate");
      e = EngineSpec::levy(LevySpec::drift_minus_cp(drift, rate, read_law(src, f.need("jumps"), "engine.jumps")));
    } else {
      unknown(src, node, "engine", "engine", kn.kind);
    }
    f.finish();
    return e;
  } catch (const std::invalid_argument& e) {
    fail(src, node, std::string("engine: ") + e.what());
  }
}

EventSpec read_event(const Source& src, const YAML::Node& node, const std::string& where);
PathEvent read_path_event(const Source& src, const YAML::Node& node, const std::string& where);

std::vector<EventSpec> read_event_args(const Source& src, KindNode& kn, const YAML::Node& node,
                                       const std::string& where) {
  if (!kn.fields) fail(src, node, where + ": '" + kn.kind + "' needs args");
  return read_list<EventSpec>(src, kn.fields->need("args"), where + ".args",
                              [&](const YAML::Node& n, const std::string& w) { return read_event(src, n, w); });
}

EventSpec read_event(const Source& src, const YAML::Node& node, const std::string& where) {
  KindNode kn = read_kind(src, node, where);
  EventSpec e;
  const std::string& k = kn.kind;
  if (k == "always") {
    e = EventSpec::always();
  } else if (k == "never") {
    e = EventSpec::never();
  } else if (k == "all-of") {
    e = EventSpec::all_of(read_event_args(src, kn, node, where));
  } else if (k == "any-of") {
    e = EventSpec::any_of(read_event_args(src, kn, node, where));
  } else if (k == "not") {
    auto args = read_event_args(src, kn, node, where);
    if (args.size() != 1) fail(src, node, where + ": 'not' takes one argument");
    e = EventSpec::negate(std::move(args[0]));
  } else if (k == "steps-all-equal") {
    e = EventSpec::steps_all_equal(arg(src, node, kn, 0, "value"));
  } else if (k == "last-step-eq") {
    e = EventSpec::last_step_eq(arg(src, node, kn, 0, "value"));
  } else if (k == "at-sup") {
    e = EventSpec::at_sup();
  } else if (k == "value" || k == "running-sup" || k == "drawdown" || k == "time" || k == "jump-count") {
    const Cmp op = read_cmp(src, kn, node);
    const double v = kn.fields->need_number("value");
    if (k == "value") e = EventSpec::value_cmp(op, v);
    if (k == "running-sup") e = EventSpec::sup_cmp(op, v);
    if (k == "drawdown") e = EventSpec::drawdown_cmp(op, v);
    if (k == "time") e = EventSpec::time_cmp(op, v);
    if (k == "jump-count") e = EventSpec::jump_count_cmp(op, v);
  } else {
    unknown(src, node, where, "past event", k);
  }
  done(kn);
  return e;
}

std::vector<PathEvent> read_path_args(const Source& src, KindNode& kn, const YAML::Node& node,
                                      const std::string& where) {
  if (!kn.fields) fail(src, node, where + ": '" + kn.kind + "' needs args");
  return read_list<PathEvent>(src, kn.fields->need("args"), where + ".args",
                              [&](const YAML::Node& n, const std::string& w) { return read_path_event(src, n, w); });
}

PathEvent read_path_event(const Source& src, const YAML::Node& node, const std::string& where) {
  KindNode kn = read_kind(src, node, where);
  PathEvent e;
  const std::string& k = kn.kind;
  if (k == "whole") {
    e = PathEvent::whole();
  } else if (k == "empty") {
    e = PathEvent::empty();
  } else if (k == "all-of") {
    e = PathEvent::all_of(read_path_args(src, kn, node, where));
  } else if (k == "any-of") {
    e = PathEvent::any_of(read_path_args(src, kn, node, where));
  } else if (k == "not") {
    auto args = read_path_args(src, kn, node, where);
    if (args.size() != 1) fail(src, node, where + ": 'not' takes one argument");
    e = PathEvent::negate(std::move(args[0]));
  } else if (k == "step-eq") {
    const double index = arg(src, node, kn, 0, "index");
    if (index < 1 || index != std::floor(index)) fail(src, node, where + ": step index must be a positive integer");
    e = PathEvent::step_eq(static_cast<std::size_t>(index), arg(src, node, kn, 1, "value"));
  } else if (k == "stays-below") {
    e = PathEvent::stays_below(arg(src, node, kn, 0, "level"), arg(src, node, kn, 1, "from", 0.0),
                               arg(src, node, kn, 2, "to", kInf));
  } else if (k == "never-reaches") {
    e = PathEvent::never_reaches(arg(src, node, kn, 0, "level"));
  } else if (k == "value-at") {
    const Cmp op = read_cmp(src, kn, node);
    e = PathEvent::value_at_cmp(kn.fields->need_number("time"), op, kn.fields->need_number("value"));
  } else if (k == "unit-drift-then-jump") {
    e = PathEvent::unit_drift_then_jump(arg(src, node, kn, 0, "units", 1.0));
  } else if (k == "first-jump-size-in") {
    e = PathEvent::first_jump_size_in(arg(src, node, kn, 0, "low"), arg(src, node, kn, 1, "high"));
  } else if (k == "no-jump-before") {
    e = PathEvent::no_jump_before(arg(src, node, kn, 0, "time"));
  } else {
    unknown(src, node, where, "path event", k);
  }
  done(kn);
  return e;
}

PastStatistic read_statistic(const Source& src, const YAML::Node& node, const std::string& where) {
  KindNode kn = read_kind(src, node, where);
  using K = PastStatistic::Kind;
  static const std::map<std::string, K> plain = {
      {"time", K::time},           {"value", K::value},         {"running-sup", K::running_sup},
      {"running-inf", K::running_inf}, {"drawdown", K::drawdown}, {"jump-count", K::jump_count},
      {"last-step", K::last_step}, {"time-since-sup", K::time_since_sup}, {"last-jump-size", K::last_jump_size},
  };
  PastStatistic z;
  if (const auto it = plain.find(kn.kind); it != plain.end()) {
    z = PastStatistic::of(it->second);
  } else if (kn.kind == "count-steps-eq") {
    z = PastStatistic::of(K::count_steps_eq, arg(src, node, kn, 0, "value"));
  } else if (kn.kind == "value-at-lag") {
    z = PastStatistic::of(K::value_at_lag, arg(src, node, kn, 0, "lag"));
  } else if (kn.kind == "constant") {
    z = PastStatistic::of(K::constant, arg(src, node, kn, 0, "value", 0.0));
  } else if (kn.kind == "indicator") {
    if (!kn.fields) fail(src, node, where + ": indicator needs an event");
    z = PastStatistic::indicator(read_event(src, kn.fields->need("event"), where + ".event"));
  } else {
    unknown(src, node, where, "statistic", kn.kind);
  }
  done(kn);
  return z;
}

FutureFunctional read_functional(const Source& src, const YAML::Node& node, const std::string& where) {
  KindNode kn = read_kind(src, node, where);
  using K = FutureFunctional::Kind;
  static const std::map<std::string, K> timed = {
      {"increment-at", K::increment_at}, {"sup-over", K::sup_over},   {"inf-over", K::inf_over},
      {"first-jump-time", K::first_jump_time}, {"jump-count", K::jump_count},
  };
  FutureFunctional h;
  if (const auto it = timed.find(kn.kind); it != timed.end()) {
    const double u = arg(src, node, kn, 0, "time");
    if (!(u >= 0.0)) fail(src, node, where + ": time must be nonnegative");
    h = FutureFunctional::of(it->second, u);
  } else if (kn.kind == "step") {
    const double k = arg(src, node, kn, 0, "index");
    if (k < 1 || k != std::floor(k)) fail(src, node, where + ": step index must be a positive integer");
    h = FutureFunctional::step(static_cast<std::size_t>(k));
  } else if (kn.kind == "first-jump-size") {
    h = FutureFunctional::of(K::first_jump_size, 0.0);
  } else if (kn.kind == "constant") {
    h = FutureFunctional::constant(arg(src, node, kn, 0, "value"));
  } else if (kn.kind == "indicator") {
    if (!kn.fields) fail(src, node, where + ": indicator needs an event");
    h = FutureFunctional::indicator(read_path_event(src, kn.fields->need("event"), where + ".event"));
  } else {
    unknown(src, node, where, "functional", kn.kind);
  }
  done(kn);
  return h;
}

StoppingSpec read_stopping(const Source& src, const YAML::Node& node, const std::string& where) {
  KindNode kn = read_kind(src, node, where);
  StoppingSpec s;
  if (kn.kind == "deterministic") {
    s = StoppingSpec::deterministic(arg(src, node, kn, 0, "time"));
  } else if (kn.kind == "first-passage") {
    const double level = arg(src, node, kn, 0, "level");
    std::string dir = "down";
    if (kn.fields) dir = kn.fields->text("direction", level >= 0 ? "up" : "down");
    else dir = level >= 0 ? "up" : "down";
    if (dir != "up" && dir != "down") fail(src, node, where + ".direction must be up or down");
    s = StoppingSpec::first_passage(level, dir == "up");
  } else {
    unknown(src, node, where, "stopping time", kn.kind);
  }
  done(kn);
  return s;
}

TerminalTimeSpec read_terminal(const Source& src, const YAML::Node& node, const std::string& where) {
  KindNode kn = read_kind(src, node, where);
  TerminalTimeSpec t;
  try {
    if (kn.kind == "infinite") {
      t = TerminalTimeSpec::infinite();
    } else if (kn.kind == "zero") {
      t = TerminalTimeSpec::zero();
    } else if (kn.kind == "exponential") {
      t = TerminalTimeSpec::exponential(arg(src, node, kn, 0, "rate"));
    } else if (kn.kind == "jump-pattern") {
      t = TerminalTimeSpec::jump_pattern(arg(src, node, kn, 0, "low"), arg(src, node, kn, 1, "high"));
    } else if (kn.kind == "min-with-exponential") {
      if (!kn.fields) fail(src, node, where + ": min-with-exponential needs inner and rate");
      TerminalTimeSpec inner = read_terminal(src, kn.fields->need("inner"), where + ".inner");
      t = TerminalTimeSpec::min_with_exponential(std::move(inner), kn.fields->need_number("rate"));
    } else {
      unknown(src, node, where, "terminal time", kn.kind);
    }
  } catch (const std::invalid_argument& e) {
    fail(src, node, where + ": " + e.what());
  }
  done(kn);
  return t;
}

IncrementalFunctional read_increasing(const Source& src, const YAML::Node& node, const std::string& where) {
  KindNode kn = read_kind(src, node, where);
  IncrementalFunctional a;
  try {
    if (kn.kind == "lebesgue") {
      a = IncrementalFunctional::lebesgue();
    } else if (kn.kind == "unit-drift-then-jump") {
      a = IncrementalFunctional::unit_drift_then_jump(arg(src, node, kn, 0, "units", 1.0));
    } else if (kn.kind == "eps-excursion") {
      a = IncrementalFunctional::eps_excursion(arg(src, node, kn, 0, "eps"));
    } else if (kn.kind == "weighted" || kn.kind == "stopped") {
      if (!kn.fields) fail(src, node, where + ": '" + kn.kind + "' needs a mapping");
      IncrementalFunctional base = read_increasing(src, kn.fields->need("base"), where + ".base");
      if (kn.kind == "weighted") {
        a = IncrementalFunctional::weighted(std::move(base),
                                            read_functional(src, kn.fields->need("weight"), where + ".weight"));
      } else {
        a = IncrementalFunctional::stopped(std::move(base),
                                           read_terminal(src, kn.fields->need("terminal"), where + ".terminal"));
      }
    } else {
      unknown(src, node, where, "increasing functional", kn.kind);
    }
  } catch (const std::invalid_argument& e) {
    fail(src, node, where + ": " + e.what());
  }
  done(kn);
  return a;
}

PastProcessSpec read_process(const Source& src, const YAML::Node& node, const std::string& where) {
  KindNode kn = read_kind(src, node, where);
  PastProcessSpec m;
  if (kn.kind == "one") {
    m = PastProcessSpec::one();
  } else if (kn.kind == "until") {
    m = PastProcessSpec::until(arg(src, node, kn, 0, "time"));
  } else if (kn.kind == "after") {
    if (!kn.fields) fail(src, node, where + ": 'after' needs a stopping time");
    m = PastProcessSpec::after(read_stopping(src, kn.fields->need("stopping"), where + ".stopping"));
  } else {
    unknown(src, node, where, "process", kn.kind);
  }
  done(kn);
  return m;
}

TimeSpec read_time(const Source& src, const YAML::Node& node, const std::string& where) {
  if (node.IsMap() && node["example"]) {
    Fields f(src, node, where);
    const YAML::Node ex = f.get("example");
    auto t = example_time(ex.as<std::string>());
    if (!t) unknown(src, ex, where, "example time", ex.as<std::string>());
    f.finish();
    return *t;
  }
  KindNode kn = read_kind(src, node, where);
  if (!kn.fields && kn.kind != "deterministic" && kn.kind != "first-passage")
    fail(src, node, where + ": '" + kn.kind + "' needs a mapping");
  TimeSpec t;
  const std::string& k = kn.kind;
  if (k == "deterministic") {
    t = TimeSpec::deterministic(arg(src, node, kn, 0, "time"));
  } else if (k == "first-passage") {
    const double level = arg(src, node, kn, 0, "level");
    std::string dir = kn.fields ? kn.fields->text("direction", level >= 0 ? "up" : "down") : (level >= 0 ? "up" : "down");
    if (dir != "up" && dir != "down") fail(src, node, where + ".direction must be up or down");
    t = TimeSpec::first_passage(level, dir == "up");
  } else if (k == "char-time") {
    Fields& f = *kn.fields;
    auto clauses = read_list<CharClause>(src, f.need("clauses"), where + ".clauses",
                                         [&](const YAML::Node& n, const std::string& w) {
                                           Fields c(src, n, w);
                                           CharClause cl{read_event(src, c.need("past"), w + ".past"),
                                                         read_path_event(src, c.need("future"), w + ".future")};
                                           c.finish();
                                           return cl;
                                         });
    if (clauses.empty()) fail(src, node, where + ".clauses must not be empty");
    t = TimeSpec::char_time(std::move(clauses), f.number("max_time", kInf));
  } else if (k == "thin-time") {
    Fields& f = *kn.fields;
    ThinTimeSpec spec;
    if (f.has("components")) {
      spec.components = read_list<ThinComponent>(src, f.get("components"), where + ".components",
                                                 [&](const YAML::Node& n, const std::string& w) {
                                                   Fields c(src, n, w);
                                                   ThinComponent comp{read_stopping(src, c.need("stopping"), w + ".stopping"),
                                                                      EventSpec::always()};
                                                   if (c.has("past")) comp.past = read_event(src, c.get("past"), w + ".past");
                                                   c.finish();
                                                   return comp;
                                                 });
    }
    if (f.has("ladder")) {
      Fields l(src, f.get("ladder"), where + ".ladder");
      LadderDrawdownFamily fam;
      fam.depth = l.number("depth", 1.0);
      if (l.has("past")) fam.past = read_event(src, l.get("past"), where + ".ladder.past");
      l.finish();
      spec.ladder = fam;
    }
    if (spec.components.empty() && !spec.ladder) fail(src, node, where + ": thin time needs components or a ladder");
    spec.future = read_path_event(src, f.need("future"), where + ".future");
    t = TimeSpec::thin_time(std::move(spec));
  } else if (k == "if-time") {
    Fields& f = *kn.fields;
    IfTimeSpec spec;
    spec.functional = read_increasing(src, f.need("functional"), where + ".functional");
    if (f.has("optional")) spec.optional = read_event(src, f.get("optional"), where + ".optional");
    spec.max_time = f.number("max_time", kInf);
    t = TimeSpec::if_time_of(std::move(spec));
  } else if (k == "last-supremum") {
    Fields& f = *kn.fields;
    LastSupSpec s;
    const YAML::Node v = f.need("variant");
    static const std::map<std::string, LastSupSpec::Variant> variants = {
        {"discrete", LastSupSpec::Variant::discrete},
        {"global", LastSupSpec::Variant::global},
        {"r-eps", LastSupSpec::Variant::r_eps},
        {"r-eps-before-max", LastSupSpec::Variant::r_eps_before_max},
        {"delta-l-hitting", LastSupSpec::Variant::delta_l_hitting},
    };
    const auto it = variants.find(v.as<std::string>());
    if (it == variants.end()) unknown(src, v, where, "last-supremum variant", v.as<std::string>());
    s.variant = it->second;
    s.eps = f.number("eps", s.eps);
    s.level = f.number("level", s.level);
    s.depth = f.number("depth", s.depth);
    s.window = f.count("window", 0);
    s.max_time = f.number("max_time", kInf);
    t = TimeSpec::last_supremum(s);
  } else if (k == "restriction") {
    Fields& f = *kn.fields;
    TimeSpec inner = read_time(src, f.need("inner"), where + ".inner");
    if (f.has("optional_set") == f.has("increment_event"))
      fail(src, node, where + ": give exactly one of optional_set and increment_event");
    if (f.has("optional_set")) {
      t = TimeSpec::restricted(std::move(inner), read_event(src, f.get("optional_set"), where + ".optional_set"));
    } else {
      t = TimeSpec::restricted(std::move(inner),
                               read_path_event(src, f.get("increment_event"), where + ".increment_event"));
    }
  } else {
    unknown(src, node, where, "time", k);
  }
  done(kn);
  return t;
}

Verdict read_verdict(const Source& src, const YAML::Node& node) {
  try {
    return parse_verdict(node.as<std::string>());
  } catch (const std::exception&) {
    fail(src, node, "expected verdict must be pass, fail or inconclusive");
  }
}

const std::set<std::string> kCheckNames = {"independence", "conditional", "law", "factorization", "if_identity"};

// Running ----------------------------------------------------------------------------

bool uses_exact(const Scenario& s) { return s.mode != Scenario::Mode::monte_carlo; }
bool uses_mc(const Scenario& s) { return s.mode != Scenario::Mode::exact; }

nlohmann::json engine_json(const EngineSpec& e, const SampleBudget& b) {
  nlohmann::json j;
  switch (e.kind) {
    case EngineSpec::Kind::iid:
      j = {{"kind", "iid"}, {"law", e.law.describe()}};
      break;
    case EngineSpec::Kind::random_walk:
      j = {{"kind", "random-walk"}, {"law", e.law.describe()}};
      break;
    case EngineSpec::Kind::levy: {
      const LevySpec& l = e.levy_spec;
      switch (l.kind) {
        case LevySpec::Kind::bm_drift:
          j = {{"kind", "bm-drift"}, {"mu", l.mu}, {"sigma", l.sigma}, {"step", b.step}};
          break;
        case LevySpec::Kind::compound_poisson:
          j = {{"kind", "compound-poisson"}, {"rate", l.rate}, {"jumps", l.jump_law.describe()}};
          break;
        case LevySpec::Kind::drift_minus_cp:
          j = {{"kind", "drift-minus-cp"}, {"drift", l.drift}, {"rate", l.rate}, {"jumps", l.jump_law.describe()}};
          break;
      }
    }
  }
  j["horizon"] = b.horizon;
  return j;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

std::string quantile_rows(const SampleRows& rows, const std::string& label) {
  std::ostringstream os;
  if (rows.empty()) return {};
  const std::size_t d = rows.front().size();
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> col;
    col.reserve(rows.size());
    for (const auto& r : rows) col.push_back(r[c]);
    std::sort(col.begin(), col.end());
    for (int q = 0; q <= 100; ++q) {
      const std::size_t i = std::min(col.size() - 1, col.size() * static_cast<std::size_t>(q) / 100);
      os << c << ',' << label << ',' << format_number(q / 100.0) << ',' << format_number(col[i]) << '\n';
    }
  }
  return os.str();
}

std::string cell_text(const nlohmann::json& cell) {
  std::string out;
  for (const auto& v : cell) {
    if (!out.empty()) out += ' ';
    out += v.is_number() ? format_number(v.get<double>()) : v.dump();
  }
  return out;
}

struct PlotData {
  std::string discrepancy;
  std::string ecdf;
};

void move_table(TestReport& r, const std::string& check, PlotData& plots) {
  if (!r.details.contains("table")) return;
  std::ostringstream os;
  for (const auto& row : r.details["table"])
    os << check << ',' << cell_text(row["present"]) << ',' << cell_text(row["z"]) << ',' << cell_text(row["h"]) << ','
       << format_number(row["joint"].get<double>()) << ',' << format_number(row["product"].get<double>()) << '\n';
  plots.discrepancy += os.str();
  r.details.erase("table");
}

}  // namespace

std::string to_string(Scenario::Mode m) {
  switch (m) {
    case Scenario::Mode::exact:
      return "exact";
    case Scenario::Mode::monte_carlo:
      return "monte-carlo";
    case Scenario::Mode::both:
      return "both";
  }
  return "?";
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  const Source src{source};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                        ": " + e.msg);
  }
  Fields top(src, root, "scenario");
  Scenario s;
  s.source = source;
  s.name = top.text("name", "");
  if (s.name.empty() || s.name.find_first_of("/\\ ") != std::string::npos)
    fail(src, root, "scenario needs a name without spaces or slashes");
  s.description = top.text("description", "");
  s.engine = read_engine(src, top.need("engine"));
  s.time = read_time(src, top.need("time"), "time");

  {
    Fields st(src, top.need("statistics"), "statistics");
    auto stat_list = [&](const char* key) {
      return read_list<PastStatistic>(src, st.need(key), std::string("statistics.") + key,
                                      [&](const YAML::Node& n, const std::string& w) { return read_statistic(src, n, w); });
    };
    s.past = stat_list("past");
    st.need("future");
    s.future = read_list<FutureFunctional>(src, st.get("future"), "statistics.future",
                                           [&](const YAML::Node& n, const std::string& w) {
                                             return read_functional(src, n, w);
                                           });
    if (st.has("present")) s.present = stat_list("present");
    if (s.past.empty()) fail(src, st.node(), "statistics.past must not be empty");
    if (s.future.empty()) fail(src, st.node(), "statistics.future must not be empty");
    st.finish();
  }

  {
    const std::string mode = top.text("mode", "exact");
    if (mode == "exact") {
      s.mode = Scenario::Mode::exact;
    } else if (mode == "monte-carlo") {
      s.mode = Scenario::Mode::monte_carlo;
    } else if (mode == "both") {
      s.mode = Scenario::Mode::both;
    } else {
      fail(src, root["mode"], "mode must be exact, monte-carlo or both");
    }
  }

  if (top.has("budget")) {
    Fields b(src, top.get("budget"), "budget");
    s.budget.horizon = b.need_number("horizon");
    s.budget.step = b.number("step", s.budget.step);
    s.paths = b.count("paths", s.paths);
    s.max_paths = b.count("max_paths", std::max(s.max_paths, s.paths * 100));
    s.permutations = b.count("permutations", s.permutations);
    s.exact_budget = b.count("exact_budget", s.exact_budget);
    const std::string route = b.text("exact_route", "automatic");
    if (route == "full") {
      s.exact_route = ExactRoute::full;
    } else if (route == "factored") {
      s.exact_route = ExactRoute::factored;
    } else if (route != "automatic") {
      fail(src, b.node()["exact_route"], "budget.exact_route must be full, factored or automatic");
    }
    b.finish();
  } else {
    fail(src, root, "missing key 'budget' in scenario");
  }

  if (top.has("seeds")) {
    Fields f(src, top.get("seeds"), "seeds");
    s.seed = f.count("master", 1);
    f.finish();
  }
  if (top.has("tail")) {
    Fields f(src, top.get("tail"), "tail");
    s.tail_margin = f.number("margin", kInf);
    f.finish();
  }
  if (top.has("verify")) {
    Fields f(src, top.get("verify"), "verify");
    try {
      s.independence = parse_independence_statistic(f.text("independence", to_string(s.independence)));
      s.law = parse_law_statistic(f.text("law", to_string(s.law)));
    } catch (const std::invalid_argument& e) {
      fail(src, f.node(), std::string("verify: ") + e.what());
    }
    s.alpha = f.number("alpha", s.alpha);
    s.max_discard = f.number("max_discard", s.max_discard);
    s.bins = f.count("bins", s.bins);
    f.finish();
  }
  if (top.has("reference")) {
    Fields f(src, top.get("reference"), "reference");
    Scenario::Reference r;
    const std::string kind = f.text("kind", "unconditional");
    if (kind == "unconditional") {
      r.kind = Scenario::Reference::Kind::unconditional;
    } else if (kind == "conditional") {
      r.kind = Scenario::Reference::Kind::conditional;
      r.event = read_path_event(src, f.need("event"), "reference.event");
    } else if (kind == "strict-formula") {
      r.kind = Scenario::Reference::Kind::strict_formula;
      r.functional = read_increasing(src, f.need("functional"), "reference.functional");
    } else {
      fail(src, f.node()["kind"], "reference.kind must be unconditional, conditional or strict-formula");
    }
    r.paths = f.count("paths", 0);
    r.pilot = f.count("pilot", r.pilot);
    r.floor = f.number("floor", r.floor);
    f.finish();
    s.reference = r;
  }
  if (top.has("factorization")) {
    Fields f(src, top.get("factorization"), "factorization");
    s.factorization = Scenario::Factorize{f.count("from", 0), static_cast<std::size_t>(f.count("to", 0))};
    f.finish();
  }
  if (top.has("if_identity")) {
    Fields f(src, top.get("if_identity"), "if_identity");
    Scenario::IfIdentity c;
    c.functional = read_increasing(src, f.need("functional"), "if_identity.functional");
    if (f.has("weight")) c.weight = read_functional(src, f.get("weight"), "if_identity.weight");
    if (f.has("process")) c.process = read_process(src, f.get("process"), "if_identity.process");
    c.paths = f.count("paths", c.paths);
    c.k = f.number("k", c.k);
    c.max_discard = f.number("max_discard", c.max_discard);
    f.finish();
    s.if_identity = c;
  }
  if (top.has("expect")) {
    const YAML::Node e = top.get("expect");
    if (!e.IsMap()) fail(src, e, "expect must be a mapping");
    for (const auto& kv : e) {
      const std::string key = kv.first.as<std::string>();
      if (!kCheckNames.contains(key)) fail(src, kv.first, "unknown key '" + key + "' in expect");
      s.expect[key] = read_verdict(src, kv.second);
    }
  }
  top.finish();

  try {
    validate(s);
  } catch (const ScenarioError& e) {
    throw ScenarioError(source + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ScenarioError(file.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), file.string());
}

void validate(const Scenario& s) {
  const bool finite_engine =
      s.engine.kind != EngineSpec::Kind::levy && s.engine.law.is_finite();
  if (uses_exact(s)) {
    if (!finite_engine) throw ScenarioError("exact mode needs an iid or random-walk engine with a finite law");
    if (s.budget.horizon != std::floor(s.budget.horizon) || s.budget.horizon < 1)
      throw ScenarioError("exact mode needs a positive integer horizon");
  }
  if (!s.present.empty() && !uses_exact(s)) throw ScenarioError("present statistics need exact mode");
  if (s.factorization && !uses_exact(s)) throw ScenarioError("factorization needs exact mode");
  if (s.factorization && s.factorization->last < s.factorization->first)
    throw ScenarioError("factorization.to must not be below factorization.from");
  if (s.if_identity && !uses_mc(s)) throw ScenarioError("if_identity needs monte-carlo mode");
  if (s.reference && s.reference->kind == Scenario::Reference::Kind::strict_formula && uses_exact(s))
    throw ScenarioError("a strict-formula reference needs monte-carlo mode");
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw ScenarioError("verify.alpha must lie in (0, 1)");
  if (s.bins < 2) throw ScenarioError("verify.bins must be at least 2");
  for (const auto& [name, v] : s.expect) {
    const bool runs = (name == "independence") || (name == "conditional" && !s.present.empty()) ||
                      (name == "law" && s.reference) || (name == "factorization" && s.factorization) ||
                      (name == "if_identity" && s.if_identity);
    if (!runs) throw ScenarioError("expect." + name + " names a check the scenario does not run");
  }

  if (s.paths > guard::max_effective) throw BudgetGuardError("budget.paths exceeds the guard");
  if (s.max_paths > guard::max_paths) throw BudgetGuardError("budget.max_paths exceeds the guard");
  if (s.permutations > guard::max_permutations) throw BudgetGuardError("budget.permutations exceeds the guard");
  if (s.exact_budget > kExactBudget) throw BudgetGuardError("budget.exact_budget exceeds the guard");
  if (s.if_identity && s.if_identity->paths > guard::max_effective)
    throw BudgetGuardError("if_identity.paths exceeds the guard");
  if (s.engine.kind == EngineSpec::Kind::levy && s.engine.levy_spec.kind == LevySpec::Kind::bm_drift &&
      s.budget.horizon / s.budget.step > guard::max_grid_points)
    throw BudgetGuardError("grid points exceed the guard");
  if (uses_exact(s)) {
    const ExactModel m = ExactModel::from_law(s.engine.law, static_cast<std::size_t>(s.budget.horizon));
    const bool char_like = s.time.kind == TimeSpec::Kind::char_time ||
                           (s.time.kind == TimeSpec::Kind::last_sup &&
                            s.time.last_sup.variant == LastSupSpec::Variant::discrete);
    if (m.sequence_count() > s.exact_budget && (!char_like || s.exact_route == ExactRoute::full))
      throw BudgetGuardError("exact model has " + std::to_string(m.sequence_count()) +
                             " sequences, above budget.exact_budget");
  }
}

RunResult run_scenario(const Scenario& s, const RunOptions& opts) {
  RunResult result;
  const std::uint64_t seed = opts.seed_override.value_or(s.seed);
  const EvalOptions eval{TailRule{s.engine.mean_drift(), s.tail_margin}, Tolerance{}};
  PlotData plots;

  auto add = [&](const std::string& name, TestReport r) {
    move_table(r, name, plots);
    CheckResult c{name, std::move(r), std::nullopt};
    if (const auto it = s.expect.find(name); it != s.expect.end()) c.expected = it->second;
    result.checks.push_back(std::move(c));
  };

  try {
    if (uses_exact(s)) {
      const ExactModel model = ExactModel::from_law(s.engine.law, static_cast<std::size_t>(s.budget.horizon));
      ExactOptions eo;
      eo.eval = eval;
      eo.route = s.exact_route;
      eo.jobs = opts.jobs;
      eo.budget = s.exact_budget;
      add("independence", exact_independence_check(model, s.time, s.past, s.future, eo));
      if (!s.present.empty())
        add("conditional", exact_cond_independence_check(model, s.time, s.past, s.future, s.present, eo));
      if (s.reference) {
        const PathEvent g = s.reference->kind == Scenario::Reference::Kind::conditional ? s.reference->event
                                                                                         : PathEvent::whole();
        add("law", exact_law_check(model, s.time, s.future, g, eo));
      }
      if (s.factorization)
        add("factorization", check_factorization(model, s.time, s.factorization->first, s.factorization->last, eo));
    }
    if (uses_mc(s)) {
      CollectOptions co;
      co.target = s.paths;
      co.max_paths = s.max_paths;
      co.seed = seed;
      co.jobs = opts.jobs;
      co.eval = eval;
      const McCollection coll = collect_samples(s.engine, s.budget, s.time, s.past, s.future, co);
      const nlohmann::json coll_json = {{"paths", coll.paths},
                                        {"effective", coll.effective()},
                                        {"infinite", coll.infinite},
                                        {"undecided", coll.undecided},
                                        {"short_future", coll.short_future},
                                        {"invalid", coll.invalid},
                                        {"tail_assumed", coll.tail_assumed}};
      auto finish_mc = [&](TestReport& r) {
        r.discard_fraction = coll.discard_fraction();
        r.details["collection"] = coll_json;
        if (coll.invalid > 0) {
          r.verdict = Verdict::inconclusive;
          r.note = "the time specification fires more than once on some paths";
        } else if (r.discard_fraction > s.max_discard) {
          r.verdict = Verdict::inconclusive;
          r.note = "discard fraction above cap";
        } else if (coll.effective() < s.paths) {
          r.verdict = Verdict::inconclusive;
          r.note = "path budget exhausted before the sample target";
        }
      };

      PermutationOptions po;
      po.n_permutations = s.permutations;
      po.alpha = s.alpha;
      po.bins = s.bins;
      po.seed = seed;
      po.jobs = opts.jobs;
      TestReport ind = mc_independence_test(coll.z, coll.h, s.independence, po);
      finish_mc(ind);
      add("independence", std::move(ind));

      if (s.reference) {
        SampleRows ref;
        nlohmann::json ref_json;
        const std::size_t want = s.reference->paths == 0 ? s.paths : s.reference->paths;
        std::string failure;
        if (s.reference->kind == Scenario::Reference::Kind::strict_formula) {
          StrictLawOptions so;
          so.paths = want;
          so.seed = seed;
          so.jobs = opts.jobs;
          so.eval = eval;
          try {
            const StrictLawEstimate est = strict_time_law_formula(s.engine, s.budget, s.reference->functional, s.future, so);
            ref = est.samples;
            ref_json = {{"kind", "strict-formula"}, {"paths", est.paths}, {"discarded", est.discarded},
                        {"mean_a1", est.mean_a1}, {"ratio", est.ratio}, {"se", est.se}};
          } catch (const std::domain_error& e) {
            failure = e.what();
          }
        } else {
          ReferenceOptions ro;
          ro.target = want;
          ro.pilot = s.reference->pilot;
          ro.floor = s.reference->floor;
          ro.max_paths = std::max<std::size_t>(s.max_paths, want * 10);
          ro.seed = seed;
          ro.jobs = opts.jobs;
          ro.eval = eval;
          const PathEvent g = s.reference->kind == Scenario::Reference::Kind::conditional ? s.reference->event
                                                                                           : PathEvent::whole();
          ReferenceStats stats;
          try {
            ref = reference_samples(s.engine, s.budget, g, s.future, ro, &stats);
            ref_json = {{"kind", s.reference->kind == Scenario::Reference::Kind::conditional ? "conditional"
                                                                                             : "unconditional"},
                        {"tried", stats.tried},
                        {"accepted", stats.accepted},
                        {"undecided", stats.undecided},
                        {"pilot_acceptance", stats.pilot_acceptance}};
          } catch (const AcceptanceTooLow& e) {
            failure = e.what();
          }
        }
        LawTestOptions lo;
        lo.alpha = s.alpha;
        lo.bins = s.bins;
        TestReport law;
        if (failure.empty()) {
          law = mc_law_test(coll.h, ref, s.law, lo);
          law.details["reference"] = ref_json;
          plots.ecdf += quantile_rows(coll.h, "observed") + quantile_rows(ref, "reference");
        } else {
          law.kind = "monte-carlo";
          law.check = "law";
          law.statistic = to_string(s.law);
          law.verdict = Verdict::inconclusive;
          law.note = failure;
        }
        law.seeds = {seed};
        finish_mc(law);
        add("law", std::move(law));
      }

      if (s.if_identity) {
        IfIdentityConfig ic;
        ic.n_paths = s.if_identity->paths;
        ic.seed = seed;
        ic.jobs = opts.jobs;
        ic.k = s.if_identity->k;
        ic.max_discard = s.if_identity->max_discard;
        ic.eval = eval;
        add("if_identity", check_if_identity(s.engine, s.budget, s.if_identity->functional, s.if_identity->weight,
                                             s.if_identity->process, ic));
      }
    }
  } catch (const ExactBudgetExceeded& e) {
    result.exit_status = exit_code::budget;
    result.message = s.name + ": " + e.what();
    return result;
  }

  bool mismatch = false;
  bool inconclusive = false;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : result.checks) {
    nlohmann::json j = c.report;
    j["name"] = c.name;
    j["expected"] = c.expected ? nlohmann::json(to_string(*c.expected)) : nlohmann::json(nullptr);
    j["matched"] = c.matched();
    checks.push_back(std::move(j));
    if (c.matched()) continue;
    if (c.report.verdict == Verdict::inconclusive) {
      inconclusive = true;
    } else {
      mismatch = true;
    }
  }
  result.exit_status = mismatch ? exit_code::mismatch : inconclusive ? exit_code::inconclusive : exit_code::ok;

  nlohmann::json statistics = {{"past", s.past}, {"future", s.future}};
  if (!s.present.empty()) statistics["present"] = s.present;
  result.report = {{"scenario", s.name},
                   {"description", s.description},
                   {"mode", to_string(s.mode)},
                   {"seed", seed},
                   {"engine", engine_json(s.engine, s.budget)},
                   {"time", s.time},
                   {"statistics", statistics},
                   {"checks", checks},
                   {"outcome", result.exit_status == exit_code::ok         ? "ok"
                               : result.exit_status == exit_code::mismatch ? "mismatch"
                                                                           : "inconclusive"}};

  if (opts.write_files) {
    const auto dir = opts.out_dir / s.name;
    std::filesystem::create_directories(dir);
    write_text(dir / "report.json", result.report.dump(2) + "\n");
    std::ostringstream csv;
    write_summary_header(csv);
    for (const auto& c : result.checks) write_summary_row(csv, s.name, c.report);
    write_text(dir / "summary.csv", csv.str());
    if (!plots.discrepancy.empty())
      write_text(dir / "discrepancy.csv", "check,present,z,h,joint,product\n" + plots.discrepancy);
    if (!plots.ecdf.empty()) write_text(dir / "ecdf.csv", "coordinate,sample,quantile,value\n" + plots.ecdf);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    const nlohmann::json meta = {{"scenario", s.name}, {"source", s.source}, {"finished", stamp}, {"jobs", opts.jobs}};
    write_text(dir / "metadata.json", meta.dump(2) + "\n");
  }
  return result;
}

RunResult run_scenario_file(const std::filesystem::path& file, const RunOptions& opts) {
  Scenario s;
  try {
    s = load_scenario(file);
  } catch (const ScenarioError& e) {
    RunResult r;
    r.exit_status = exit_code::validation;
    r.message = e.what();
    return r;
  } catch (const BudgetGuardError& e) {
    RunResult r;
    r.exit_status = exit_code::budget;
    r.message = file.string() + ": " + e.what();
    return r;
  }
  return run_scenario(s, opts);
}

}  // namespace indtime

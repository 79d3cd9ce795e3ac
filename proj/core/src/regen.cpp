#include "indtime/regen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "indtime/parallel.hpp"

namespace indtime {

// Terminal times ---------------------------------------------------------------

TerminalTimeSpec TerminalTimeSpec::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential terminal time needs rate > 0");
  TerminalTimeSpec t;
  t.kind = Kind::exponential;
  t.rate = rate;
  return t;
}

TerminalTimeSpec TerminalTimeSpec::jump_pattern(double low, double high) {
  if (!(low < high)) throw std::invalid_argument("jump pattern needs low < high");
  TerminalTimeSpec t;
  t.kind = Kind::jump_pattern;
  t.low = low;
  t.high = high;
  return t;
}

TerminalTimeSpec TerminalTimeSpec::min_with_exponential(TerminalTimeSpec inner, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential terminal time needs rate > 0");
  TerminalTimeSpec t;
  t.kind = Kind::min_with_exponential;
  t.rate = rate;
  t.inner.push_back(std::move(inner));
  return t;
}

std::optional<double> TerminalTimeSpec::known_rate() const {
  switch (kind) {
    case Kind::infinite:
      return 0.0;
    case Kind::zero:
      return kInf;
    case Kind::exponential:
      return rate;
    case Kind::jump_pattern:
      return std::nullopt;
    case Kind::min_with_exponential: {
      const auto r = inner.at(0).known_rate();
      if (!r) return std::nullopt;
      return *r + rate;
    }
  }
  return std::nullopt;
}

namespace {

double path_horizon(const Path& p) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SequencePath>)
          return static_cast<double>(x.horizon());
        else
          return x.horizon();
      },
      p);
}

}  // namespace

TimeValue sample_itt(const TerminalTimeSpec& spec, const Path* path, Rng& rng) {
  using K = TerminalTimeSpec::Kind;
  switch (spec.kind) {
    case K::infinite:
      return TimeValue::infinite();
    case K::zero:
      return TimeValue::finite(0.0);
    case K::exponential:
      return TimeValue::finite(rng.exponential(spec.rate));
    case K::jump_pattern: {
      const auto* ev = path ? std::get_if<EventPath>(path) : nullptr;
      if (!ev) throw std::invalid_argument("jump-pattern terminal time needs an event path");
      for (std::size_t i = 0; i < ev->jump_count(); ++i) {
        const double s = ev->jump_sizes()[i];
        if (s > spec.low && s < spec.high) return TimeValue::finite(ev->jump_times()[i]);
      }
      return TimeValue::undecided();
    }
    case K::min_with_exponential: {
      const TimeValue v = sample_itt(spec.inner.at(0), path, rng);
      const double e = rng.exponential(spec.rate);
      if (v.is_infinite()) return TimeValue::finite(e);
      if (v.has_time()) return TimeValue::finite(std::min(v.time(), e));
      if (path && e <= path_horizon(*path)) return TimeValue::finite(e);
      return TimeValue::undecided();
    }
  }
  return TimeValue::undecided();
}

// Incremental functionals ------------------------------------------------------

IncrementalFunctional IncrementalFunctional::unit_drift_then_jump(double units) {
  if (!(units > 0.0)) throw std::invalid_argument("unit-drift-then-jump needs units > 0");
  IncrementalFunctional a;
  a.kind = Kind::unit_drift_then_jump;
  a.a = units;
  return a;
}

IncrementalFunctional IncrementalFunctional::eps_excursion(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps-excursion needs eps > 0");
  IncrementalFunctional a;
  a.kind = Kind::eps_excursion;
  a.a = eps;
  return a;
}

IncrementalFunctional IncrementalFunctional::weighted(IncrementalFunctional base, FutureFunctional h) {
  IncrementalFunctional a;
  a.kind = Kind::weighted;
  a.base.push_back(std::move(base));
  a.weight.push_back(std::move(h));
  return a;
}

IncrementalFunctional IncrementalFunctional::stopped(IncrementalFunctional base, TerminalTimeSpec t) {
  IncrementalFunctional a;
  a.kind = Kind::stopped;
  a.base.push_back(std::move(base));
  a.terminal.push_back(std::move(t));
  return a;
}

TerminalTimeSpec IncrementalFunctional::terminal_time() const {
  if (kind == Kind::stopped) return terminal.at(0);
  if (kind == Kind::weighted) return base.at(0).terminal_time();
  return TerminalTimeSpec::infinite();
}

double RealizedIF::value(double t) const { return mass(0.0, t); }

double RealizedIF::mass(double a, double b) const {
  double m = 0.0;
  for (const auto& atom : atoms)
    if (atom.time > a && atom.time <= b) m += atom.mass;
  if (a <= 0.0)
    for (const auto& atom : atoms)
      if (atom.time == 0.0) m += atom.mass;
  for (const auto& s : segments) {
    const double lo = std::max(a, s.begin);
    const double hi = std::min(b, s.end);
    if (hi > lo) m += s.rate * (hi - lo);
  }
  return m;
}

namespace {

std::optional<double> future_at(const FutureFunctional& h, const Path& path, double t,
                                const EvalOptions& opts) {
  if (const auto* ev = std::get_if<EventPath>(&path)) {
    if (t > ev->horizon()) return std::nullopt;
    return evaluate(h, delta_shift(*ev, t), opts.tail, opts.tol);
  }
  const SampledView v = std::holds_alternative<GridPath>(path) ? view_of(std::get<GridPath>(path))
                                                               : view_of(std::get<SequencePath>(path));
  const std::size_t i = v.index(t);
  if (i > v.last()) return std::nullopt;
  return evaluate(h, v.increments(i), opts.tail, opts.tol);
}

SampledView sampled_view(const Path& path) {
  if (const auto* g = std::get_if<GridPath>(&path)) return view_of(*g);
  if (const auto* s = std::get_if<SequencePath>(&path)) return view_of(*s);
  throw std::invalid_argument("functional needs a walk or grid path");
}

RealizedIF realize_eps_excursion(double eps, const SampledView& v, const EvalOptions& opts) {
  RealizedIF r;
  const std::size_t n = v.last();
  r.decided_until = v.horizon();
  std::vector<double> sufmax(n + 2, -kInf);
  for (std::size_t i = n + 1; i-- > 0;) sufmax[i] = std::max(sufmax[i + 1], v.at(i));
  for (std::size_t i = 0; i <= n; ++i) {
    const double base = v.at(i);
    const double target = base + eps;
    std::size_t j = i + 1;
    while (j <= n && v.at(j) > base && v.at(j) < target) ++j;
    if (j > n) {
      r.undecided.push_back(v.time(i));
      continue;
    }
    if (v.at(j) <= base) continue;
    if (j < n && sufmax[j + 1] >= target - opts.tol.value) continue;
    const Truth below = evaluate(PathEvent::never_reaches(target), SampledView{v.x.subspan(n), v.h, v.base},
                                 opts.tail, opts.tol);
    if (below.is_undecided()) {
      r.undecided.push_back(v.time(i));
      continue;
    }
    if (below.is_yes()) r.atoms.push_back({v.time(i), 1.0});
  }
  return r;
}

RealizedIF realize_drift_then_jump(double units, const EventPath& p, const EvalOptions& opts) {
  RealizedIF r;
  if (!(p.drift() > 0.0)) throw std::invalid_argument("unit-drift-then-jump needs a positive drift");
  const double u = units / p.drift();
  r.decided_until = std::max(0.0, p.horizon() - u);
  double previous = 0.0;
  for (std::size_t k = 0; k < p.jump_count(); ++k) {
    const double tau = p.jump_times()[k];
    const double t = tau - u;
    if (t >= -opts.tol.time && previous <= t + opts.tol.time * std::max(1.0, tau))
      r.atoms.push_back({std::max(0.0, t), 1.0});
    previous = tau;
  }
  return r;
}

}  // namespace

RealizedIF stopped_at(RealizedIF a, TimeValue t) {
  a.terminal = t;
  if (!t.has_time()) return a;
  const double T = t.time();
  std::erase_if(a.atoms, [T](const RealizedIF::Atom& x) { return x.time > T; });
  for (auto& s : a.segments) s.end = std::min(s.end, T);
  std::erase_if(a.segments, [](const RealizedIF::Slope& s) { return s.end <= s.begin; });
  if (T <= a.decided_until) a.decided_until = kInf;
  return a;
}

RealizedIF realize_if(const IncrementalFunctional& a, const Path& path, Rng& terminal_rng,
                      const EvalOptions& opts) {
  using K = IncrementalFunctional::Kind;
  switch (a.kind) {
    case K::lebesgue: {
      RealizedIF r;
      r.decided_until = path_horizon(path);
      r.segments.push_back({0.0, r.decided_until, 1.0});
      return r;
    }
    case K::unit_drift_then_jump: {
      const auto* ev = std::get_if<EventPath>(&path);
      if (!ev) throw std::invalid_argument("unit-drift-then-jump needs an event path");
      return realize_drift_then_jump(a.a, *ev, opts);
    }
    case K::eps_excursion:
      return realize_eps_excursion(a.a, sampled_view(path), opts);
    case K::weighted: {
      RealizedIF base = realize_if(a.base.at(0), path, terminal_rng, opts);
      const FutureFunctional& h = a.weight.at(0);
      RealizedIF r;
      r.decided_until = base.decided_until;
      r.undecided = base.undecided;
      r.terminal = base.terminal;
      for (const auto& atom : base.atoms) {
        const auto w = future_at(h, path, atom.time, opts);
        if (!w) {
          r.undecided.push_back(atom.time);
          continue;
        }
        if (*w != 0.0) r.atoms.push_back({atom.time, atom.mass * *w});
      }
      if (h.kind == FutureFunctional::Kind::constant) {
        for (auto s : base.segments) {
          s.rate *= h.u;
          r.segments.push_back(s);
        }
      } else if (!base.segments.empty()) {
        const SampledView v = sampled_view(path);
        for (const auto& s : base.segments) {
          for (std::size_t i = v.index(std::ceil(s.begin / v.h - 1e-9) * v.h); i <= v.last(); ++i) {
            if (v.time(i) >= s.end) break;
            const auto w = evaluate(h, v.increments(i), opts.tail, opts.tol);
            if (!w) {
              r.undecided.push_back(v.time(i));
              continue;
            }
            if (*w != 0.0) r.atoms.push_back({v.time(i), s.rate * v.h * *w});
          }
        }
        std::sort(r.atoms.begin(), r.atoms.end(),
                  [](const RealizedIF::Atom& x, const RealizedIF::Atom& y) { return x.time < y.time; });
      }
      return r;
    }
    case K::stopped: {
      RealizedIF base = realize_if(a.base.at(0), path, terminal_rng, opts);
      const TimeValue t = sample_itt(a.terminal.at(0), &path, terminal_rng);
      return stopped_at(std::move(base), t);
    }
  }
  throw std::logic_error("unknown functional");
}

// IF identity ------------------------------------------------------------------

double if_factor(double lambda) {
  if (lambda == 0.0) return 1.0;
  if (std::abs(lambda) < 1e-8) return 1.0 + lambda / 2.0;
  return lambda / -std::expm1(-lambda);
}

namespace {

double if_factor_derivative(double lambda) {
  if (std::abs(lambda) < 1e-6) return 0.5;
  const double q = -std::expm1(-lambda);
  return (q - lambda * std::exp(-lambda)) / (q * q);
}

struct IdentitySample {
  bool ok = false;
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
  double t = 0.0;
  std::size_t collisions = 0;
};

// [lo, hi] where M = 1 on one path.
std::pair<double, double> m_support(const PastProcessSpec& m, const Path& path) {
  switch (m.kind) {
    case PastProcessSpec::Kind::one:
      return {0.0, kInf};
    case PastProcessSpec::Kind::until:
      return {0.0, m.c};
    case PastProcessSpec::Kind::after: {
      TimeValue s;
      if (const auto* ev = std::get_if<EventPath>(&path))
        s = eval_stopping_time(m.stopping, *ev);
      else
        s = eval_stopping_time(m.stopping, sampled_view(path));
      if (!s.has_time()) return {kInf, kInf};
      return {s.time(), kInf};
    }
  }
  return {0.0, kInf};
}

// int over [lo, hi] of H(Delta_u X) * rate du.
std::optional<double> segment_integral(const RealizedIF::Slope& s, double lo, double hi,
                                       const FutureFunctional& h, const Path& path,
                                       const EvalOptions& opts, double q) {
  const double b = std::max(lo, s.begin);
  const double e = std::min(hi, s.end);
  if (!(e > b)) return 0.0;
  if (h.kind == FutureFunctional::Kind::constant) return s.rate * h.u * (e - b);
  if (!std::holds_alternative<EventPath>(path)) {
    const SampledView v = sampled_view(path);
    double sum = 0.0;
    for (std::size_t i = static_cast<std::size_t>(std::ceil(b / v.h - 1e-9)); i <= v.last(); ++i) {
      if (v.time(i) >= e) break;
      const auto w = evaluate(h, v.increments(i), opts.tail, opts.tol);
      if (!w) return std::nullopt;
      sum += *w * v.h;
    }
    return s.rate * sum;
  }
  const auto cells = static_cast<std::size_t>(std::ceil((e - b) / q));
  const double width = (e - b) / static_cast<double>(cells);
  double sum = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const auto w = future_at(h, path, b + (static_cast<double>(i) + 0.5) * width, opts);
    if (!w) return std::nullopt;
    sum += *w * width;
  }
  return s.rate * sum;
}

// int over [0, upper] of M H dA.
std::optional<double> weighted_mass(const RealizedIF& r, double upper, std::pair<double, double> msup,
                                    const FutureFunctional& h, const Path& path, const EvalOptions& opts,
                                    double q) {
  const double lo = msup.first;
  const double hi = std::min(msup.second, upper);
  double total = 0.0;
  for (const auto& atom : r.atoms) {
    if (atom.time < lo || atom.time > hi) continue;
    const auto w = future_at(h, path, atom.time, opts);
    if (!w) return std::nullopt;
    total += *w * atom.mass;
  }
  for (const auto& s : r.segments) {
    const auto v = segment_integral(s, lo, hi, h, path, opts, q);
    if (!v) return std::nullopt;
    total += *v;
  }
  return total;
}

}  // namespace

TestReport check_if_identity(const EngineSpec& engine, const SampleBudget& budget,
                             const IncrementalFunctional& a, const FutureFunctional& h,
                             const PastProcessSpec& m, const IfIdentityConfig& config) {
  const TerminalTimeSpec terminal = a.terminal_time();
  const auto known = terminal.known_rate();
  const bool t_infinite = known && *known == 0.0;
  if (t_infinite && m.kind != PastProcessSpec::Kind::until)
    throw std::invalid_argument("with an infinite terminal time M must vanish after a fixed time");

  TestReport report;
  report.kind = "monte-carlo";
  report.check = "if-identity";
  report.statistic = "lhs-minus-rhs";
  report.seeds = {config.seed};

  if (known && std::isinf(*known)) {
    report.verdict = Verdict::pass;
    report.samples = config.n_paths;
    report.details = {{"lhs", 0.0}, {"rhs", 0.0}, {"se_lhs", 0.0}, {"se_rhs", 0.0},
                      {"lambda_hat", nullptr}, {"n_paths", config.n_paths}, {"verdict", "pass"}};
    report.note = "T = 0: both sides vanish";
    return report;
  }

  std::vector<IdentitySample> samples(config.n_paths);
  parallel_chunks(config.n_paths, config.jobs, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng prng(SeedStream::of(config.seed, seed_domain::paths, i));
      Rng trng(SeedStream::of(config.seed, seed_domain::terminal, i));
      const Path path = sample_path(engine, budget, prng);
      const RealizedIF r = realize_if(a, path, trng, config.eval);
      IdentitySample& s = samples[i];
      if (r.terminal.is_undecided()) continue;
      const double T = r.terminal.has_time() ? r.terminal.time() : kInf;
      const auto msup = m_support(m, path);
      const double upper = std::isinf(T) ? msup.second : T;
      const double needed = std::max(upper, 1.0);
      if (needed > r.decided_until) continue;
      if (std::any_of(r.undecided.begin(), r.undecided.end(), [&](double u) { return u <= needed; }))
        continue;
      const auto l = weighted_mass(r, upper, msup, h, path, config.eval, config.quadrature_step);
      const auto a1 = weighted_mass(r, 1.0, {0.0, kInf}, h, path, config.eval, config.quadrature_step);
      if (!l || !a1) continue;
      s.l = *l;
      s.a = *a1;
      s.b = std::max(0.0, std::min(T, msup.second) - std::min(msup.first, std::min(T, msup.second)));
      s.t = T;
      if (std::isinf(s.b)) continue;
      if (!known && std::isinf(T)) continue;
      for (const auto& st : config.declared_stopping) {
        TimeValue sv;
        if (const auto* ev = std::get_if<EventPath>(&path))
          sv = eval_stopping_time(st, *ev);
        else
          sv = eval_stopping_time(st, sampled_view(path));
        if (!sv.has_time()) continue;
        for (const auto& atom : r.atoms)
          if (std::abs(atom.time - sv.time()) <= config.eval.tol.time) ++s.collisions;
      }
      s.ok = true;
    }
  });

  std::size_t n = 0;
  std::size_t collisions = 0;
  std::array<double, 4> mean{};
  for (const auto& s : samples) {
    if (!s.ok) continue;
    ++n;
    collisions += s.collisions;
    const std::array<double, 4> x{s.l, s.a, s.b, s.t};
    for (int j = 0; j < 4; ++j) mean[j] += (x[j] - mean[j]) / static_cast<double>(n);
  }
  report.samples = n;
  report.discard_fraction =
      config.n_paths ? static_cast<double>(config.n_paths - n) / static_cast<double>(config.n_paths) : 1.0;
  if (n < 100) {
    report.verdict = Verdict::inconclusive;
    report.note = "too few usable paths";
    return report;
  }

  const bool estimate_lambda = !known.has_value();
  std::array<std::array<double, 4>, 4> cov{};
  double half_mean[2] = {0.0, 0.0};
  double half_sq[2] = {0.0, 0.0};
  std::size_t half_n[2] = {0, 0};
  std::size_t seen = 0;
  for (const auto& s : samples) {
    if (!s.ok) continue;
    const std::array<double, 4> d{s.l - mean[0], s.a - mean[1], s.b - mean[2],
                                  estimate_lambda ? s.t - mean[3] : 0.0};
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q) cov[p][q] += d[p] * d[q];
    const int half = seen++ < n / 2 ? 0 : 1;
    ++half_n[half];
    half_mean[half] += s.l;
    half_sq[half] += s.l * s.l;
  }
  for (auto& row : cov)
    for (double& c : row) c /= static_cast<double>(n - 1);

  const double lambda = estimate_lambda ? 1.0 / mean[3] : *known;
  const double f = if_factor(lambda);
  const double lhs = mean[0];
  const double rhs = mean[1] * mean[2] * f;
  std::array<double, 4> g_rhs{0.0, mean[2] * f, mean[1] * f, 0.0};
  if (estimate_lambda) g_rhs[3] = mean[1] * mean[2] * if_factor_derivative(lambda) * (-1.0 / (mean[3] * mean[3]));
  std::array<double, 4> g_diff{1.0, -g_rhs[1], -g_rhs[2], -g_rhs[3]};
  auto quad = [&](const std::array<double, 4>& g) {
    double v = 0.0;
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q) v += g[p] * cov[p][q] * g[q];
    return std::max(0.0, v) / static_cast<double>(n);
  };
  const double se_lhs = std::sqrt(cov[0][0] / static_cast<double>(n));
  const double se_rhs = std::sqrt(quad(g_rhs));
  const double se_diff = std::sqrt(quad(g_diff));
  const double diff = lhs - rhs;

  double drift_z = 0.0;
  {
    double v[2];
    double mu[2];
    for (int k = 0; k < 2; ++k) {
      const double nk = static_cast<double>(half_n[k]);
      mu[k] = half_mean[k] / nk;
      v[k] = std::max(0.0, half_sq[k] / nk - mu[k] * mu[k]) / nk;
    }
    const double se = std::sqrt(v[0] + v[1]);
    drift_z = se > 0.0 ? std::abs(mu[0] - mu[1]) / se : (mu[0] == mu[1] ? 0.0 : kInf);
  }

  report.value = diff;
  if (report.discard_fraction > config.max_discard) {
    report.verdict = Verdict::inconclusive;
    report.note = "discard fraction above cap";
  } else if (!std::isfinite(lhs) || !std::isfinite(rhs) || drift_z > 5.0) {
    report.verdict = Verdict::inconclusive;
    report.note = "estimates not stable within budget";
  } else {
    report.verdict = std::abs(diff) <= config.k * se_diff ? Verdict::pass : Verdict::fail;
  }
  report.details = {{"lhs", lhs},
                    {"rhs", rhs},
                    {"se_lhs", se_lhs},
                    {"se_rhs", se_rhs},
                    {"se_diff", se_diff},
                    {"k", config.k},
                    {"lambda_hat", lambda},
                    {"lambda_estimated", estimate_lambda},
                    {"n_paths", config.n_paths},
                    {"usable_paths", n},
                    {"atom_collisions", collisions},
                    {"collision_check", "checked against declared family"},
                    {"half_sample_z", drift_z},
                    {"verdict", to_string(report.verdict)}};
  return report;
}

// Serialization ----------------------------------------------------------------

void to_json(nlohmann::json& j, const TerminalTimeSpec& t) {
  using K = TerminalTimeSpec::Kind;
  switch (t.kind) {
    case K::infinite:
      j = {{"kind", "infinite"}};
      break;
    case K::zero:
      j = {{"kind", "zero"}};
      break;
    case K::exponential:
      j = {{"kind", "exponential"}, {"rate", t.rate}};
      break;
    case K::jump_pattern:
      j = {{"kind", "jump-pattern"}, {"low", t.low}, {"high", t.high}};
      break;
    case K::min_with_exponential:
      j = {{"kind", "min-with-exponential"}, {"rate", t.rate}, {"inner", t.inner.at(0)}};
      break;
  }
}

void to_json(nlohmann::json& j, const IncrementalFunctional& a) {
  using K = IncrementalFunctional::Kind;
  switch (a.kind) {
    case K::lebesgue:
      j = {{"kind", "lebesgue"}};
      break;
    case K::unit_drift_then_jump:
      j = {{"kind", "unit-drift-then-jump"}, {"units", a.a}};
      break;
    case K::eps_excursion:
      j = {{"kind", "eps-excursion"}, {"eps", a.a}};
      break;
    case K::weighted:
      j = {{"kind", "weighted"}, {"base", a.base.at(0)}, {"weight", a.weight.at(0)}};
      break;
    case K::stopped:
      j = {{"kind", "stopped"}, {"base", a.base.at(0)}, {"terminal", a.terminal.at(0)}};
      break;
  }
}

void to_json(nlohmann::json& j, const PastProcessSpec& m) {
  switch (m.kind) {
    case PastProcessSpec::Kind::one:
      j = {{"kind", "one"}};
      break;
    case PastProcessSpec::Kind::until:
      j = {{"kind", "until"}, {"time", m.c}};
      break;
    case PastProcessSpec::Kind::after:
      j = {{"kind", "after"}, {"stopping", m.stopping}};
      break;
  }
}

}  // namespace indtime

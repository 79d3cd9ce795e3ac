#include "indtime/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "indtime/parallel.hpp"

namespace indtime {

namespace {

std::uint64_t power_saturating(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base)
      return std::numeric_limits<std::uint64_t>::max();
    out *= base;
  }
  return out;
}

// Visits step sequences [begin, end) of length len in lexicographic order
// (first step most significant) as walks from 0 with their weights.
template <class Visit>
void visit_range(const ExactModel& m, std::size_t len, std::uint64_t begin, std::uint64_t end, Visit&& visit) {
  const std::size_t k = m.alphabet.size();
  std::vector<std::size_t> digits(len, 0);
  std::uint64_t s = begin;
  for (std::size_t i = len; i-- > 0;) {
    digits[i] = static_cast<std::size_t>(s % k);
    s /= k;
  }
  std::vector<double> x(len + 1, 0.0);
  std::vector<long double> w(len + 1, 1.0L);
  auto rebuild = [&](std::size_t from) {
    for (std::size_t i = from; i < len; ++i) {
      x[i + 1] = x[i] + m.alphabet[digits[i]];
      w[i + 1] = w[i] * static_cast<long double>(m.probs[digits[i]]);
    }
  };
  rebuild(0);
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    visit(std::span<const double>(x), std::span<const std::size_t>(digits), w[len]);
    std::size_t j = len;
    while (j > 0) {
      --j;
      if (++digits[j] < k) break;
      digits[j] = 0;
    }
    rebuild(j);
  }
}

std::optional<std::pair<std::vector<CharClause>, double>> clauses_of(const TimeSpec& r) {
  if (r.kind == TimeSpec::Kind::char_time) return std::make_pair(r.clauses, r.max_time);
  if (r.kind == TimeSpec::Kind::last_sup && r.last_sup.variant == LastSupSpec::Variant::discrete)
    return std::make_pair(last_sup_clauses(r.last_sup.window), r.last_sup.max_time);
  return std::nullopt;
}

std::size_t last_index(double max_time, std::size_t horizon) {
  if (max_time >= static_cast<double>(horizon)) return horizon;
  return static_cast<std::size_t>(std::floor(max_time + 1e-9));
}

std::uint64_t factored_count(const ExactModel& m, std::size_t n_max) {
  const std::uint64_t k = m.alphabet.size();
  std::uint64_t total = 0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const std::uint64_t a = power_saturating(k, n);
    const std::uint64_t b = power_saturating(k, m.horizon - n);
    if (a > kExactBudget || b > kExactBudget) return std::numeric_limits<std::uint64_t>::max();
    total += a + b;
  }
  return total;
}

Cell evaluate_all(const std::vector<PastStatistic>& zs, const SampledView& past, const Tolerance& tol) {
  Cell out;
  out.reserve(zs.size());
  for (const auto& z : zs) out.push_back(evaluate(z, past, tol));
  return out;
}

// False when some functional reads past the horizon.
bool append_future(Cell& key, const std::vector<FutureFunctional>& hs, const SampledView& future,
                   const EvalOptions& opts) {
  for (const auto& h : hs) {
    const auto v = evaluate(h, future, opts.tail, opts.tol);
    if (!v) return false;
    key.push_back(*v);
  }
  return true;
}

void merge_into(ExactTally& into, ExactTally&& part) {
  into.total += part.total;
  into.finite += part.finite;
  into.infinite += part.infinite;
  into.undecided += part.undecided;
  into.tail_assumed += part.tail_assumed;
  into.invalid += part.invalid;
  into.sequences += part.sequences;
  for (auto& [present, table] : part.cells) {
    auto& dst = into.cells[present];
    for (auto& [cell, mass] : table) dst[cell] += mass;
  }
}

ExactTally tally_full(const ExactModel& model, const TimeSpec& r, const std::vector<PastStatistic>& z,
                      const std::vector<FutureFunctional>& h, const std::vector<PastStatistic>& present,
                      const ExactOptions& opts) {
  const std::uint64_t count = model.sequence_count();
  const unsigned jobs = chunk_count(count, opts.jobs);
  std::vector<ExactTally> parts(jobs);
  const TimeContext ctx{opts.eval, {}};
  parallel_chunks(count, jobs, [&](std::size_t c, std::size_t begin, std::size_t end) {
    ExactTally& t = parts[c];
    visit_range(model, model.horizon, begin, end,
                [&](std::span<const double> x, std::span<const std::size_t>, long double w) {
                  t.total += w;
                  ++t.sequences;
                  const SampledView v{x, 1.0, 0.0};
                  TimeValue tv;
                  try {
                    tv = evaluate(r, v, ctx);
                  } catch (const InvalidTimeConstruction&) {
                    t.invalid += w;
                    return;
                  }
                  if (tv.is_undecided()) {
                    t.undecided += w;
                    return;
                  }
                  if (tv.is_infinite()) {
                    t.infinite += w;
                    return;
                  }
                  const std::size_t i = v.index(tv.time());
                  if (i > v.last()) {
                    t.undecided += w;
                    return;
                  }
                  const SampledView past = v.prefix(i);
                  Cell key = evaluate_all(z, past, opts.eval.tol);
                  if (!append_future(key, h, v.increments(i), opts.eval)) {
                    t.undecided += w;
                    return;
                  }
                  t.finite += w;
                  if (tv.kind() == TimeValue::Kind::tail_assumed) t.tail_assumed += w;
                  t.cells[evaluate_all(present, past, opts.eval.tol)][std::move(key)] += w;
                });
  });
  ExactTally out;
  for (auto& p : parts) merge_into(out, std::move(p));
  return out;
}

// Number of increment steps an event reads; infinite when tail dependent
// or not bounded in steps.
double event_reach(const PathEvent& e) {
  using K = PathEvent::Kind;
  switch (e.kind) {
    case K::whole:
    case K::empty:
      return 0.0;
    case K::step_eq:
      return static_cast<double>(e.k);
    case K::stays_below:
      return std::ceil(e.to - 1e-9);
    case K::all_of:
    case K::any_of:
    case K::negate: {
      double r = 0.0;
      for (const auto& x : e.args) r = std::max(r, event_reach(x));
      return r;
    }
    default:
      return kInf;
  }
}

// Mass of sequences on which two indices n <= n_max fire. Enumerates the
// shortest horizon that decides every firing up to n_max.
long double overlap_mass(const ExactModel& model, const std::vector<CharClause>& clauses, std::size_t n_max,
                         const ExactOptions& opts) {
  double reach = 0.0;
  for (const auto& c : clauses) reach = std::max(reach, event_reach(c.future));
  const std::size_t len =
      reach >= static_cast<double>(model.horizon) ? model.horizon
                                                  : std::min(model.horizon, n_max + static_cast<std::size_t>(reach));
  const std::uint64_t count = power_saturating(model.alphabet.size(), len);
  if (count > opts.budget) throw ExactBudgetExceeded("exact model: disjointness check of the factored route exceeds the budget");
  const unsigned jobs = chunk_count(count, opts.jobs);
  std::vector<long double> parts(jobs, 0.0L);
  const std::size_t last = std::min(n_max, len);
  parallel_chunks(count, jobs, [&](std::size_t c, std::size_t begin, std::size_t end) {
    visit_range(model, len, begin, end, [&](std::span<const double> x, std::span<const std::size_t>, long double w) {
      const SampledView v{x, 1.0, 0.0};
      int fired = 0;
      for (std::size_t n = 0; n <= last && fired < 2; ++n) {
        for (const auto& clause : clauses) {
          if (!evaluate(clause.past, v.prefix(n), opts.eval.tol)) continue;
          if (evaluate(clause.future, v.increments(n), opts.eval.tail, opts.eval.tol).is_yes()) {
            ++fired;
            break;
          }
        }
      }
      if (fired >= 2) parts[c] += w;
    });
  });
  long double out = 0;
  for (long double p : parts) out += p;
  return out;
}

ExactTally tally_factored(const ExactModel& model, const std::vector<CharClause>& clauses, double max_time,
                          const std::vector<PastStatistic>& z, const std::vector<FutureFunctional>& h,
                          const std::vector<PastStatistic>& present, const ExactOptions& opts) {
  const std::size_t L = model.horizon;
  const std::size_t n_max = last_index(max_time, L);
  const std::uint64_t k = model.alphabet.size();
  ExactTally out;
  out.route = ExactRoute::factored;
  long double sum_p = 0;
  for (double p : model.probs) sum_p += static_cast<long double>(p);
  out.total = std::pow(sum_p, static_cast<long double>(L));

  for (std::size_t n = 0; n <= n_max; ++n) {
    const std::uint64_t n_prefix = power_saturating(k, n);
    const std::uint64_t n_suffix = power_saturating(k, L - n);
    for (const auto& clause : clauses) {
      std::map<std::pair<Cell, Cell>, long double> past_mass;
      visit_range(model, n, 0, n_prefix, [&](std::span<const double> x, std::span<const std::size_t>, long double w) {
        const SampledView v{x, 1.0, 0.0};
        if (!evaluate(clause.past, v, opts.eval.tol)) return;
        past_mass[{evaluate_all(present, v, opts.eval.tol), evaluate_all(z, v, opts.eval.tol)}] += w;
      });
      out.sequences += n_prefix;
      if (past_mass.empty()) continue;

      LawTable future_mass;
      long double undecided = 0;
      long double assumed = 0;
      visit_range(model, L - n, 0, n_suffix, [&](std::span<const double> x, std::span<const std::size_t>, long double w) {
        const SampledView v{x, 1.0, 0.0};
        const Truth g = evaluate(clause.future, v, opts.eval.tail, opts.eval.tol);
        if (g.is_no()) return;
        if (g.is_undecided()) {
          undecided += w;
          return;
        }
        Cell key;
        if (!append_future(key, h, v, opts.eval)) {
          undecided += w;
          return;
        }
        future_mass[std::move(key)] += w;
        if (g.assumed) assumed += w;
      });
      out.sequences += n_suffix;

      long double past_total = 0;
      long double future_total = 0;
      for (const auto& [key, w] : past_mass) past_total += w;
      for (const auto& [key, w] : future_mass) future_total += w;
      for (const auto& [key, pw] : past_mass) {
        auto& table = out.cells[key.first];
        for (const auto& [hk, hw] : future_mass) {
          Cell cell = key.second;
          cell.insert(cell.end(), hk.begin(), hk.end());
          table[std::move(cell)] += pw * hw;
        }
      }
      out.finite += past_total * future_total;
      out.tail_assumed += past_total * assumed;
      out.undecided += past_total * undecided;
    }
  }
  out.invalid = overlap_mass(model, clauses, n_max, opts);
  out.infinite = std::max<long double>(0, out.total - out.finite - out.undecided);
  if (max_time > static_cast<double>(L)) {
    out.undecided += out.infinite;
    out.infinite = 0;
  }
  return out;
}

ExactRoute choose_route(const ExactModel& model, const TimeSpec& r, const ExactOptions& opts) {
  const auto clauses = clauses_of(r);
  const bool fits = model.sequence_count() <= opts.budget;
  switch (opts.route) {
    case ExactRoute::full:
      return ExactRoute::full;
    case ExactRoute::factored:
      if (!clauses) throw std::invalid_argument("factored exact route needs a char-time");
      return ExactRoute::factored;
    case ExactRoute::automatic:
      if (fits || !clauses) return ExactRoute::full;
      return ExactRoute::factored;
  }
  return ExactRoute::full;
}

long double table_mass(const LawTable& t) {
  long double s = 0;
  for (const auto& [cell, w] : t) s += w;
  return s;
}

double slice_discrepancy(const LawTable& table, std::size_t z_dim, nlohmann::json* rows, const Cell& present) {
  const long double mass = table_mass(table);
  if (mass <= 0) return 0.0;
  std::map<Cell, long double> zm;
  std::map<Cell, long double> hm;
  for (const auto& [cell, w] : table) {
    zm[Cell(cell.begin(), cell.begin() + static_cast<std::ptrdiff_t>(z_dim))] += w;
    hm[Cell(cell.begin() + static_cast<std::ptrdiff_t>(z_dim), cell.end())] += w;
  }
  long double worst = 0;
  for (const auto& [zc, zw] : zm) {
    for (const auto& [hc, hw] : hm) {
      Cell key = zc;
      key.insert(key.end(), hc.begin(), hc.end());
      const auto it = table.find(key);
      const long double joint = it == table.end() ? 0.0L : it->second / mass;
      const long double product = (zw / mass) * (hw / mass);
      const long double d = std::fabs(joint - product);
      worst = std::max(worst, d);
      if (rows != nullptr && rows->size() < 5000) {
        rows->push_back({{"present", present},
                         {"z", zc},
                         {"h", hc},
                         {"joint", static_cast<double>(joint)},
                         {"product", static_cast<double>(product)}});
      }
    }
  }
  return static_cast<double>(worst);
}

const char* route_name(ExactRoute r) {
  switch (r) {
    case ExactRoute::full:
      return "full";
    case ExactRoute::factored:
      return "factored";
    case ExactRoute::automatic:
      return "automatic";
  }
  return "full";
}

nlohmann::json law_json(const LawTable& t) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [cell, p] : t) out.push_back({{"cell", cell}, {"p", static_cast<double>(p)}});
  return out;
}

TestReport report_from(const ExactTally& t, const std::string& check, const ExactOptions& opts) {
  TestReport r;
  r.kind = "exact";
  r.check = check;
  r.statistic = "max-abs-discrepancy";
  r.samples = t.sequences;
  nlohmann::json rows = nlohmann::json::array();
  double worst = 0.0;
  for (const auto& [present, table] : t.cells) worst = std::max(worst, slice_discrepancy(table, t.z_dim, &rows, present));
  r.value = worst;
  const long double lost = t.undecided + t.invalid;
  r.discard_fraction = t.total > 0 ? static_cast<double>(lost / t.total) : 0.0;
  r.details = {{"route", route_name(t.route)},
               {"p_finite", t.total > 0 ? static_cast<double>(t.finite / t.total) : 0.0},
               {"p_infinite", t.total > 0 ? static_cast<double>(t.infinite / t.total) : 0.0},
               {"undecided_mass", t.total > 0 ? static_cast<double>(t.undecided / t.total) : 0.0},
               {"tail_assumed_mass", t.total > 0 ? static_cast<double>(t.tail_assumed / t.total) : 0.0},
               {"invalid_mass", t.total > 0 ? static_cast<double>(t.invalid / t.total) : 0.0},
               {"slices", t.cells.size()},
               {"tolerance", opts.tolerance},
               {"table", std::move(rows)}};
  if (t.invalid > 0) {
    r.verdict = Verdict::inconclusive;
    r.note = "the time specification fires more than once on some sequences";
  } else if (r.discard_fraction > opts.max_undecided) {
    r.verdict = Verdict::inconclusive;
    r.note = "undecided mass above cap";
  } else if (t.finite <= 0) {
    r.verdict = Verdict::inconclusive;
    r.note = "R is infinite on every sequence";
  } else {
    r.verdict = worst <= opts.tolerance ? Verdict::pass : Verdict::fail;
  }
  return r;
}

std::vector<double> steps_of(const ExactModel& m, std::uint64_t index, std::size_t len) {
  std::vector<double> out(len);
  const std::uint64_t k = m.alphabet.size();
  for (std::size_t i = len; i-- > 0;) {
    out[i] = m.alphabet[index % k];
    index /= k;
  }
  return out;
}

}  // namespace

// Model ------------------------------------------------------------------------

ExactModel ExactModel::from_law(const StepLaw& law, std::size_t horizon) {
  if (!law.is_finite()) throw std::invalid_argument("exact model needs a finite step law, got " + law.describe());
  ExactModel m;
  const auto values = law.support();
  const auto probs = law.probabilities();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    m.alphabet.push_back(values[i]);
    m.probs.push_back(probs[i]);
  }
  m.horizon = horizon;
  return m;
}

std::uint64_t ExactModel::sequence_count() const noexcept { return power_saturating(alphabet.size(), horizon); }

void ExactModel::validate(std::uint64_t budget) const {
  if (alphabet.empty() || alphabet.size() != probs.size())
    throw std::invalid_argument("exact model: alphabet and probabilities must be non-empty and of equal size");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw std::invalid_argument("exact model: probabilities must be positive");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw std::invalid_argument("exact model: probabilities must sum to 1");
  if (sequence_count() > budget)
    throw ExactBudgetExceeded("exact model: " + std::to_string(alphabet.size()) + "^" + std::to_string(horizon) +
                              " sequences exceed the budget of " + std::to_string(budget));
}

// Tallies ----------------------------------------------------------------------

ExactTally exact_tally(const ExactModel& model, const TimeSpec& r, const std::vector<PastStatistic>& z,
                       const std::vector<FutureFunctional>& h, const std::vector<PastStatistic>& present,
                       const ExactOptions& opts) {
  model.validate(std::numeric_limits<std::uint64_t>::max());
  const ExactRoute route = choose_route(model, r, opts);
  ExactTally t;
  if (route == ExactRoute::full) {
    model.validate(opts.budget);
    t = tally_full(model, r, z, h, present, opts);
  } else {
    const auto clauses = clauses_of(r);
    if (factored_count(model, last_index(clauses->second, model.horizon)) > opts.budget)
      throw ExactBudgetExceeded("exact model: factored route exceeds the budget");
    t = tally_factored(model, clauses->first, clauses->second, z, h, present, opts);
  }
  t.z_dim = z.size();
  return t;
}

double max_discrepancy(const ExactTally& tally) {
  double worst = 0.0;
  for (const auto& [present, table] : tally.cells)
    worst = std::max(worst, slice_discrepancy(table, tally.z_dim, nullptr, present));
  return worst;
}

TestReport exact_independence_check(const ExactModel& model, const TimeSpec& r, const std::vector<PastStatistic>& z,
                                    const std::vector<FutureFunctional>& h, const ExactOptions& opts) {
  return report_from(exact_tally(model, r, z, h, {}, opts), "independence", opts);
}

TestReport exact_cond_independence_check(const ExactModel& model, const TimeSpec& r,
                                         const std::vector<PastStatistic>& z,
                                         const std::vector<FutureFunctional>& h,
                                         const std::vector<PastStatistic>& present, const ExactOptions& opts) {
  return report_from(exact_tally(model, r, z, h, present, opts), "conditional", opts);
}

// Laws -------------------------------------------------------------------------

LawTable exact_law(const ExactModel& model, const TimeSpec& r, const std::vector<FutureFunctional>& h,
                   const ExactOptions& opts) {
  const ExactTally t = exact_tally(model, r, {}, h, {}, opts);
  LawTable out;
  if (t.finite <= 0) return out;
  for (const auto& [present, table] : t.cells)
    for (const auto& [cell, w] : table) out[cell] += w / t.finite;
  return out;
}

LawTable exact_reference_law(const ExactModel& model, const PathEvent& g, const std::vector<FutureFunctional>& h,
                             const ExactOptions& opts) {
  model.validate(opts.budget);
  const std::uint64_t count = model.sequence_count();
  const unsigned jobs = chunk_count(count, opts.jobs);
  std::vector<LawTable> parts(jobs);
  parallel_chunks(count, jobs, [&](std::size_t c, std::size_t begin, std::size_t end) {
    visit_range(model, model.horizon, begin, end,
                [&](std::span<const double> x, std::span<const std::size_t>, long double w) {
                  const SampledView v{x, 1.0, 0.0};
                  if (!evaluate(g, v, opts.eval.tail, opts.eval.tol).is_yes()) return;
                  Cell key;
                  if (!append_future(key, h, v, opts.eval)) return;
                  parts[c][std::move(key)] += w;
                });
  });
  LawTable out;
  for (auto& p : parts)
    for (auto& [cell, w] : p) out[cell] += w;
  const long double mass = table_mass(out);
  if (mass > 0)
    for (auto& [cell, w] : out) w /= mass;
  return out;
}

double law_distance(const LawTable& a, const LawTable& b) {
  long double worst = 0;
  for (const auto& [cell, p] : a) {
    const auto it = b.find(cell);
    worst = std::max(worst, std::fabs(p - (it == b.end() ? 0.0L : it->second)));
  }
  for (const auto& [cell, p] : b)
    if (!a.contains(cell)) worst = std::max(worst, std::fabs(p));
  return static_cast<double>(worst);
}

TestReport exact_law_check(const ExactModel& model, const TimeSpec& r, const std::vector<FutureFunctional>& h,
                           const PathEvent& g, const ExactOptions& opts) {
  const LawTable observed = exact_law(model, r, h, opts);
  const LawTable reference = exact_reference_law(model, g, h, opts);
  TestReport rep;
  rep.kind = "exact";
  rep.check = "law";
  rep.statistic = "max-abs-discrepancy";
  rep.value = law_distance(observed, reference);
  rep.samples = model.sequence_count();
  rep.details = {{"observed", law_json(observed)}, {"reference", law_json(reference)}, {"tolerance", opts.tolerance}};
  if (observed.empty() || reference.empty()) {
    rep.verdict = Verdict::inconclusive;
    rep.note = observed.empty() ? "R is infinite on every sequence" : "reference event has no mass";
  } else {
    rep.verdict = rep.value <= opts.tolerance ? Verdict::pass : Verdict::fail;
  }
  return rep;
}

// Factorization ----------------------------------------------------------------

Factorization factorize_event(const ExactModel& model, const TimeSpec& r, std::size_t n, const ExactOptions& opts) {
  model.validate(opts.budget);
  const std::size_t L = model.horizon;
  if (n > L) throw std::invalid_argument("factorize_event: index beyond the horizon");
  const std::uint64_t k = model.alphabet.size();
  const std::uint64_t np = power_saturating(k, n);
  const std::uint64_t ns = power_saturating(k, L - n);
  const std::uint64_t count = np * ns;

  // 0: R != n, 1: R = n, 2: undecided or invalid
  std::vector<std::uint8_t> fires(count, 0);
  const TimeContext ctx{opts.eval, {}};
  parallel_chunks(count, opts.jobs, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::uint64_t s = begin;
    visit_range(model, L, begin, end, [&](std::span<const double> x, std::span<const std::size_t>, long double) {
      const SampledView v{x, 1.0, 0.0};
      std::uint8_t code = 0;
      try {
        const TimeValue tv = evaluate(r, v, ctx);
        if (tv.is_undecided()) {
          code = 2;
        } else if (tv.has_time() && v.index(tv.time()) == n) {
          code = 1;
        }
      } catch (const InvalidTimeConstruction&) {
        code = 2;
      }
      fires[s++] = code;
    });
  });

  std::vector<long double> wp(np);
  std::vector<long double> wq(ns);
  {
    std::uint64_t i = 0;
    visit_range(model, n, 0, np, [&](auto, auto, long double w) { wp[i++] = w; });
    i = 0;
    visit_range(model, L - n, 0, ns, [&](auto, auto, long double w) { wq[i++] = w; });
  }
  std::vector<long double> a(np, 0);
  std::vector<long double> b(ns, 0);
  for (std::uint64_t p = 0; p < np; ++p)
    for (std::uint64_t q = 0; q < ns; ++q)
      if (fires[p * ns + q] == 1) {
        a[p] += wq[q];
        b[q] += wp[p];
      }
  long double c = 0;
  for (std::uint64_t p = 0; p < np; ++p) c += wp[p] * a[p];
  if (c <= 0) throw std::domain_error("factorize_event: P(R = " + std::to_string(n) + ") = 0");

  long double residual = 0;
  for (std::uint64_t p = 0; p < np; ++p)
    for (std::uint64_t q = 0; q < ns; ++q) {
      const std::uint8_t code = fires[p * ns + q];
      if (code == 2) continue;
      residual = std::max(residual, std::fabs((code == 1 ? 1.0L : 0.0L) - a[p] * b[q] / c));
    }

  Factorization f;
  f.n = n;
  f.probability = c;
  f.residual = static_cast<double>(residual);
  f.factorizable = f.residual <= opts.tolerance;
  if (f.factorizable) {
    for (std::uint64_t p = 0; p < np; ++p)
      if (a[p] > 0) f.prefixes.push_back(steps_of(model, p, n));
    for (std::uint64_t q = 0; q < ns; ++q)
      if (b[q] > 0) f.suffixes.push_back(steps_of(model, q, L - n));
  }
  return f;
}

std::optional<std::vector<std::vector<double>>> project_suffixes(const ExactModel& model, const Factorization& f,
                                                                 std::size_t depth) {
  const std::size_t len = model.horizon - f.n;
  if (depth > len) throw std::invalid_argument("project_suffixes: depth exceeds the suffix length");
  auto weight = [&](std::span<const double> steps) {
    long double w = 1;
    for (double s : steps) {
      const auto it = std::find(model.alphabet.begin(), model.alphabet.end(), s);
      w *= static_cast<long double>(model.probs[static_cast<std::size_t>(it - model.alphabet.begin())]);
    }
    return w;
  };
  std::map<std::vector<double>, long double> inside;
  for (const auto& q : f.suffixes) {
    std::vector<double> head(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(depth));
    inside[head] += weight(std::span<const double>(q).subspan(depth));
  }
  std::vector<std::vector<double>> out;
  for (const auto& [head, w] : inside) {
    // The cylinder over `head` has conditional mass 1 when fully inside G.
    if (std::fabs(w - 1.0L) <= 1e-12L) {
      out.push_back(head);
    } else if (w > 1e-12L) {
      return std::nullopt;
    }
  }
  return out;
}

TestReport check_factorization(const ExactModel& model, const TimeSpec& r, std::size_t first, std::size_t last,
                               const ExactOptions& opts) {
  TestReport rep;
  rep.kind = "exact";
  rep.check = "factorization";
  rep.statistic = "max-residual";
  const std::size_t depth = model.horizon - std::min(last, model.horizon);
  nlohmann::json per_index = nlohmann::json::array();
  std::optional<std::vector<std::vector<double>>> common;
  bool all_factorize = true;
  bool agree = true;
  std::size_t used = 0;
  for (std::size_t n = first; n <= last && n <= model.horizon; ++n) {
    Factorization f;
    try {
      f = factorize_event(model, r, n, opts);
    } catch (const std::domain_error&) {
      per_index.push_back({{"n", n}, {"probability", 0.0}});
      continue;
    }
    ++used;
    rep.samples += model.sequence_count();
    rep.value = std::max(rep.value, f.residual);
    nlohmann::json entry = {{"n", n},
                            {"probability", static_cast<double>(f.probability)},
                            {"residual", f.residual},
                            {"factorizable", f.factorizable},
                            {"prefixes", f.prefixes.size()},
                            {"suffixes", f.suffixes.size()}};
    if (!f.factorizable) {
      all_factorize = false;
    } else {
      const auto projected = project_suffixes(model, f, depth);
      entry["projected"] = projected ? nlohmann::json(*projected) : nlohmann::json(nullptr);
      if (!projected) {
        agree = false;
      } else if (!common) {
        common = projected;
      } else if (*common != *projected) {
        agree = false;
      }
    }
    per_index.push_back(std::move(entry));
  }
  rep.details = {{"depth", depth}, {"indices", std::move(per_index)}};
  if (common) rep.details["common_g"] = *common;
  if (used == 0) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "no index with positive mass";
  } else if (!all_factorize) {
    rep.verdict = Verdict::fail;
    rep.note = "not factorizable";
  } else if (!agree) {
    rep.verdict = Verdict::fail;
    rep.note = "increment events differ across indices";
  } else {
    rep.verdict = Verdict::pass;
  }
  return rep;
}

}  // namespace indtime

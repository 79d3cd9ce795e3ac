#include "indtime/reference.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "indtime/parallel.hpp"

namespace indtime {

namespace {

enum class Status { effective, infinite, undecided, short_future, invalid };

struct Record {
  Status status = Status::infinite;
  bool assumed = false;
  double t = 0.0;
  std::vector<double> z;
  std::vector<double> h;
  std::vector<double> present;
};

// Runs map(i, path) for paths first..first+count-1 of `domain` in parallel and
// returns the results in index order.
template <class T, class Map>
std::vector<T> map_paths(const EngineSpec& engine, const SampleBudget& budget, std::uint64_t seed,
                         std::uint16_t domain, std::uint64_t first, std::size_t count, unsigned jobs, Map&& map) {
  std::vector<T> out(count);
  parallel_chunks(count, jobs, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Rng rng(SeedStream::of(seed, domain, first + k));
      const Path path = sample_path(engine, budget, rng);
      out[k] = map(first + k, path);
    }
  });
  return out;
}

double horizon_of(const Path& path) {
  return std::visit(
      [](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SequencePath>) {
          return static_cast<double>(p.horizon());
        } else {
          return p.horizon();
        }
      },
      path);
}

}  // namespace

double McCollection::discard_fraction() const noexcept {
  const std::size_t lost = undecided + short_future + invalid;
  const std::size_t all = lost + effective();
  return all == 0 ? 0.0 : static_cast<double>(lost) / static_cast<double>(all);
}

McCollection collect_samples(const EngineSpec& engine, const SampleBudget& budget, const TimeSpec& r,
                             const std::vector<PastStatistic>& z, const std::vector<FutureFunctional>& h,
                             const CollectOptions& opts, const std::vector<PastStatistic>& present) {
  McCollection out;
  auto per_path = [&](std::uint64_t i, const Path& path) {
    Record rec;
    const TimeContext ctx{opts.eval, SeedStream::of(opts.seed, seed_domain::terminal, i)};
    TimeValue tv;
    try {
      tv = evaluate(r, path, ctx);
    } catch (const InvalidTimeConstruction&) {
      rec.status = Status::invalid;
      return rec;
    }
    if (tv.is_undecided()) {
      rec.status = Status::undecided;
      return rec;
    }
    if (tv.is_infinite()) return rec;
    rec.t = tv.time();
    if (rec.t > horizon_of(path)) {
      rec.status = Status::short_future;
      return rec;
    }
    rec.assumed = tv.kind() == TimeValue::Kind::tail_assumed;
    for (const auto& f : h) {
      const auto v = future_at(f, path, rec.t, opts.eval);
      if (!v) {
        rec.status = Status::short_future;
        return rec;
      }
      rec.h.push_back(*v);
    }
    for (const auto& s : z) rec.z.push_back(past_at(s, path, rec.t, opts.eval.tol));
    for (const auto& s : present) rec.present.push_back(past_at(s, path, rec.t, opts.eval.tol));
    rec.status = Status::effective;
    return rec;
  };

  std::uint64_t next = 0;
  while (out.effective() < opts.target) {
    if (next >= opts.max_paths) {
      out.exhausted = true;
      break;
    }
    const std::size_t count = std::min<std::size_t>(opts.batch, opts.max_paths - next);
    auto records = map_paths<Record>(engine, budget, opts.seed, seed_domain::paths, next, count, opts.jobs, per_path);
    for (auto& rec : records) {
      if (out.effective() >= opts.target) break;
      ++out.paths;
      switch (rec.status) {
        case Status::effective:
          out.z.push_back(std::move(rec.z));
          out.h.push_back(std::move(rec.h));
          out.present.push_back(std::move(rec.present));
          out.times.push_back(rec.t);
          if (rec.assumed) ++out.tail_assumed;
          break;
        case Status::infinite:
          ++out.infinite;
          break;
        case Status::undecided:
          ++out.undecided;
          break;
        case Status::short_future:
          ++out.short_future;
          break;
        case Status::invalid:
          ++out.invalid;
          break;
      }
    }
    next += count;
  }
  return out;
}

// Reference laws ------------------------------------------------------------------

Truth evaluate_on_path(const PathEvent& g, const Path& path, const EvalOptions& opts) {
  if (const auto* ev = std::get_if<EventPath>(&path)) return evaluate(g, *ev, opts.tail, opts.tol);
  if (const auto* grid = std::get_if<GridPath>(&path)) return evaluate(g, view_of(*grid), opts.tail, opts.tol);
  const auto& seq = std::get<SequencePath>(path);
  const SequencePath walk = seq.role() == SequenceRole::values ? seq.cumulative() : seq;
  return evaluate(g, view_of(walk), opts.tail, opts.tol);
}

ReferenceStats reference_conditional_sampler(const EngineSpec& engine, const SampleBudget& budget,
                                             const PathEvent& g, const ReferenceOptions& opts,
                                             const std::function<bool(const Path&)>& sink) {
  ReferenceStats stats;
  if (opts.pilot > 0) {
    const auto hits = map_paths<char>(engine, budget, opts.seed, seed_domain::pilot, 0, opts.pilot, opts.jobs,
                                      [&](std::uint64_t, const Path& p) -> char {
                                        return evaluate_on_path(g, p, opts.eval).is_yes() ? 1 : 0;
                                      });
    std::size_t yes = 0;
    for (char c : hits) yes += static_cast<std::size_t>(c);
    stats.pilot_acceptance = static_cast<double>(yes) / static_cast<double>(opts.pilot);
    if (stats.pilot_acceptance < opts.floor)
      throw AcceptanceTooLow("reference event accepted " + std::to_string(yes) + " of " +
                             std::to_string(opts.pilot) + " pilot paths");
  }
  std::uint64_t next = 0;
  bool more = true;
  while (more && stats.accepted < opts.target && next < opts.max_paths) {
    const std::size_t count = std::min<std::size_t>(opts.batch, opts.max_paths - next);
    struct Draw {
      Truth truth;
      Path path;
    };
    auto batch = map_paths<Draw>(engine, budget, opts.seed, seed_domain::reference, next, count, opts.jobs,
                                 [&](std::uint64_t, const Path& p) {
                                   Draw d{evaluate_on_path(g, p, opts.eval), {}};
                                   if (d.truth.is_yes()) d.path = p;
                                   return d;
                                 });
    for (auto& d : batch) {
      if (stats.accepted >= opts.target) break;
      ++stats.tried;
      if (d.truth.is_undecided()) ++stats.undecided;
      if (!d.truth.is_yes()) continue;
      ++stats.accepted;
      if (!sink(d.path)) {
        more = false;
        break;
      }
    }
    next += count;
  }
  return stats;
}

SampleRows reference_samples(const EngineSpec& engine, const SampleBudget& budget, const PathEvent& g,
                             const std::vector<FutureFunctional>& h, const ReferenceOptions& opts,
                             ReferenceStats* stats) {
  SampleRows rows;
  const ReferenceStats s = reference_conditional_sampler(engine, budget, g, opts, [&](const Path& p) {
    std::vector<double> row;
    for (const auto& f : h) {
      const auto v = future_at(f, p, 0.0, opts.eval);
      if (!v) return true;
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
    return true;
  });
  if (stats) *stats = s;
  return rows;
}

// Strict-time law ---------------------------------------------------------------

namespace {

struct StrictRecord {
  bool ok = false;
  double a1 = 0.0;
  std::vector<double> num;
  SampleRows atoms;
};

}  // namespace

StrictLawEstimate strict_time_law_formula(const EngineSpec& engine, const SampleBudget& budget,
                                          const IncrementalFunctional& a, const std::vector<FutureFunctional>& h,
                                          const StrictLawOptions& opts) {
  constexpr double kQuadrature = 0.01;
  const std::size_t d = h.size();
  auto per_path = [&](std::uint64_t i, const Path& path) {
    StrictRecord rec;
    Rng terminal(SeedStream::of(opts.seed, seed_domain::reference_terminal, i));
    const RealizedIF realized = realize_if(a, path, terminal, opts.eval);
    for (double u : realized.undecided)
      if (u <= 1.0) return rec;
    if (realized.decided_until < 1.0) return rec;
    rec.num.assign(d, 0.0);
    auto add = [&](double u, double mass, bool sample) {
      std::vector<double> row;
      for (std::size_t c = 0; c < d; ++c) {
        const auto v = future_at(h[c], path, u, opts.eval);
        if (!v) return false;
        rec.num[c] += mass * *v;
        row.push_back(*v);
      }
      if (sample) rec.atoms.push_back(std::move(row));
      return true;
    };
    for (const auto& atom : realized.atoms) {
      if (atom.time > 1.0) break;
      if (!add(atom.time, atom.mass, atom.mass == 1.0)) return rec;
    }
    for (const auto& s : realized.segments) {
      const double end = std::min(s.end, 1.0);
      for (double u = s.begin; u < end; u += kQuadrature) {
        const double w = std::min(kQuadrature, end - u);
        if (!add(u + 0.5 * w, s.rate * w, false)) return rec;
      }
    }
    rec.a1 = realized.mass(0.0, 1.0);
    rec.ok = true;
    return rec;
  };

  const auto records =
      map_paths<StrictRecord>(engine, budget, opts.seed, seed_domain::reference, 0, opts.paths, opts.jobs, per_path);
  StrictLawEstimate est;
  std::vector<const StrictRecord*> used;
  for (const auto& rec : records) {
    if (!rec.ok) {
      ++est.discarded;
      continue;
    }
    used.push_back(&rec);
    for (const auto& row : rec.atoms) est.samples.push_back(row);
  }
  est.paths = used.size();
  const double n = static_cast<double>(used.size());
  if (used.size() < 2) throw std::domain_error("strict_time_law_formula: too few decided paths");
  double mean_a = 0.0;
  for (const auto* r : used) mean_a += r->a1;
  mean_a /= n;
  double var_a = 0.0;
  for (const auto* r : used) var_a += (r->a1 - mean_a) * (r->a1 - mean_a);
  var_a /= (n - 1.0);
  est.mean_a1 = mean_a;
  est.se_a1 = std::sqrt(var_a / n);
  if (!(mean_a > 3.0 * est.se_a1) || mean_a <= 0.0)
    throw std::domain_error("strict_time_law_formula: E A_1 is not distinguishable from 0");
  for (std::size_t c = 0; c < d; ++c) {
    double mean_x = 0.0;
    for (const auto* r : used) mean_x += r->num[c];
    mean_x /= n;
    const double ratio = mean_x / mean_a;
    double var = 0.0;
    for (const auto* r : used) {
      const double e = r->num[c] - ratio * r->a1;
      var += e * e;
    }
    var /= (n - 1.0);
    est.ratio.push_back(ratio);
    est.se.push_back(std::sqrt(var / n) / mean_a);
  }
  return est;
}

}  // namespace indtime

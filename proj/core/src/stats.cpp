#include "indtime/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "indtime/parallel.hpp"
#include "indtime/rng.hpp"

namespace indtime {

namespace {

void check_rows(const SampleRows& rows, const char* what) {
  if (rows.empty()) return;
  const std::size_t d = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != d) throw std::invalid_argument(std::string(what) + ": rows differ in length");
}

bool constant_rows(const SampleRows& rows) {
  for (const auto& r : rows)
    if (r != rows.front()) return false;
  return true;
}

std::vector<double> column(const SampleRows& rows, std::size_t c) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

// Fisher-Yates with one stream per permutation so results do not depend on
// the worker count.
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed, std::uint64_t index) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  Rng rng(SeedStream::of(seed, seed_domain::permutation, index));
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

double permutation_p_value(double observed, const std::vector<double>& null) {
  const double slack = 1e-12 * std::max(1.0, std::fabs(observed));
  std::size_t ge = 0;
  for (double t : null)
    if (t >= observed - slack) ++ge;
  return static_cast<double>(1 + ge) / static_cast<double>(null.size() + 1);
}

struct Binned {
  std::vector<std::size_t> z;
  std::vector<std::size_t> h;
  std::size_t nz = 0;
  std::size_t nh = 0;
  std::size_t bins = 0;
};

Binned bin_pair(const SampleRows& z, const SampleRows& h, const PermutationOptions& opts) {
  Binned b;
  const double n = static_cast<double>(z.size());
  for (std::size_t bins = std::max<std::size_t>(opts.bins, 2);; --bins) {
    b.bins = bins;
    b.z = joint_cells(z, bins, b.nz);
    b.h = joint_cells(h, bins, b.nh);
    if (bins == 2 || n / static_cast<double>(b.nz * b.nh) >= static_cast<double>(opts.min_expected)) break;
  }
  return b;
}

// Standardized Euclidean distance matrix, double-centered.
std::vector<double> centered_distances(const SampleRows& rows) {
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size();
  std::vector<double> scale(d, 1.0);
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& r : rows) var += (r[c] - mean) * (r[c] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    scale[c] = sd > 0.0 ? 1.0 / sd : 0.0;
  }
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = (rows[i][c] - rows[j][c]) * scale[c];
        s += diff * diff;
      }
      a[i * n + j] = a[j * n + i] = std::sqrt(s);
    }
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += a[i * n + j];
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] += grand - row_mean[i] - row_mean[j];
  return a;
}

double dcov_permuted(const std::vector<double>& a, const std::vector<double>& b, std::span<const std::size_t> perm) {
  const std::size_t n = perm.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = &a[i * n];
    const double* bi = &b[perm[i] * n];
    for (std::size_t j = 0; j < n; ++j) s += ai[j] * bi[perm[j]];
  }
  return s / static_cast<double>(n * n);
}

TestReport too_few(TestReport r, std::size_t n, std::size_t min) {
  r.samples = n;
  r.verdict = Verdict::inconclusive;
  r.note = "fewer than " + std::to_string(min) + " samples";
  return r;
}

}  // namespace

std::string to_string(IndependenceStatistic s) {
  return s == IndependenceStatistic::chi_square_binned ? "chi-square-binned" : "distance-correlation";
}

std::string to_string(LawStatistic s) { return s == LawStatistic::ks ? "ks" : "chi-square"; }

IndependenceStatistic parse_independence_statistic(const std::string& text) {
  if (text == "chi-square-binned") return IndependenceStatistic::chi_square_binned;
  if (text == "distance-correlation") return IndependenceStatistic::distance_correlation;
  throw std::invalid_argument("unknown independence statistic '" + text + "'");
}

LawStatistic parse_law_statistic(const std::string& text) {
  if (text == "ks") return LawStatistic::ks;
  if (text == "chi-square") return LawStatistic::chi_square;
  throw std::invalid_argument("unknown law statistic '" + text + "'");
}

// Building blocks ----------------------------------------------------------------

std::vector<std::size_t> equiprobable_bins(std::span<const double> values, std::size_t bins) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts;
  const std::size_t n = sorted.size();
  for (std::size_t k = 1; k < bins && n > 0; ++k) {
    const double q = sorted[std::min(n - 1, n * k / bins)];
    if (q > sorted.front() && (cuts.empty() || q > cuts.back())) cuts.push_back(q);
  }
  std::vector<std::size_t> out;
  out.reserve(n);
  for (double v : values)
    out.push_back(static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin()));
  return out;
}

std::vector<std::size_t> joint_cells(const SampleRows& rows, std::size_t bins, std::size_t& cells) {
  const std::size_t n = rows.size();
  std::vector<std::size_t> code(n, 0);
  if (n == 0) {
    cells = 0;
    return code;
  }
  const std::size_t d = rows.front().size();
  for (std::size_t c = 0; c < d; ++c) {
    const auto col = column(rows, c);
    const auto b = equiprobable_bins(col, bins);
    for (std::size_t i = 0; i < n; ++i) code[i] = code[i] * bins + b[i];
  }
  std::map<std::size_t, std::size_t> renumber;
  for (std::size_t v : code) renumber.emplace(v, 0);
  std::size_t next = 0;
  for (auto& [v, idx] : renumber) idx = next++;
  for (auto& v : code) v = renumber[v];
  cells = next;
  return code;
}

double pearson_statistic(std::span<const std::size_t> a, std::span<const std::size_t> b, std::size_t na,
                         std::size_t nb) {
  const std::size_t n = a.size();
  std::vector<double> table(na * nb, 0.0);
  std::vector<double> ra(na, 0.0);
  std::vector<double> rb(nb, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    table[a[i] * nb + b[i]] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    if (ra[i] == 0.0) continue;
    for (std::size_t j = 0; j < nb; ++j) {
      if (rb[j] == 0.0) continue;
      const double o = table[i * nb + j];
      s += o * o / (ra[i] * rb[j]);
    }
  }
  return static_cast<double>(n) * (s - 1.0);
}

double distance_correlation(const SampleRows& x, const SampleRows& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("distance_correlation: bad sample sizes");
  const auto a = centered_distances(x);
  const auto b = centered_distances(y);
  std::vector<std::size_t> id(x.size());
  std::iota(id.begin(), id.end(), std::size_t{0});
  const double vx = dcov_permuted(a, a, id);
  const double vy = dcov_permuted(b, b, id);
  if (vx <= 0.0 || vy <= 0.0) return 0.0;
  return dcov_permuted(a, b, id) / std::sqrt(vx * vy);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series converges fast for small lambda.
    const double pi = std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double t = (2.0 * k - 1.0) * pi / lambda;
      s += std::exp(-t * t / 8.0);
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

double ks_p_value(double d, std::size_t n, std::size_t m) {
  const double en = std::sqrt(static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m));
  return kolmogorov_q((en + 0.12 + 0.11 / en) * d);
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  const boost::math::chi_squared_distribution<double> law(dof);
  return boost::math::cdf(boost::math::complement(law, x));
}

// Tests --------------------------------------------------------------------------

TestReport mc_independence_test(const SampleRows& z, const SampleRows& h, IndependenceStatistic statistic,
                                const PermutationOptions& opts) {
  if (z.size() != h.size()) throw std::invalid_argument("mc_independence_test: z and h differ in size");
  check_rows(z, "mc_independence_test");
  check_rows(h, "mc_independence_test");
  TestReport r;
  r.kind = "monte-carlo";
  r.check = "independence";
  r.statistic = to_string(statistic);
  r.seeds = {opts.seed};
  const std::size_t n = z.size();
  if (n < opts.min_samples) return too_few(std::move(r), n, opts.min_samples);
  r.samples = n;
  if (constant_rows(z) || constant_rows(h)) {
    r.p_value = 1.0;
    r.verdict = Verdict::pass;
    r.note = "constant statistic";
    return r;
  }

  std::vector<double> null(opts.n_permutations);
  if (statistic == IndependenceStatistic::chi_square_binned) {
    const Binned b = bin_pair(z, h, opts);
    r.value = pearson_statistic(b.z, b.h, b.nz, b.nh);
    parallel_chunks(opts.n_permutations, opts.jobs, [&](std::size_t, std::size_t begin, std::size_t end) {
      std::vector<std::size_t> hp(n);
      for (std::size_t k = begin; k < end; ++k) {
        const auto p = permutation(n, opts.seed, k);
        for (std::size_t i = 0; i < n; ++i) hp[i] = b.h[p[i]];
        null[k] = pearson_statistic(b.z, hp, b.nz, b.nh);
      }
    });
    r.details = {{"bins", b.bins}, {"z_cells", b.nz}, {"h_cells", b.nh}};
    if (b.nz < 2 || b.nh < 2) {
      r.p_value = 1.0;
      r.verdict = Verdict::pass;
      r.note = "a single occupied cell";
      return r;
    }
  } else {
    const std::size_t m = std::min(n, std::max<std::size_t>(opts.dcor_cap, 2));
    const SampleRows zs(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(m));
    const SampleRows hs(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(m));
    const auto a = centered_distances(zs);
    const auto bm = centered_distances(hs);
    std::vector<std::size_t> id(m);
    std::iota(id.begin(), id.end(), std::size_t{0});
    const double vx = dcov_permuted(a, a, id);
    const double vy = dcov_permuted(bm, bm, id);
    if (vx <= 0.0 || vy <= 0.0) {
      r.p_value = 1.0;
      r.verdict = Verdict::pass;
      r.note = "constant statistic";
      return r;
    }
    const double norm = std::sqrt(vx * vy);
    r.value = dcov_permuted(a, bm, id) / norm;
    parallel_chunks(opts.n_permutations, opts.jobs, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) null[k] = dcov_permuted(a, bm, permutation(m, opts.seed, k)) / norm;
    });
    r.details = {{"subsample", m}};
  }
  r.details["permutations"] = opts.n_permutations;
  r.details["alpha"] = opts.alpha;
  r.p_value = permutation_p_value(r.value, null);
  r.verdict = *r.p_value > opts.alpha ? Verdict::pass : Verdict::fail;
  return r;
}

TestReport mc_law_test(const SampleRows& a, const SampleRows& b, LawStatistic statistic, const LawTestOptions& opts) {
  check_rows(a, "mc_law_test");
  check_rows(b, "mc_law_test");
  TestReport r;
  r.kind = "monte-carlo";
  r.check = "law";
  r.statistic = to_string(statistic);
  const std::size_t n = std::min(a.size(), b.size());
  if (n < opts.min_samples) return too_few(std::move(r), n, opts.min_samples);
  if (a.front().size() != b.front().size()) throw std::invalid_argument("mc_law_test: dimensions differ");
  r.samples = a.size();
  r.details = {{"reference_samples", b.size()}, {"alpha", opts.alpha}};
  const std::size_t d = a.front().size();

  if (statistic == LawStatistic::ks) {
    double worst_p = 1.0;
    nlohmann::json coords = nlohmann::json::array();
    for (std::size_t c = 0; c < d; ++c) {
      const double stat = ks_statistic(column(a, c), column(b, c));
      const double p = ks_p_value(stat, a.size(), b.size());
      r.value = std::max(r.value, stat);
      worst_p = std::min(worst_p, p);
      coords.push_back({{"d", stat}, {"p", p}});
    }
    r.details["coordinates"] = std::move(coords);
    r.p_value = std::min(1.0, worst_p * static_cast<double>(d));
  } else {
    SampleRows pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::size_t cells = 0;
    std::vector<std::size_t> code;
    const double total = static_cast<double>(pooled.size());
    const double small = static_cast<double>(std::min(a.size(), b.size()));
    for (std::size_t bins = std::max<std::size_t>(opts.bins, 2);; --bins) {
      code = joint_cells(pooled, bins, cells);
      if (bins == 2 || small / static_cast<double>(cells) >= static_cast<double>(opts.min_expected)) break;
    }
    std::vector<double> ca(cells, 0.0);
    std::vector<double> cb(cells, 0.0);
    for (std::size_t i = 0; i < pooled.size(); ++i) (i < a.size() ? ca : cb)[code[i]] += 1.0;
    // Merge sparse cells (in code order) so every expected count reaches the floor.
    std::vector<double> ma;
    std::vector<double> mb;
    double acc_a = 0.0;
    double acc_b = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      acc_a += ca[c];
      acc_b += cb[c];
      if ((acc_a + acc_b) * small / total >= static_cast<double>(opts.min_expected)) {
        ma.push_back(acc_a);
        mb.push_back(acc_b);
        acc_a = acc_b = 0.0;
      }
    }
    if (acc_a + acc_b > 0.0) {
      if (ma.empty()) {
        ma.push_back(0.0);
        mb.push_back(0.0);
      }
      ma.back() += acc_a;
      mb.back() += acc_b;
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double stat = 0.0;
    for (std::size_t c = 0; c < ma.size(); ++c) {
      const double t = ma[c] + mb[c];
      const double ea = t * na / total;
      const double eb = t * nb / total;
      stat += (ma[c] - ea) * (ma[c] - ea) / ea + (mb[c] - eb) * (mb[c] - eb) / eb;
    }
    r.value = stat;
    const double dof = static_cast<double>(ma.size()) - 1.0;
    r.details["cells"] = ma.size();
    r.p_value = dof > 0.0 ? chi_square_sf(stat, dof) : 1.0;
  }
  r.verdict = *r.p_value > opts.alpha ? Verdict::pass : Verdict::fail;
  return r;
}

}  // namespace indtime

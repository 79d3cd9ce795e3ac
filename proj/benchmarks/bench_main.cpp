#include <benchmark/benchmark.h>

#include "indtime/catalog.hpp"
#include "indtime/engines.hpp"
#include "indtime/exact.hpp"
#include "indtime/stats.hpp"
#include "indtime/times.hpp"

using namespace indtime;

namespace {

using K = PastStatistic::Kind;

TimeSpec windowed(std::size_t window, double last) {
  LastSupSpec s;
  s.variant = LastSupSpec::Variant::discrete;
  s.window = window;
  s.max_time = last;
  return TimeSpec::last_supremum(s);
}

void BM_ExactFirstZero(benchmark::State& state) {
  const auto m = ExactModel::from_law(StepLaw::bernoulli(0.5), static_cast<std::size_t>(state.range(0)));
  const auto r = *example_time("first-zero-minus-one");
  const std::vector<PastStatistic> z{PastStatistic::of(K::time), PastStatistic::of(K::count_steps_eq, 1)};
  const std::vector<FutureFunctional> h{FutureFunctional::step(1), FutureFunctional::step(2)};
  ExactOptions o;
  o.jobs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(exact_tally(m, r, z, h, {}, o));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m.sequence_count()));
}
BENCHMARK(BM_ExactFirstZero)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ExactRoutes(benchmark::State& state) {
  const std::size_t len = static_cast<std::size_t>(state.range(0));
  const auto m = ExactModel::from_law(StepLaw::finite_support({-2, -1, 1}, {0.3, 0.4, 0.3}), len);
  const std::vector<PastStatistic> z{PastStatistic::of(K::value), PastStatistic::of(K::time)};
  const std::vector<FutureFunctional> h{FutureFunctional::step(1)};
  ExactOptions o;
  o.jobs = 1;
  o.route = state.range(1) == 0 ? ExactRoute::full : ExactRoute::factored;
  const auto r = windowed(len / 2, static_cast<double>(len / 2));
  for (auto _ : state) benchmark::DoNotOptimize(exact_tally(m, r, z, h, {}, o));
}
BENCHMARK(BM_ExactRoutes)->Args({10, 0})->Args({10, 1})->Args({12, 0})->Args({12, 1})->Unit(benchmark::kMillisecond);

void BM_SampleBm(benchmark::State& state) {
  std::uint64_t i = 0;
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    Rng rng(SeedStream::of(1, seed_domain::paths, i++));
    benchmark::DoNotOptimize(sample_bm_drift(-1.0, 1.0, step, 50.0, rng));
  }
}
BENCHMARK(BM_SampleBm)->Arg(100)->Arg(200);

void BM_SampleDriftMinusCp(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng(SeedStream::of(1, seed_domain::paths, i++));
    benchmark::DoNotOptimize(sample_drift_minus_cp(1.0, 0.5, StepLaw::exponential(1), 30.0, rng));
  }
}
BENCHMARK(BM_SampleDriftMinusCp);

SampleRows noise(std::size_t n, std::uint64_t stream) {
  Rng rng(SeedStream::of(2, seed_domain::synthetic, stream));
  SampleRows out(n);
  for (auto& row : out) row = {rng.normal()};
  return out;
}

void BM_PermutationChiSquare(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = noise(n, 1), b = noise(n, 2);
  PermutationOptions po;
  po.jobs = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(mc_independence_test(a, b, IndependenceStatistic::chi_square_binned, po));
}
BENCHMARK(BM_PermutationChiSquare)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_PermutationDcor(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = noise(n, 3), b = noise(n, 4);
  PermutationOptions po;
  po.jobs = 1;
  po.n_permutations = 199;
  for (auto _ : state) benchmark::DoNotOptimize(mc_independence_test(a, b, IndependenceStatistic::distance_correlation, po));
}
BENCHMARK(BM_PermutationDcor)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

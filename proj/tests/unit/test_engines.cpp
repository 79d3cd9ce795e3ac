#include <gtest/gtest.h>

#include <cmath>

#include "indtime/engines.hpp"
#include "indtime/stats.hpp"

using namespace indtime;

namespace {
Rng rng_for(std::uint64_t i) { return Rng(SeedStream::of(2024, seed_domain::synthetic, i)); }
}  // namespace

TEST(StepLaw, RejectsBadParameters) {
  EXPECT_THROW(StepLaw::bernoulli(1.5), std::invalid_argument);
  EXPECT_THROW(StepLaw::finite_support({1, 2}, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(StepLaw::finite_support({1, 2}, {0.5}), std::invalid_argument);
  EXPECT_THROW(StepLaw::gaussian(0, -1), std::invalid_argument);
  EXPECT_THROW(StepLaw::exponential(0), std::invalid_argument);
  EXPECT_THROW(LevySpec::bm_drift(0, 0), std::invalid_argument);
  EXPECT_THROW(LevySpec::compound_poisson(0, StepLaw::constant(1)), std::invalid_argument);
}

TEST(Iid, ConstantLaw) {
  auto r = rng_for(0);
  const auto y = sample_iid(StepLaw::constant(2.5), 3, r);
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()), (std::vector<double>{2.5, 2.5, 2.5}));
}

TEST(Iid, BernoulliMean) {
  auto r = rng_for(1);
  const std::size_t n = 100000;
  const auto y = sample_iid(StepLaw::bernoulli(0.5), n, r);
  double s = 0;
  for (double v : y.data()) s += v;
  EXPECT_NEAR(s / n, 0.5, 4 * 0.5 / std::sqrt(double(n)));
}

TEST(Iid, FiniteSupportFrequencies) {
  auto r = rng_for(2);
  const std::size_t n = 100000;
  const std::vector<double> probs{0.3, 0.4, 0.3};
  const auto y = sample_iid(StepLaw::finite_support({-2, -1, 1}, probs), n, r);
  std::vector<double> f(3, 0);
  for (double v : y.data()) f[v == -2 ? 0 : v == -1 ? 1 : 2] += 1.0 / n;
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(f[i], probs[i], 4 * std::sqrt(probs[i] * (1 - probs[i]) / n));
}

TEST(RandomWalk, ConstantSteps) {
  auto r = rng_for(3);
  const auto x = sample_random_walk(StepLaw::constant(1), 3, r);
  EXPECT_EQ(std::vector<double>(x.data().begin(), x.data().end()), (std::vector<double>{0, 1, 2, 3}));
}

TEST(RandomWalk, DeltaShiftMatchesStrictPost) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto r = rng_for(100 + i);
    const auto x = sample_random_walk(StepLaw::finite_support({-2, -1, 1}, {0.3, 0.4, 0.3}), 15, r);
    for (std::size_t n = 0; n <= 15; ++n) {
      const auto post = strict_post(x.steps(), n).cumulative();
      const auto shifted = delta_shift(x, n);
      ASSERT_EQ(post.horizon(), shifted.horizon());
      for (std::size_t k = 0; k <= post.horizon(); ++k) ASSERT_NEAR(post.at(k), shifted.at(k), 1e-12);
    }
  }
}

TEST(BmDrift, Deterministic) {
  auto a = rng_for(4);
  auto b = rng_for(4);
  EXPECT_EQ(sample_bm_drift(0, 1, 0.01, 5, a), sample_bm_drift(0, 1, 0.01, 5, b));
}

TEST(BmDrift, TerminalMean) {
  const double t = 100, mu = -1, sigma = 1;
  const int n = 10000;
  double s = 0;
  for (int i = 0; i < n; ++i) {
    auto r = rng_for(1000 + i);
    const auto g = sample_bm_drift(mu, sigma, 0.01, t, r);
    s += g[g.size() - 1];
  }
  EXPECT_NEAR(s / n, mu * t, 4 * sigma * std::sqrt(t / n));
}

TEST(BmDrift, DisjointBlocksIndependentAndEqualInLaw) {
  SampleRows first, second;
  for (int i = 0; i < 2000; ++i) {
    auto r = rng_for(50000 + i);
    const auto g = sample_bm_drift(-1, 1, 0.01, 2, r);
    first.push_back({g.value_at(1.0) - g.value_at(0.0)});
    second.push_back({g.value_at(2.0) - g.value_at(1.0)});
  }
  PermutationOptions po;
  po.seed = 9;
  const auto ind = mc_independence_test(first, second, IndependenceStatistic::chi_square_binned, po);
  EXPECT_TRUE(ind.passed()) << ind.note << " p=" << ind.p_value.value_or(-1) << " " << ind.details.dump();
  const auto law = mc_law_test(first, second, LawStatistic::ks);
  EXPECT_TRUE(law.passed()) << law.note << " p=" << law.p_value.value_or(-1) << " " << law.details.dump();
}

TEST(CompoundPoisson, JumpCount) {
  const double rate = 2.0;
  auto r = rng_for(5);
  const auto p = sample_compound_poisson(rate, StepLaw::constant(1), 1e4 / rate, r);
  EXPECT_NEAR(double(p.jump_count()), 1e4, 4 * std::sqrt(1e4));
}

TEST(CompoundPoisson, Deterministic) {
  auto a = rng_for(6);
  auto b = rng_for(6);
  EXPECT_EQ(sample_compound_poisson(1, StepLaw::exponential(1), 20, a),
            sample_compound_poisson(1, StepLaw::exponential(1), 20, b));
}

TEST(DriftMinusCp, UnitSlopeBetweenJumps) {
  auto r = rng_for(7);
  const auto p = sample_drift_minus_cp(1.0, 0.5, StepLaw::exponential(1), 30, r);
  ASSERT_GT(p.jump_count(), 1u);
  const double a = p.jump_times()[0], b = p.jump_times()[1];
  const double u = a + 0.25 * (b - a), v = a + 0.75 * (b - a);
  EXPECT_NEAR(p.value(v) - p.value(u), v - u, 1e-12);
  for (double s : p.jump_sizes()) EXPECT_LT(s, 0.0);
}

TEST(DriftMinusCp, IncrementWindowsIndependent) {
  SampleRows first, second;
  for (int i = 0; i < 2000; ++i) {
    auto r = rng_for(70000 + i);
    const auto p = sample_drift_minus_cp(1.0, 0.5, StepLaw::exponential(1), 4, r);
    // Rounding keeps the no-jump atom at exactly 2 in both windows.
    auto inc = [&](double a, double b) { return std::round((p.value(b) - p.value(a)) * 1e9) / 1e9; };
    first.push_back({inc(0.0, 2.0)});
    second.push_back({inc(2.0, 4.0)});
  }
  PermutationOptions po;
  po.seed = 10;
  const auto ind = mc_independence_test(first, second, IndependenceStatistic::chi_square_binned, po);
  EXPECT_TRUE(ind.passed()) << ind.note << " p=" << ind.p_value.value_or(-1) << " " << ind.details.dump();
  const auto law = mc_law_test(first, second, LawStatistic::ks);
  EXPECT_TRUE(law.passed()) << law.note << " p=" << law.p_value.value_or(-1) << " " << law.details.dump();
}

TEST(Engine, SampleBatchIsIndexedByStream) {
  const auto e = EngineSpec::random_walk(StepLaw::bernoulli(0.5));
  const SampleBudget b{10, 1};
  const auto all = sample_batch(e, b, 8, 42, 0, 1);
  const auto tail = sample_batch(e, b, 4, 42, 4, 3);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(all[4 + i], tail[i]);
}

TEST(Engine, MeanDrift) {
  EXPECT_DOUBLE_EQ(EngineSpec::random_walk(StepLaw::finite_support({-2, -1, 1}, {0.3, 0.4, 0.3})).mean_drift(),
                   -0.7);
  EXPECT_DOUBLE_EQ(EngineSpec::levy(LevySpec::drift_minus_cp(1, 0.5, StepLaw::exponential(1))).mean_drift(), 0.5);
}

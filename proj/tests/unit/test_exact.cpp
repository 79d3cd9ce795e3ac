#include <gtest/gtest.h>

#include "indtime/catalog.hpp"
#include "indtime/exact.hpp"

using namespace indtime;

namespace {
using K = PastStatistic::Kind;
const StepLaw kBernoulli = StepLaw::bernoulli(0.5);
const StepLaw kWalkLaw = StepLaw::finite_support({-2, -1, 1}, {0.3, 0.4, 0.3});

TimeSpec first_zero() { return *example_time("first-zero-minus-one"); }

TimeSpec windowed(std::size_t window, double last) {
  LastSupSpec s;
  s.variant = LastSupSpec::Variant::discrete;
  s.window = window;
  s.max_time = last;
  return TimeSpec::last_supremum(s);
}

ExactOptions route(ExactRoute r) {
  ExactOptions o;
  o.route = r;
  return o;
}

const std::vector<PastStatistic> kDefaultZ{PastStatistic::of(K::time), PastStatistic::of(K::count_steps_eq, 1)};
const std::vector<FutureFunctional> kDefaultH{FutureFunctional::step(1), FutureFunctional::step(2)};
}  // namespace

TEST(ExactModel, FromLawAndBudget) {
  const auto m = ExactModel::from_law(kWalkLaw, 14);
  EXPECT_EQ(m.alphabet.size(), 3u);
  EXPECT_EQ(m.sequence_count(), 4782969u);
  EXPECT_THROW(m.validate(1000), ExactBudgetExceeded);
  EXPECT_THROW(ExactModel::from_law(StepLaw::gaussian(0, 1), 3), std::invalid_argument);
  EXPECT_EQ(ExactModel::from_law(StepLaw::finite_support({0, 1}, {0, 1}), 3).alphabet.size(), 1u);
}

TEST(ExactIndependence, BernoulliFirstZero) {
  const auto m = ExactModel::from_law(kBernoulli, 12);
  const auto r = exact_independence_check(m, first_zero(), kDefaultZ, kDefaultH);
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.value, 1e-12);
  // R is infinite exactly when the first 11 steps all equal 1.
  EXPECT_DOUBLE_EQ(r.details["p_infinite"].get<double>(), 1.0 / 2048);
}

TEST(ExactIndependence, IndicatorFamily) {
  const auto m = ExactModel::from_law(kBernoulli, 12);
  const std::vector<FutureFunctional> h{FutureFunctional::indicator(PathEvent::step_eq(1, 1)),
                                        FutureFunctional::indicator(PathEvent::step_eq(2, 1))};
  EXPECT_LE(exact_independence_check(m, first_zero(), kDefaultZ, h).value, 1e-12);
}

TEST(ExactIndependence, DeterministicZero) {
  const auto m = ExactModel::from_law(kBernoulli, 8);
  const auto r = exact_independence_check(m, TimeSpec::deterministic(0), {PastStatistic::of(K::value)}, kDefaultH);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.value, 0.0);
}

// Frozen values from tests/oracle/counterexample.py.
TEST(ExactIndependence, CounterexampleMatchesOracle) {
  const std::vector<PastStatistic> z{PastStatistic::of(K::value), PastStatistic::of(K::time)};
  const std::vector<FutureFunctional> h{FutureFunctional::step(1)};
  for (auto rt : {ExactRoute::full, ExactRoute::factored}) {
    const auto small = exact_independence_check(ExactModel::from_law(kWalkLaw, 6), windowed(3, 3), z, h, route(rt));
    EXPECT_NEAR(small.value, 0.10680878534283599, 1e-12);
    EXPECT_NEAR(small.details["p_finite"].get<double>(), 0.591577, 1e-12);
    EXPECT_EQ(small.verdict, Verdict::fail);
    const auto big = exact_independence_check(ExactModel::from_law(kWalkLaw, 8), windowed(4, 4), z, h, route(rt));
    EXPECT_NEAR(big.value, 0.10767217699654111, 1e-12);
    EXPECT_NEAR(big.details["p_finite"].get<double>(), 0.6062065, 1e-12);
  }
}

TEST(ExactCondIndependence, CounterexampleGivenValue) {
  const auto m = ExactModel::from_law(kWalkLaw, 8);
  const auto r = exact_cond_independence_check(m, windowed(4, 4), {PastStatistic::of(K::time)},
                                               {FutureFunctional::step(1)}, {PastStatistic::of(K::value)});
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.value, 1e-12);
}

TEST(ExactCondIndependence, ConstantPresentReduces) {
  const auto m = ExactModel::from_law(kWalkLaw, 8);
  const std::vector<PastStatistic> z{PastStatistic::of(K::value), PastStatistic::of(K::time)};
  const std::vector<FutureFunctional> h{FutureFunctional::step(1)};
  const auto a = exact_independence_check(m, windowed(4, 4), z, h);
  const auto b = exact_cond_independence_check(m, windowed(4, 4), z, h, {PastStatistic::of(K::constant, 3)});
  EXPECT_DOUBLE_EQ(a.value, b.value);
}

TEST(ExactCondIndependence, StoppingTimeAnyPresent) {
  const auto m = ExactModel::from_law(kWalkLaw, 12);
  const auto r = exact_cond_independence_check(m, TimeSpec::first_passage(-1, false),
                                               {PastStatistic::of(K::time), PastStatistic::of(K::last_step)},
                                               {FutureFunctional::step(1), FutureFunctional::step(2)},
                                               {PastStatistic::of(K::value)});
  EXPECT_TRUE(r.passed()) << r.note << " " << r.details.dump();
}

TEST(ExactRoutes, FactoredEqualsFull) {
  const std::vector<PastStatistic> z{PastStatistic::of(K::value), PastStatistic::of(K::time),
                                     PastStatistic::of(K::running_inf)};
  const std::vector<FutureFunctional> h{FutureFunctional::step(1), FutureFunctional::step(2)};
  // A window at least as long as the last index keeps the clauses disjoint.
  for (std::size_t len : {6u, 8u, 10u}) {
    const auto m = ExactModel::from_law(kWalkLaw, len);
    const auto t = windowed(len / 2, double(len / 2));
    const auto full = exact_tally(m, t, z, h, {}, route(ExactRoute::full));
    const auto fact = exact_tally(m, t, z, h, {}, route(ExactRoute::factored));
    EXPECT_EQ(fact.route, ExactRoute::factored);
    EXPECT_EQ(double(fact.invalid), 0.0);
    EXPECT_NEAR(double(full.finite), double(fact.finite), 1e-14);
    EXPECT_NEAR(double(full.infinite), double(fact.infinite), 1e-14);
    EXPECT_NEAR(max_discrepancy(full), max_discrepancy(fact), 1e-14);
    ASSERT_EQ(full.cells.size(), fact.cells.size());
    for (const auto& [present, table] : full.cells) {
      const auto& other = fact.cells.at(present);
      ASSERT_EQ(table.size(), other.size());
      for (const auto& [cell, mass] : table) EXPECT_NEAR(double(mass), double(other.at(cell)), 1e-14);
    }
  }
}

TEST(ExactRoutes, OverlappingClausesAreFlaggedByBothRoutes) {
  const std::vector<PastStatistic> z{PastStatistic::of(K::value)};
  const std::vector<FutureFunctional> h{FutureFunctional::step(1)};
  const auto m = ExactModel::from_law(kWalkLaw, 9);
  const auto t = windowed(3, 6.0);
  const auto full = exact_tally(m, t, z, h, {}, route(ExactRoute::full));
  const auto fact = exact_tally(m, t, z, h, {}, route(ExactRoute::factored));
  EXPECT_GT(double(full.invalid), 0.0);
  EXPECT_NEAR(double(full.invalid), double(fact.invalid), 1e-14);
  EXPECT_EQ(exact_independence_check(m, t, z, h, route(ExactRoute::factored)).verdict, Verdict::inconclusive);
}

TEST(ExactRoutes, JobsDoNotChangeResult) {
  auto o1 = route(ExactRoute::full);
  auto o3 = o1;
  o3.jobs = 3;
  const auto m = ExactModel::from_law(kBernoulli, 10);
  const auto a = exact_tally(m, first_zero(), kDefaultZ, kDefaultH, {}, o1);
  const auto b = exact_tally(m, first_zero(), kDefaultZ, kDefaultH, {}, o3);
  EXPECT_EQ(a.cells, b.cells);
}

TEST(ExactLaw, FirstZeroMatchesConditionalReference) {
  const auto m = ExactModel::from_law(kBernoulli, 12);
  const auto law = exact_law(m, first_zero(), kDefaultH);
  ASSERT_EQ(law.size(), 2u);
  EXPECT_NEAR(double(law.at({0.0, 0.0})), 0.5, 1e-15);
  EXPECT_NEAR(double(law.at({0.0, 1.0})), 0.5, 1e-15);
  const auto r = exact_law_check(m, first_zero(), kDefaultH, PathEvent::step_eq(1, 0));
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(exact_law_check(m, first_zero(), kDefaultH, PathEvent::whole()).passed());
}

TEST(ExactLaw, Distance) {
  const LawTable a{{{0.0}, 0.5L}, {{1.0}, 0.5L}};
  const LawTable b{{{0.0}, 1.0L}};
  EXPECT_DOUBLE_EQ(law_distance(a, b), 0.5);
  EXPECT_DOUBLE_EQ(law_distance(a, a), 0.0);
}

TEST(Factorize, FirstZeroAtTwo) {
  const auto m = ExactModel::from_law(kBernoulli, 6);
  const auto f = factorize_event(m, first_zero(), 2);
  EXPECT_TRUE(f.factorizable);
  EXPECT_EQ(f.prefixes, (std::vector<std::vector<double>>{{1, 1}}));
  EXPECT_EQ(f.suffixes.size(), 8u);
  for (const auto& s : f.suffixes) EXPECT_EQ(s.front(), 0.0);
  EXPECT_NEAR(double(f.probability), 0.125, 1e-15);
}

TEST(Factorize, DeterministicTime) {
  const auto m = ExactModel::from_law(kBernoulli, 5);
  const auto f = factorize_event(m, TimeSpec::deterministic(2), 2);
  EXPECT_TRUE(f.factorizable);
  EXPECT_EQ(f.prefixes.size(), 4u);
  EXPECT_EQ(f.suffixes.size(), 8u);
  EXPECT_THROW(factorize_event(m, TimeSpec::deterministic(2), 3), std::domain_error);
}

TEST(Factorize, CounterexampleNotFactorizable) {
  const auto m = ExactModel::from_law(kWalkLaw, 8);
  bool some = false;
  for (std::size_t n = 0; n <= 4; ++n) {
    try {
      if (!factorize_event(m, windowed(4, 4), n).factorizable) some = true;
    } catch (const std::domain_error&) {
    }
  }
  EXPECT_TRUE(some);
}

TEST(Factorize, CommonEventAcrossIndices) {
  const auto m = ExactModel::from_law(kBernoulli, 12);
  const auto r = check_factorization(m, first_zero(), 0, 10);
  EXPECT_TRUE(r.passed()) << r.details.dump();
}

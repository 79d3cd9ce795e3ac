#include <gtest/gtest.h>

#include "indtime/catalog.hpp"
#include "indtime/times.hpp"

using namespace indtime;

namespace {
SequencePath steps(std::vector<double> y) { return SequencePath::values(std::move(y)).cumulative(); }
Path walk(std::vector<double> x) { return SequencePath::walk(std::move(x)); }
const EvalOptions kNegativeTail{TailRule{-1.0, 2.0}, Tolerance{}};
}  // namespace

TEST(CharTime, FirstZeroAfterOnes) {
  const auto r = eval_char_time(EventSpec::steps_all_equal(1), PathEvent::step_eq(1, 0),
                                SequencePath::values({1, 1, 0, 1}));
  EXPECT_EQ(r, TimeValue::finite(2));
}

TEST(CharTime, WholeSpaceIsNotDisjoint) {
  EXPECT_THROW(eval_char_time(EventSpec::always(), PathEvent::whole(), SequencePath::values({1, 0})),
               InvalidTimeConstruction);
}

TEST(CharTime, TrivialPastFiresOnce) {
  const auto g = PathEvent::step_eq(1, 0);
  EXPECT_EQ(eval_char_time(EventSpec::always(), g, SequencePath::values({1, 1, 0, 1})), TimeValue::finite(2));
  EXPECT_THROW(eval_char_time(EventSpec::always(), g, SequencePath::values({0, 0})), InvalidTimeConstruction);
}

TEST(CharTime, MaxTimeAndNoFire) {
  const auto f = EventSpec::steps_all_equal(1);
  const auto g = PathEvent::step_eq(1, 0);
  const auto late = steps({1, 1, 1, 0});
  const auto never = steps({1, 1, 1, 1});
  EXPECT_TRUE(eval_char_time({{f, g}}, view_of(late), 2.0).is_infinite());
  EXPECT_TRUE(eval_char_time({{f, g}}, view_of(never), 3.0).is_infinite());
  EXPECT_TRUE(eval_char_time({{f, g}}, view_of(never)).is_undecided());
}

TEST(Stopping, FirstPassageAndDeterministic) {
  const auto w = SequencePath::walk({0, 1, 0, -1});
  EXPECT_EQ(eval_stopping_time(StoppingSpec::first_passage(-1, false), view_of(w)), TimeValue::finite(3));
  EXPECT_EQ(eval_stopping_time(StoppingSpec::deterministic(0), view_of(w)), TimeValue::finite(0));
  EXPECT_TRUE(eval_stopping_time(StoppingSpec::first_passage(5, true), view_of(w)).is_infinite());
  const EventPath p(1.0, {1.0}, {-3.0}, 4.0);
  EXPECT_EQ(eval_stopping_time(StoppingSpec::first_passage(-1, false), p), TimeValue::finite(1));
  EXPECT_EQ(eval_stopping_time(StoppingSpec::first_passage(0.5, true), p), TimeValue::finite(0.5));
}

TEST(Stopping, GridLevelNeverReached) {
  const GridPath g(0.01, std::vector<double>(101, 0.0));
  EXPECT_TRUE(evaluate(TimeSpec::first_passage(-1, false), Path{g}).is_infinite());
}

TEST(LastSup, DiscreteExampleIsTailAssumed) {
  LastSupSpec s;
  s.variant = LastSupSpec::Variant::discrete;
  const auto walk = SequencePath::walk({0, 1, 0, -1, -2, -3, -4, -5});
  const auto r = eval_last_sup_time(s, view_of(walk), kNegativeTail);
  EXPECT_EQ(r, TimeValue::tail_assumed(1));
}

TEST(LastSup, GlobalOnDecreasingPath) {
  LastSupSpec s;
  s.variant = LastSupSpec::Variant::global;
  const auto walk = SequencePath::walk({0, -1, -2, -3, -4});
  const auto r = eval_last_sup_time(s, view_of(walk), kNegativeTail);
  ASSERT_TRUE(r.has_time());
  EXPECT_EQ(r.time(), 0.0);
}

TEST(LastSup, EpsAboveRangeGivesLastTime) {
  const GridPath g(0.5, {0, 0.3, -0.2, 0.1, -0.4});
  LastSupSpec s;
  s.variant = LastSupSpec::Variant::r_eps;
  s.eps = 10.0;
  const auto r = eval_last_sup_time(s, view_of(g));
  ASSERT_TRUE(r.has_time());
  EXPECT_DOUBLE_EQ(r.time(), 2.0);
}

TEST(LastSup, EpsMonotone) {
  const GridPath g(0.5, {0, 0.3, -0.2, 0.25, -0.4, -1.0, -0.9, -2.0});
  double last = -1;
  for (double eps : {0.01, 0.1, 0.2, 0.5, 1.0, 5.0}) {
    LastSupSpec s;
    s.variant = LastSupSpec::Variant::r_eps;
    s.eps = eps;
    const auto r = eval_last_sup_time(s, view_of(g), EvalOptions{TailRule{-1.0, 1.0}, {}});
    ASSERT_TRUE(r.has_time()) << eps;
    EXPECT_GE(r.time(), last);
    last = r.time();
  }
}

TEST(LastSup, ClausesAreDisjointPair) {
  EXPECT_EQ(last_sup_clauses(0).size(), 2u);
}

TEST(ThinTime, SingleDeterministicComponent) {
  ThinTimeSpec t;
  t.components.push_back({StoppingSpec::deterministic(0), EventSpec::always()});
  const auto walk = SequencePath::walk({0, 1, 2});
  EXPECT_EQ(eval_thin_time(t, view_of(walk)), TimeValue::finite(0));
  t.future = PathEvent::empty();
  EXPECT_TRUE(eval_thin_time(t, view_of(walk)).is_infinite());
}

TEST(ThinTime, DeltaLHittingOnConstructedPath) {
  // Rises to 1.5 at t = 1.5, then falls monotonically; relative drop of 1 at t = 2.5.
  std::vector<double> x;
  for (int i = 0; i <= 15; ++i) x.push_back(0.1 * i);
  for (int i = 1; i <= 60; ++i) x.push_back(1.5 - 0.1 * i);
  const GridPath g(0.1, x);
  const auto r = evaluate(*example_time("delta-l-hitting"), Path{g}, TimeContext{kNegativeTail, {}});
  EXPECT_EQ(r.kind(), TimeValue::Kind::tail_assumed);
  EXPECT_NEAR(r.time(), 2.5, 1e-9);
}

TEST(ThinTime, DeltaLHittingZeroWhenLevelNeverReached) {
  std::vector<double> x;
  for (int i = 0; i <= 60; ++i) x.push_back(0.5 - 0.1 * std::abs(i - 5));
  const GridPath g(0.1, x);
  const auto r = evaluate(*example_time("delta-l-hitting"), Path{g}, TimeContext{kNegativeTail, {}});
  ASSERT_TRUE(r.has_time());
  EXPECT_EQ(r.time(), 0.0);
}

TEST(IfTime, ZeroOptionalSetIsInfinite) {
  IfTimeSpec s;
  s.functional = IncrementalFunctional::unit_drift_then_jump(1);
  s.optional = EventSpec::never();
  Rng rng(SeedStream{});
  EXPECT_TRUE(eval_if_time(s, Path{EventPath(1.0, {2.0, 5.0}, {-0.5, -0.5}, 8.0)}, rng).is_infinite());
}

TEST(IfTime, CompoundPoissonExample) {
  const auto spec = *example_time("unit-drift-strict-time");
  const Path p = EventPath(1.0, {2.0, 5.0}, {-0.5, -0.5}, 8.0);
  const auto r = evaluate(spec, p);
  EXPECT_EQ(r, TimeValue::finite(4));
}

TEST(IfTime, SeveralAtomsAreAnError) {
  IfTimeSpec s;
  s.functional = IncrementalFunctional::unit_drift_then_jump(1);
  Rng rng(SeedStream{});
  EXPECT_THROW(eval_if_time(s, Path{EventPath(1.0, {2.0, 5.0}, {-0.5, -0.5}, 8.0)}, rng), InvalidTimeConstruction);
}

TEST(Restriction, OptionalSet) {
  const Path up = walk({0, 1, 2});
  const Path down = walk({0, -1, -2});
  const auto r = TimeValue::finite(1);
  EXPECT_EQ(restrict_time(r, EventSpec::always(), up), r);
  EXPECT_TRUE(restrict_time(r, EventSpec::never(), up).is_infinite());
  EXPECT_EQ(restrict_time(r, EventSpec::value_cmp(Cmp::gt, 0), up), r);
  EXPECT_TRUE(restrict_time(r, EventSpec::value_cmp(Cmp::gt, 0), down).is_infinite());
}

TEST(Restriction, IncrementEvent) {
  const Path p = walk({0, 1, 1, 2});
  EXPECT_EQ(restrict_time(TimeValue::finite(1), PathEvent::step_eq(1, 0), p), TimeValue::finite(1));
  EXPECT_TRUE(restrict_time(TimeValue::finite(1), PathEvent::step_eq(1, 1), p).is_infinite());
  EXPECT_TRUE(restrict_time(TimeValue::infinite(), PathEvent::whole(), p).is_infinite());
}

TEST(Restriction, SpecMatchesManual) {
  const auto inner = *example_time("first-zero-minus-one");
  const auto spec = TimeSpec::restricted(inner, PathEvent::step_eq(2, 1));
  const Path a = steps({1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const Path b = steps({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_EQ(evaluate(spec, a), TimeValue::finite(1));
  EXPECT_TRUE(evaluate(spec, b).is_infinite());
}

TEST(PastFuture, AtTime) {
  const Path p = walk({0, 1, 3, 2});
  EXPECT_EQ(past_at(PastStatistic::of(PastStatistic::Kind::value), p, 2), 3.0);
  EXPECT_EQ(future_at(FutureFunctional::step(1), p, 2), -1.0);
  EXPECT_FALSE(future_at(FutureFunctional::step(2), p, 2).has_value());
}

// On a +-1 walk with integer eps the last time at M - eps before the maximum
// is the single atom of the eps-excursion functional on {drawdown < eps}.
TEST(LastSup, BeforeMaxMatchesExcursionIfTime) {
  LastSupSpec s;
  s.variant = LastSupSpec::Variant::r_eps_before_max;
  s.eps = 2.0;
  IfTimeSpec f;
  f.functional = IncrementalFunctional::eps_excursion(2.0);
  f.optional = EventSpec::drawdown_cmp(Cmp::lt, 2.0);
  const EvalOptions opts{TailRule{-0.4, 3.0}, Tolerance{}};
  const auto law = StepLaw::finite_support({-1, 1}, {0.7, 0.3});
  int compared = 0;
  int finite = 0;
  for (std::uint64_t i = 0; i < 4000; ++i) {
    Rng rng(SeedStream::of(5, seed_domain::synthetic, i));
    const auto walk = sample_random_walk(law, 200, rng);
    const auto v = view_of(walk);
    double m = 0.0;
    int at_max = 0;
    for (std::size_t k = 0; k <= v.last(); ++k) m = std::max(m, v.at(k));
    for (std::size_t k = 0; k <= v.last(); ++k) at_max += v.at(k) == m;
    if (at_max != 1) continue;
    const auto a = eval_last_sup_time(s, v, opts);
    Rng unused(SeedStream{});
    const auto b = eval_if_time(f, Path{walk}, unused, opts);
    if (a.is_undecided() || b.is_undecided()) continue;
    ++compared;
    ASSERT_EQ(a.has_time(), b.has_time()) << i;
    if (!a.has_time()) continue;
    ++finite;
    EXPECT_EQ(a.time(), b.time()) << i;
  }
  EXPECT_GT(compared, 500);
  EXPECT_GT(finite, 200);
}

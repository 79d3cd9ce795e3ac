#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "indtime/predicates.hpp"

using namespace indtime;

namespace {
const SequencePath kWalk = SequencePath::walk({0, 1, 3, 2, 2});
SampledView at(std::size_t n) { return view_of(kWalk).prefix(n); }
}  // namespace

TEST(Truth, KleeneTables) {
  const Truth y = Truth::yes(), n = Truth::no(), u = Truth::undecided();
  EXPECT_TRUE((y && y).is_yes());
  EXPECT_TRUE((y && n).is_no());
  EXPECT_TRUE((n && u).is_no());
  EXPECT_TRUE((y && u).is_undecided());
  EXPECT_TRUE((y || u).is_yes());
  EXPECT_TRUE((n || u).is_undecided());
  EXPECT_TRUE((!u).is_undecided());
  EXPECT_TRUE((!n).is_yes());
}

TEST(Cmp, ParseAndCompare) {
  EXPECT_EQ(parse_cmp(">="), Cmp::ge);
  EXPECT_EQ(parse_cmp("<"), Cmp::lt);
  EXPECT_THROW(parse_cmp("=>"), std::invalid_argument);
  EXPECT_TRUE(compare(1.0, Cmp::eq, 1.0 + 1e-13, 1e-12));
  EXPECT_FALSE(compare(1.0, Cmp::lt, 1.0));
}

TEST(EventSpec, Basic) {
  EXPECT_TRUE(evaluate(EventSpec::always(), at(2)));
  EXPECT_FALSE(evaluate(EventSpec::never(), at(2)));
  EXPECT_TRUE(evaluate(EventSpec::value_cmp(Cmp::eq, 3), at(2)));
  EXPECT_TRUE(evaluate(EventSpec::at_sup(), at(2)));
  EXPECT_FALSE(evaluate(EventSpec::at_sup(), at(3)));
  EXPECT_TRUE(evaluate(EventSpec::drawdown_cmp(Cmp::eq, 1), at(3)));
  EXPECT_TRUE(evaluate(EventSpec::sup_cmp(Cmp::ge, 3), at(4)));
  EXPECT_TRUE(evaluate(EventSpec::time_cmp(Cmp::le, 1), at(1)));
  EXPECT_TRUE(evaluate(EventSpec::last_step_eq(0), at(4)));
  EXPECT_FALSE(evaluate(EventSpec::last_step_eq(0), at(0)));
}

TEST(EventSpec, StepsAllEqual) {
  const auto w = SequencePath::values({1, 1, 0, 1}).cumulative();
  const auto f = EventSpec::steps_all_equal(1);
  EXPECT_TRUE(evaluate(f, view_of(w).prefix(0)));
  EXPECT_TRUE(evaluate(f, view_of(w).prefix(2)));
  EXPECT_FALSE(evaluate(f, view_of(w).prefix(3)));
}

TEST(EventSpec, Combinators) {
  const auto t = EventSpec::always(), f = EventSpec::never();
  EXPECT_FALSE(evaluate(EventSpec::all_of({t, f}), at(1)));
  EXPECT_TRUE(evaluate(EventSpec::any_of({t, f}), at(1)));
  EXPECT_TRUE(evaluate(EventSpec::negate(f), at(1)));
}

TEST(EventSpec, JumpCountOnEventPath) {
  const EventPath p(1.0, {1.0, 2.0}, {-0.5, -0.5}, 3.0);
  EXPECT_TRUE(evaluate(EventSpec::jump_count_cmp(Cmp::eq, 1), p.truncated(1.5)));
  EXPECT_TRUE(evaluate(EventSpec::jump_count_cmp(Cmp::eq, 2), p.truncated(2.0)));
}

TEST(PathEvent, StepEq) {
  const auto walk = SequencePath::values({0, 1}).cumulative();
  const auto inc = view_of(walk);
  EXPECT_TRUE(evaluate(PathEvent::step_eq(1, 0), inc).is_yes());
  EXPECT_TRUE(evaluate(PathEvent::step_eq(2, 0), inc).is_no());
  EXPECT_TRUE(evaluate(PathEvent::step_eq(3, 0), inc).is_undecided());
}

TEST(PathEvent, NeverReachesUsesTailRule) {
  const auto walk = SequencePath::walk({0, -1, -2, -3, -4, -5});
  const auto inc = view_of(walk);
  EXPECT_TRUE(evaluate(PathEvent::never_reaches(1), inc).is_undecided());
  const Truth t = evaluate(PathEvent::never_reaches(1), inc, TailRule{-1.0, 4.0});
  EXPECT_TRUE(t.is_yes());
  EXPECT_TRUE(t.assumed);
  EXPECT_TRUE(evaluate(PathEvent::never_reaches(1), inc, TailRule{-1.0, 10.0}).is_undecided());
  EXPECT_TRUE(evaluate(PathEvent::never_reaches(1), inc, TailRule{0.5, kInf}).is_no());
  EXPECT_TRUE(evaluate(PathEvent::never_reaches(-2), inc).is_no());
  EXPECT_TRUE(PathEvent::never_reaches(1).tail_dependent());
  EXPECT_FALSE(PathEvent::step_eq(1, 0).tail_dependent());
}

TEST(PathEvent, JumpEvents) {
  const EventPath inc(1.0, {1.0, 3.0}, {-0.5, -2.0}, 5.0);
  EXPECT_TRUE(evaluate(PathEvent::unit_drift_then_jump(1), inc).is_yes());
  EXPECT_TRUE(evaluate(PathEvent::unit_drift_then_jump(2), inc).is_no());
  EXPECT_TRUE(evaluate(PathEvent::first_jump_size_in(-1, 0), inc).is_yes());
  EXPECT_TRUE(evaluate(PathEvent::no_jump_before(1.0), inc).is_yes());
  EXPECT_TRUE(evaluate(PathEvent::no_jump_before(1.5), inc).is_no());
  EXPECT_TRUE(evaluate(PathEvent::value_at_cmp(2.0, Cmp::eq, 1.5), inc).is_yes());
}

TEST(PastStatistic, Values) {
  const auto p = at(3);
  EXPECT_EQ(evaluate(PastStatistic::of(PastStatistic::Kind::time), p), 3);
  EXPECT_EQ(evaluate(PastStatistic::of(PastStatistic::Kind::value), p), 2);
  EXPECT_EQ(evaluate(PastStatistic::of(PastStatistic::Kind::running_sup), p), 3);
  EXPECT_EQ(evaluate(PastStatistic::of(PastStatistic::Kind::drawdown), p), 1);
  EXPECT_EQ(evaluate(PastStatistic::of(PastStatistic::Kind::last_step), p), -1);
  EXPECT_EQ(evaluate(PastStatistic::of(PastStatistic::Kind::count_steps_eq, 2), p), 1);
  EXPECT_EQ(evaluate(PastStatistic::of(PastStatistic::Kind::time_since_sup), p), 1);
  EXPECT_EQ(evaluate(PastStatistic::of(PastStatistic::Kind::value_at_lag, 2), p), 1);
  EXPECT_EQ(evaluate(PastStatistic::of(PastStatistic::Kind::value_at_lag, 9), p), 0);
  EXPECT_EQ(evaluate(PastStatistic::indicator(EventSpec::at_sup()), p), 0);
  EXPECT_EQ(evaluate(PastStatistic::of(PastStatistic::Kind::constant, 4), p), 4);
}

TEST(FutureFunctional, Values) {
  const auto walk = SequencePath::walk({0, 1, 3, 2});
  const auto inc = view_of(walk);
  EXPECT_EQ(evaluate(FutureFunctional::step(2), inc), 2.0);
  EXPECT_EQ(evaluate(FutureFunctional::of(FutureFunctional::Kind::increment_at, 3), inc), 2.0);
  EXPECT_EQ(evaluate(FutureFunctional::of(FutureFunctional::Kind::sup_over, 3), inc), 3.0);
  EXPECT_EQ(evaluate(FutureFunctional::of(FutureFunctional::Kind::inf_over, 3), inc), 0.0);
  EXPECT_FALSE(evaluate(FutureFunctional::step(4), inc).has_value());
  EXPECT_EQ(evaluate(FutureFunctional::constant(7), inc), 7.0);
}

TEST(FutureFunctional, JumpFunctionals) {
  const EventPath inc(1.0, {1.0, 3.0}, {-0.5, -2.0}, 5.0);
  EXPECT_EQ(evaluate(FutureFunctional::of(FutureFunctional::Kind::first_jump_time, 10), inc), 1.0);
  EXPECT_EQ(evaluate(FutureFunctional::of(FutureFunctional::Kind::first_jump_size, 0), inc), -0.5);
  EXPECT_EQ(evaluate(FutureFunctional::of(FutureFunctional::Kind::jump_count, 4), inc), 2.0);
}

TEST(Serialization, RoundTripNames) {
  const nlohmann::json j = EventSpec::all_of({EventSpec::at_sup(), EventSpec::time_cmp(Cmp::ge, 1)});
  EXPECT_EQ(j["kind"], "all-of");
  EXPECT_EQ(j["args"][1]["kind"], "time");
  EXPECT_EQ(nlohmann::json(FutureFunctional::step(2))["kind"], "step(2)");
}

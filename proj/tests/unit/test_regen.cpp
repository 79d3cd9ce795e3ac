#include <gtest/gtest.h>

#include <cmath>

#include "indtime/regen.hpp"

using namespace indtime;

namespace {
const Path kTwoJumps = EventPath(1.0, {2.0, 5.0}, {-0.5, -0.5}, 8.0);
const EngineSpec kDriftJump = EngineSpec::levy(LevySpec::drift_minus_cp(1.0, 0.5, StepLaw::exponential(1.0)));
}  // namespace

TEST(Terminal, Zero) {
  Rng rng(SeedStream{});
  EXPECT_EQ(sample_itt(TerminalTimeSpec::zero(), nullptr, rng), TimeValue::finite(0));
}

TEST(Terminal, JumpPattern) {
  Rng rng(SeedStream{});
  const Path p = EventPath(0.0, {1.0, 3.0}, {-0.5, -2.0}, 5.0);
  EXPECT_EQ(sample_itt(TerminalTimeSpec::jump_pattern(-kInf, -1.0), &p, rng), TimeValue::finite(3));
  const Path q = EventPath(0.0, {1.0}, {-0.5}, 5.0);
  EXPECT_TRUE(sample_itt(TerminalTimeSpec::jump_pattern(-kInf, -1.0), &q, rng).is_undecided());
}

TEST(Terminal, MinWithExponentialMean) {
  const double lambda = 2.0;
  const auto spec = TerminalTimeSpec::min_with_exponential(TerminalTimeSpec::infinite(), lambda);
  const int n = 100000;
  double s = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng(SeedStream::of(5, seed_domain::terminal, i));
    s += sample_itt(spec, nullptr, rng).time();
  }
  EXPECT_NEAR(s / n, 1 / lambda, 4 / (lambda * std::sqrt(n)));
}

TEST(Terminal, RejectsBadRate) {
  EXPECT_THROW(TerminalTimeSpec::exponential(0.0), std::invalid_argument);
  EXPECT_EQ(TerminalTimeSpec::exponential(2.0).known_rate(), 2.0);
}

TEST(RealizeIf, LebesgueIsSlopeOne) {
  Rng rng(SeedStream{});
  const auto r = realize_if(IncrementalFunctional::lebesgue(), Path{EventPath(0.0, {}, {}, 3.0)}, rng);
  EXPECT_TRUE(r.atoms.empty());
  ASSERT_EQ(r.segments.size(), 1u);
  EXPECT_EQ(r.segments[0].rate, 1.0);
  EXPECT_DOUBLE_EQ(r.value(2.0), 2.0);
}

TEST(RealizeIf, UnitDriftThenJumpAtoms) {
  Rng rng(SeedStream{});
  const auto r = realize_if(IncrementalFunctional::unit_drift_then_jump(1), kTwoJumps, rng);
  ASSERT_EQ(r.atoms.size(), 2u);
  EXPECT_DOUBLE_EQ(r.atoms[0].time, 1.0);
  EXPECT_DOUBLE_EQ(r.atoms[1].time, 4.0);
  EXPECT_EQ(r.atoms[0].mass, 1.0);
  EXPECT_TRUE(r.segments.empty());
}

TEST(RealizeIf, StoppedAtKnownTime) {
  Rng rng(SeedStream{});
  const auto r = stopped_at(realize_if(IncrementalFunctional::lebesgue(), Path{EventPath(0.0, {}, {}, 3.0)}, rng),
                            TimeValue::finite(1.3));
  EXPECT_DOUBLE_EQ(r.value(1.0), 1.0);
  EXPECT_DOUBLE_EQ(r.value(1.3), 1.3);
  EXPECT_DOUBLE_EQ(r.value(2.5), 1.3);
}

TEST(RealizeIf, NondecreasingProperty) {
  const auto a = IncrementalFunctional::stopped(IncrementalFunctional::lebesgue(), TerminalTimeSpec::exponential(1));
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng prng(SeedStream::of(8, seed_domain::paths, i));
    Rng trng(SeedStream::of(8, seed_domain::terminal, i));
    const Path p = sample_path(kDriftJump, SampleBudget{10, 0.01}, prng);
    const auto r = realize_if(a, p, trng);
    double last = 0;
    EXPECT_EQ(r.value(0.0), 0.0);
    for (double t = 0.0; t <= std::min(10.0, r.decided_until); t += 0.1) {
      ASSERT_GE(r.value(t), last);
      last = r.value(t);
    }
  }
}

TEST(IfIdentity, ZeroFunctionalBothSidesZero) {
  IfIdentityConfig c;
  c.n_paths = 2000;
  const auto a = IncrementalFunctional::stopped(IncrementalFunctional::lebesgue(), TerminalTimeSpec::exponential(1));
  const auto r = check_if_identity(kDriftJump, SampleBudget{20, 0.01}, a, FutureFunctional::constant(0.0),
                                   PastProcessSpec::one(), c);
  EXPECT_EQ(r.details["lhs"].get<double>(), 0.0);
  EXPECT_EQ(r.details["rhs"].get<double>(), 0.0);
}

TEST(IfIdentity, ExponentialClosedForm) {
  IfIdentityConfig c;
  c.n_paths = 20000;
  c.seed = 3;
  const double lambda = 1.0;
  const auto a =
      IncrementalFunctional::stopped(IncrementalFunctional::lebesgue(), TerminalTimeSpec::exponential(lambda));
  const auto r = check_if_identity(kDriftJump, SampleBudget{30, 0.01}, a, FutureFunctional::constant(1.0),
                                   PastProcessSpec::one(), c);
  EXPECT_TRUE(r.passed()) << r.details.dump();
  EXPECT_NEAR(r.details["lhs"].get<double>(), 1 / lambda, 3 * r.details["se_lhs"].get<double>());
  EXPECT_NEAR(r.details["rhs"].get<double>(), 1 / lambda, 3 * r.details["se_rhs"].get<double>());
}

TEST(IfFactor, ContinuousAtZero) {
  EXPECT_DOUBLE_EQ(if_factor(0.0), 1.0);
  EXPECT_NEAR(if_factor(1e-9), 1.0, 1e-8);
  EXPECT_NEAR(if_factor(1.0), 1.0 / (1.0 - std::exp(-1.0)), 1e-12);
}

#include <gtest/gtest.h>

#include "indtime/catalog.hpp"
#include "indtime/reference.hpp"

using namespace indtime;

namespace {
const EngineSpec kBernoulliWalk = EngineSpec::iid(StepLaw::bernoulli(0.5));
const EngineSpec kDriftJump = EngineSpec::levy(LevySpec::drift_minus_cp(1.0, 0.5, StepLaw::exponential(1.0)));
}  // namespace

TEST(Reference, WholeSpaceReproducesEngine) {
  ReferenceOptions o;
  o.target = 50;
  o.seed = 4;
  std::vector<Path> got;
  reference_conditional_sampler(kBernoulliWalk, SampleBudget{5, 1}, PathEvent::whole(), o, [&](const Path& p) {
    got.push_back(p);
    return true;
  });
  ASSERT_EQ(got.size(), 50u);
  for (std::size_t i = 0; i < got.size(); ++i) {
    Rng r(SeedStream::of(4, seed_domain::reference, i));
    EXPECT_EQ(got[i], sample_path(kBernoulliWalk, SampleBudget{5, 1}, r));
  }
}

TEST(Reference, FirstCoordinateZero) {
  ReferenceOptions o;
  o.target = 4000;
  ReferenceStats s;
  const auto rows = reference_samples(kBernoulliWalk, SampleBudget{6, 1}, PathEvent::step_eq(1, 0),
                                      {FutureFunctional::step(1), FutureFunctional::step(2)}, o, &s);
  ASSERT_EQ(rows.size(), 4000u);
  for (const auto& r : rows) EXPECT_EQ(r[0], 0.0);
  EXPECT_NEAR(s.acceptance(), 0.5, 4 * 0.5 / std::sqrt(double(s.tried)));
}

TEST(Reference, EmptyEventRaises) {
  ReferenceOptions o;
  o.target = 10;
  EXPECT_THROW(reference_samples(kBernoulliWalk, SampleBudget{6, 1}, PathEvent::empty(), {FutureFunctional::step(1)},
                                 o),
               AcceptanceTooLow);
}

TEST(Collect, StoppingTimeSamples) {
  CollectOptions o;
  o.target = 500;
  o.eval.tail = TailRule{-0.7, kInf};
  const auto c = collect_samples(EngineSpec::random_walk(StepLaw::finite_support({-2, -1, 1}, {0.3, 0.4, 0.3})),
                                 SampleBudget{100, 1}, TimeSpec::first_passage(-3, false),
                                 {PastStatistic::of(PastStatistic::Kind::value)}, {FutureFunctional::step(1)}, o);
  EXPECT_EQ(c.effective(), 500u);
  for (const auto& z : c.z) EXPECT_LE(z[0], -3.0);
  EXPECT_EQ(c.discard_fraction(), 0.0);
}

TEST(Collect, JobsDoNotChangeSamples) {
  CollectOptions a;
  a.target = 300;
  CollectOptions b = a;
  b.jobs = 3;
  const auto spec = *example_time("unit-drift-strict-time");
  const std::vector<PastStatistic> z{PastStatistic::of(PastStatistic::Kind::time)};
  const std::vector<FutureFunctional> h{FutureFunctional::of(FutureFunctional::Kind::first_jump_size, 0)};
  const auto x = collect_samples(kDriftJump, SampleBudget{30, 0.01}, spec, z, h, a);
  const auto y = collect_samples(kDriftJump, SampleBudget{30, 0.01}, spec, z, h, b);
  EXPECT_EQ(x.z, y.z);
  EXPECT_EQ(x.h, y.h);
}

TEST(StrictLaw, ConstantFunctionals) {
  StrictLawOptions o;
  o.paths = 5000;
  const auto est = strict_time_law_formula(kDriftJump, SampleBudget{5, 0.01}, IncrementalFunctional::unit_drift_then_jump(1),
                                           {FutureFunctional::constant(1.0), FutureFunctional::constant(2.5)}, o);
  EXPECT_DOUBLE_EQ(est.ratio[0], 1.0);
  EXPECT_NEAR(est.ratio[1], 2.5, 1e-12);
}

TEST(StrictLaw, JumpWithinOneUnit) {
  StrictLawOptions o;
  o.paths = 5000;
  const FutureFunctional h = FutureFunctional::indicator(
      PathEvent::negate(PathEvent::no_jump_before(1.0 + 1e-9)));
  const auto est = strict_time_law_formula(kDriftJump, SampleBudget{5, 0.01}, IncrementalFunctional::unit_drift_then_jump(1),
                                           {h}, o);
  EXPECT_NEAR(est.ratio[0], 1.0, 1e-12);
}

TEST(StrictLaw, NoAtomsRaises) {
  StrictLawOptions o;
  o.paths = 200;
  const EngineSpec no_jumps = EngineSpec::levy(LevySpec::drift_minus_cp(1.0, 1e-9, StepLaw::exponential(1.0)));
  EXPECT_THROW(strict_time_law_formula(no_jumps, SampleBudget{5, 0.01}, IncrementalFunctional::unit_drift_then_jump(1),
                                       {FutureFunctional::constant(1.0)}, o),
               std::domain_error);
}

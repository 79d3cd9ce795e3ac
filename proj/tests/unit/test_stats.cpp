#include <gtest/gtest.h>

#include <cmath>

#include "indtime/rng.hpp"
#include "indtime/stats.hpp"

using namespace indtime;

namespace {
SampleRows uniforms(std::uint64_t stream, std::size_t n, std::size_t d = 1) {
  Rng r(SeedStream::of(77, seed_domain::synthetic, stream));
  SampleRows out(n, std::vector<double>(d));
  for (auto& row : out)
    for (auto& v : row) v = r.uniform();
  return out;
}
}  // namespace

TEST(Independence, IndependentUniformsPass) {
  const auto z = uniforms(1, 10000), h = uniforms(2, 10000);
  PermutationOptions o;
  o.seed = 5;
  EXPECT_GT(*mc_independence_test(z, h, IndependenceStatistic::chi_square_binned, o).p_value, 0.01);
  o.n_permutations = 199;
  EXPECT_GT(*mc_independence_test(z, h, IndependenceStatistic::distance_correlation, o).p_value, 0.01);
}

TEST(Independence, IdenticalSidesReject) {
  const auto z = uniforms(3, 2000);
  PermutationOptions o;
  const auto r = mc_independence_test(z, z, IndependenceStatistic::chi_square_binned, o);
  EXPECT_LE(*r.p_value, 1.0 / (o.n_permutations + 1) + 1e-15);
  EXPECT_EQ(r.verdict, Verdict::fail);
  const auto d = mc_independence_test(z, z, IndependenceStatistic::distance_correlation, o);
  EXPECT_LE(*d.p_value, 1.0 / (o.n_permutations + 1) + 1e-15);
}

TEST(Independence, ConstantSideHasUnitPValue) {
  const SampleRows c(500, std::vector<double>{1.0});
  const auto r = mc_independence_test(c, uniforms(4, 500), IndependenceStatistic::chi_square_binned);
  EXPECT_EQ(*r.p_value, 1.0);
  EXPECT_TRUE(r.passed());
}

TEST(Independence, TooFewSamplesInconclusive) {
  EXPECT_EQ(mc_independence_test(uniforms(5, 50), uniforms(6, 50), IndependenceStatistic::chi_square_binned).verdict,
            Verdict::inconclusive);
}

TEST(Independence, JobsDoNotChangePValue) {
  const auto z = uniforms(7, 1000), h = uniforms(8, 1000);
  PermutationOptions a, b;
  b.jobs = 4;
  EXPECT_EQ(mc_independence_test(z, h, IndependenceStatistic::chi_square_binned, a).p_value,
            mc_independence_test(z, h, IndependenceStatistic::chi_square_binned, b).p_value);
}

TEST(Law, SameSamplerPasses) {
  EXPECT_GT(*mc_law_test(uniforms(9, 5000, 2), uniforms(10, 5000, 2), LawStatistic::ks).p_value, 0.01);
  EXPECT_GT(*mc_law_test(uniforms(9, 5000, 2), uniforms(10, 5000, 2), LawStatistic::chi_square).p_value, 0.01);
}

TEST(Law, ShiftedSampleFails) {
  auto b = uniforms(12, 5000);
  for (auto& row : b) row[0] += 0.1;
  EXPECT_EQ(mc_law_test(uniforms(11, 5000), b, LawStatistic::ks).verdict, Verdict::fail);
  EXPECT_EQ(mc_law_test(uniforms(11, 5000), b, LawStatistic::chi_square).verdict, Verdict::fail);
}

TEST(Ks, StatisticAndPValue) {
  EXPECT_DOUBLE_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_statistic({0, 0}, {1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5);
  EXPECT_NEAR(kolmogorov_q(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(kolmogorov_q(1.63), 0.0098, 5e-4);
  EXPECT_DOUBLE_EQ(ks_p_value(0.0, 10, 10), 1.0);
}

TEST(ChiSquare, SurvivalFunction) {
  EXPECT_NEAR(chi_square_sf(3.841458820694124, 1), 0.05, 1e-9);
  EXPECT_NEAR(chi_square_sf(2.0, 2), std::exp(-1.0), 1e-12);
}

TEST(Binning, EquiprobableAndTies) {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(i);
  const auto bins = equiprobable_bins(v, 4);
  EXPECT_EQ(bins.front(), 0u);
  EXPECT_EQ(bins.back(), 3u);
  const auto tied = equiprobable_bins(std::vector<double>(50, 2.0), 4);
  for (auto b : tied) EXPECT_EQ(b, 0u);
}

TEST(Pearson, PerfectAssociation) {
  const std::vector<std::size_t> a{0, 0, 1, 1}, b{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(pearson_statistic(a, b, 2, 2), 4.0);
}

TEST(DistanceCorrelation, Extremes) {
  const auto x = uniforms(13, 300);
  EXPECT_NEAR(distance_correlation(x, x), 1.0, 1e-12);
  EXPECT_LT(distance_correlation(x, uniforms(14, 300)), 0.05);
}

TEST(StatisticNames, RoundTrip) {
  EXPECT_EQ(parse_independence_statistic(to_string(IndependenceStatistic::distance_correlation)),
            IndependenceStatistic::distance_correlation);
  EXPECT_EQ(parse_law_statistic("chi-square"), LawStatistic::chi_square);
  EXPECT_THROW(parse_law_statistic("anderson"), std::invalid_argument);
}

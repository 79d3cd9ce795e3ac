#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "indtime/rng.hpp"

using namespace indtime;

// Known-answer vectors of the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(Rng, SameStreamIsBitIdentical) {
  Rng a(SeedStream::of(7, seed_domain::paths, 3));
  Rng b(SeedStream::of(7, seed_domain::paths, 3));
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, DistinctStreamsDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t m = 0; m < 4; ++m)
    for (std::uint16_t d = 1; d <= 7; ++d)
      for (std::uint64_t i = 0; i < 16; ++i) first.insert(Rng(SeedStream::of(m, d, i))());
  EXPECT_EQ(first.size(), 4u * 7u * 16u);
}

TEST(Rng, UniformMoments) {
  Rng r(SeedStream::of(1, seed_domain::synthetic, 0));
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(s2 / n, 1.0 / 3, 0.005);
}

TEST(Rng, NormalAndExponentialMoments) {
  Rng r(SeedStream::of(2, seed_domain::synthetic, 0));
  const int n = 200000;
  double sn = 0, sn2 = 0, se = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
    se += r.exponential(2.0);
  }
  EXPECT_NEAR(sn / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(sn2 / n, 1.0, 4 * std::sqrt(2.0 / n));
  EXPECT_NEAR(se / n, 0.5, 4 * 0.5 / std::sqrt(n));
}

TEST(Rng, BelowIsUniform) {
  Rng r(SeedStream::of(3, seed_domain::synthetic, 0));
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4 * std::sqrt(n / 7.0));
}

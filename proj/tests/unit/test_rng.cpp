#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "partcrop/rng.hpp"

using namespace partcrop;

TEST(SplitMix, KnownOutputs) {
  // Reference values of the SplitMix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(0x9e3779b97f4a7c15ULL), 0x6e789e6aa1b965f4ULL);
}

TEST(Fnv1a, KnownOutputs) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(RngStream, Deterministic) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs |= x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(RngStream, DeriveSeedSeparatesKeys) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t key = 0; key < 1000; ++key) seen.insert(derive_seed(5, key));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 1));
}

TEST(RngStream, UniformRangeAndMoments) {
  Rng rng(1);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(RngStream, NormalMoments) {
  Rng rng(2);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    ASSERT_TRUE(std::isfinite(z));
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(RngStream, UniformIntCoversClosedRange) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.uniform_int(3, 9);
    ASSERT_GE(v, 3u);
    ASSERT_LE(v, 9u);
    ++hits[v - 3];
  }
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
  EXPECT_EQ(rng.uniform_int(5, 5), 5u);
}

TEST(RngStream, ShuffleIsPermutation) {
  Rng rng(4);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  auto w = v;
  rng.shuffle(std::span<int>(w));
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

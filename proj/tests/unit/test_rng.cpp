#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "apmarkov/rng.hpp"
#include "apmarkov/stats.hpp"

using namespace apmarkov;

// Known-answer vectors published with the Random123 Philox4x32-10 reference.
TEST(Philox, KnownAnswerVectors) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::block(C{0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Stream, ReproducibleAndSeparated) {
  Stream a(7, 3), b(7, 3), c(7, 4), d(8, 3), e(7, 3, 1);
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE(x, d.next_u64());
  EXPECT_NE(x, e.next_u64());
}

TEST(Stream, UniformIsStrictlyInsideUnitInterval) {
  Stream s(1, 0);
  std::vector<double> u(200000);
  for (auto& v : u) {
    v = s.uniform();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
  const auto m = summarize(u);
  EXPECT_NEAR(m.mean, 0.5, 4 * std::sqrt(1.0 / 12.0 / u.size()));
  EXPECT_NEAR(m.variance, 1.0 / 12.0, 2e-3);
}

TEST(Stream, NormalMoments) {
  Stream s(2, 0);
  const std::size_t n = 400000;
  std::vector<double> z(n);
  for (auto& v : z) v = s.normal();
  const auto m = summarize(z);
  EXPECT_NEAR(m.mean, 0.0, 4.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(m.variance, 1.0, 4.0 * std::sqrt(2.0 / n));
  double m4 = 0.0;
  for (double v : z) m4 += v * v * v * v;
  EXPECT_NEAR(m4 / n, 3.0, 0.06);
  // Tail frequency against Φ.
  std::size_t tail = 0;
  for (double v : z) tail += v > 2.0;
  const double p = 1.0 - normal_cdf(2.0);
  EXPECT_NEAR(static_cast<double>(tail) / n, p, 4 * std::sqrt(p * (1 - p) / n));
}

TEST(Stream, BelowIsUniformOverRange) {
  Stream s(3, 0);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = s.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);  // 0.999 quantile, 6 degrees of freedom
}

TEST(Stream, SplitmixIsABijectionOnSamples) {
  EXPECT_NE(splitmix64(0), splitmix64(1));
  EXPECT_EQ(derive_key(5, 9), derive_key(5, 9));
  EXPECT_NE(derive_key(5, 9), derive_key(9, 5));
}

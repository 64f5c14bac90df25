#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "fracgelfand/threshold.hpp"

namespace fg = fracgelfand;

TEST(Margin, Examples) {
  EXPECT_GT(fg::margin({7, 0.5}), 0.0);
  EXPECT_LT(fg::margin({9, 0.5}), 0.0);
  EXPECT_NEAR(fg::margin({10, 1.0}), 0.0, 1e-12);
  EXPECT_THROW(fg::margin({1, 0.5}), fg::RegimeError);
}

TEST(Margin, EqualsLogRatioOfConstants) {
  for (int n : {2, 5, 11, 40})
    for (double s : {0.2, 0.6, 0.95}) {
      const fg::ProblemParams p(n, s);
      EXPECT_NEAR(fg::margin(p), fg::log_lambda0(p) - fg::log_hardy_constant(p), 1e-12);
    }
}

TEST(Margin, DecreasingInDimension) {
  for (int k = 1; k < 100; ++k) {
    const double s = k / 100.0;
    for (int n = 2; n < 60; ++n) {
      ASSERT_GT(fg::margin({n, s}), fg::margin({n + 1, s})) << n << ' ' << s;
    }
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(fg::classify({1, 0.6}).regime, fg::Regime::BoundedSubcritical);
  EXPECT_FALSE(fg::classify({1, 0.6}).margin.has_value());
  EXPECT_EQ(fg::classify({1, 0.5}).regime, fg::Regime::BoundedSubcritical);
  EXPECT_EQ(fg::classify({5, 0.1}).regime, fg::Regime::BoundedByInequality);
  EXPECT_EQ(fg::classify({10, 0.99}).regime, fg::Regime::Inconclusive);
  EXPECT_EQ(fg::classify({12, 0.5}).regime, fg::Regime::Inconclusive);
  EXPECT_EQ(fg::classify({3, 0.5}).regime, fg::Regime::BoundedByInequality);
  EXPECT_EQ(fg::to_string(fg::Regime::Inconclusive), "inconclusive");
}

TEST(Classify, AgreesWithDirectInequality) {
  using boost::math::tgamma;
  for (int n = 1; n <= 30; ++n)
    for (int k = 1; k < 100; ++k) {
      const double s = k / 100.0;
      const fg::ProblemParams p(n, s);
      if (!p.supercritical()) continue;
      const double lhs = tgamma(0.5 * n) * tgamma(1 + s) / tgamma(0.5 * (n - 2 * s));
      const double q = tgamma(0.25 * (n + 2 * s)) / tgamma(0.25 * (n - 2 * s));
      const bool direct = lhs > q * q;
      ASSERT_EQ(fg::classify(p).regime == fg::Regime::BoundedByInequality, direct) << n << ' ' << s;
    }
}

TEST(CriticalS, Thresholds) {
  const auto s8 = fg::critical_s(8);
  const auto s9 = fg::critical_s(9);
  ASSERT_TRUE(s8 && s9);
  EXPECT_NEAR(*s8, 0.28206, 1e-4);
  EXPECT_NEAR(*s9, 0.63237, 1e-4);
  EXPECT_NEAR(fg::margin({8, *s8}), 0.0, 1e-7);
  // n = 8 is bounded above the root
  EXPECT_LT(fg::margin({8, *s8 - 1e-6}), 0.0);
  EXPECT_GT(fg::margin({8, *s8 + 1e-6}), 0.0);
  for (int n = 1; n <= 7; ++n) EXPECT_FALSE(fg::critical_s(n)) << n;
  for (int n = 10; n <= 25; ++n) EXPECT_FALSE(fg::critical_s(n)) << n;
  EXPECT_THROW(fg::critical_s(0), fg::DomainError);
  EXPECT_THROW(fg::critical_s(8, 0.0), fg::DomainError);
}

TEST(CriticalS, SingleSignChange) {
  for (int n : {8, 9}) {
    int changes = 0;
    bool prev = fg::margin({n, 1e-4}) > 0.0;
    for (int k = 2; k < 10000; ++k) {
      const bool cur = fg::margin({n, k * 1e-4}) > 0.0;
      changes += cur != prev;
      prev = cur;
    }
    EXPECT_EQ(changes, 1) << n;
  }
}

TEST(ThresholdTable, Rows) {
  const auto rows = fg::threshold_table(10);
  ASSERT_EQ(rows.size(), 10u);
  for (int n = 1; n <= 7; ++n) {
    EXPECT_TRUE(rows[n - 1].all_s_bounded);
    EXPECT_FALSE(rows[n - 1].critical_s);
  }
  EXPECT_FALSE(rows[7].all_s_bounded);
  EXPECT_NEAR(*rows[7].critical_s, 0.28206, 1e-4);
  EXPECT_FALSE(rows[8].all_s_bounded);
  EXPECT_NEAR(*rows[8].critical_s, 0.63237, 1e-4);
  EXPECT_FALSE(rows[9].all_s_bounded);
  EXPECT_FALSE(rows[9].critical_s);

  const auto one = fg::threshold_table(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(one[0].all_s_bounded);
  EXPECT_THROW(fg::threshold_table(0), fg::DomainError);
}

TEST(ThresholdTable, DimensionTen) {
  for (int k = 1; k < 1000; ++k) EXPECT_LT(fg::margin({10, k * 1e-3}), 0.0);
}

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "fracgelfand/specfun.hpp"

namespace fg = fracgelfand;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(LogGamma, KnownValues) {
  EXPECT_EQ(fg::log_gamma(1.0), 0.0);
  EXPECT_NEAR(fg::log_gamma(2.0), 0.0, 1e-15);
  EXPECT_NEAR(fg::log_gamma(6.0), 4.787491742782046, 1e-14);
  EXPECT_NEAR(fg::log_gamma(0.5), 0.5723649429247001, 1e-15);
  EXPECT_NEAR(fg::log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-15);
}

TEST(LogGamma, MatchesBoostOnWideRange) {
  // relative error <= 1e-13 on (0, 200]; absolute near the zeros at 1 and 2
  double worst = 0.0;
  for (int k = 1; k <= 20000; ++k) {
    const double x = 200.0 * k / 20000.0;
    const double ref = boost::math::lgamma(x);
    worst = std::max(worst, rel(fg::log_gamma(x), ref));
  }
  for (double x : {1e-300, 1e-12, 1e-6, 0.001, 0.01, 0.1, 0.3, 0.999999, 1.000001, 1.5, 1.999999, 2.5, 9.99, 10.0,
                   10.01, 170.5, 199.999}) {
    worst = std::max(worst, rel(fg::log_gamma(x), boost::math::lgamma(x)));
  }
  EXPECT_LE(worst, 1e-13);
}

TEST(LogGamma, Recurrence) {
  for (int k = 0; k <= 9990; ++k) {
    const double x = 0.1 + k * 0.01;
    ASSERT_NEAR(fg::log_gamma(x + 1.0) - fg::log_gamma(x), std::log(x), 1e-12) << "x = " << x;
  }
}

TEST(LogGamma, Reflection) {
  const double pi = std::numbers::pi;
  for (int k = 1; k < 1000; ++k) {
    const double x = k / 1000.0;
    ASSERT_NEAR(fg::log_gamma(x) + fg::log_gamma(1.0 - x), std::log(pi / std::sin(pi * x)), 1e-11) << "x = " << x;
  }
}

TEST(LogGamma, Duplication) {
  const double pi = std::numbers::pi;
  for (int k = 1; k <= 2000; ++k) {
    const double x = k * 0.05;
    const double rhs =
        fg::log_gamma(x) + fg::log_gamma(x + 0.5) + (2.0 * x - 1.0) * std::log(2.0) - 0.5 * std::log(pi);
    ASSERT_NEAR(fg::log_gamma(2.0 * x), rhs, 1e-11 * std::max(1.0, std::abs(rhs))) << "x = " << x;
  }
}

TEST(LogGamma, RejectsBadArguments) {
  EXPECT_THROW(fg::log_gamma(0.0), fg::DomainError);
  EXPECT_THROW(fg::log_gamma(-1.5), fg::DomainError);
  EXPECT_THROW(fg::log_gamma(std::numeric_limits<double>::infinity()), fg::DomainError);
  EXPECT_THROW(fg::log_gamma(std::numeric_limits<double>::quiet_NaN()), fg::DomainError);
  EXPECT_THROW(fg::log_gamma_ratio(1.0, -2.0), fg::DomainError);
}

TEST(LogGammaRatio, Examples) {
  EXPECT_NEAR(fg::log_gamma_ratio(5.0, 4.0), std::log(4.0), 1e-13);
  EXPECT_EQ(fg::log_gamma_ratio(2.0, 2.0), 0.0);
  for (double b : {0.25, 1.0, 3.7, 49.5, 120.0}) {
    EXPECT_NEAR(fg::log_gamma_ratio(b + 1.0, b), std::log(b), 1e-13) << b;
  }
}

TEST(LogGammaRatio, HalfStepAgainstSeries) {
  // ln Gamma(50) - ln Gamma(49.5) from the asymptotic series of
  // Gamma(x + 1/2)/Gamma(x) = sqrt(x) (1 - 1/(8x) + 1/(128x^2) + 5/(1024x^3) - 21/(32768x^4))
  const double x = 49.5;
  const double series = 0.5 * std::log(x) +
                        std::log1p(-1.0 / (8 * x) + 1.0 / (128 * x * x) + 5.0 / (1024 * x * x * x) -
                                   21.0 / (32768 * x * x * x * x));
  EXPECT_NEAR(fg::log_gamma_ratio(50.0, 49.5), series, 1e-11);
  EXPECT_NEAR(fg::log_gamma_ratio(50.0, 49.5), boost::math::lgamma(50.0) - boost::math::lgamma(49.5), 1e-13);
}

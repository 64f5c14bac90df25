#pragma once

// Log-space Gamma function.
//
// Three regimes:
//   x >= 10          Stirling series with eight Bernoulli corrections.
//   0.5 <= x < 1.5   Taylor series of ln Gamma(1+z) in terms of zeta(k) - 1,
//                    which keeps full relative accuracy next to the root at 1.
//   elsewhere        Recurrence Gamma(x+1) = x Gamma(x) into one of the above.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fracgelfand/errors.hpp"

namespace fracgelfand {

namespace detail {

inline constexpr int kZetaTerms = 40;

// zeta(k) - 1 for k = 2..kZetaTerms+1, by direct summation plus an
// Euler-Maclaurin tail, accumulated in long double.
inline const std::array<double, kZetaTerms>& zeta_minus_one() {
  static const std::array<double, kZetaTerms> table = [] {
    std::array<double, kZetaTerms> out{};
    constexpr int M = 40;
    for (int idx = 0; idx < kZetaTerms; ++idx) {
      const long double k = idx + 2;
      long double sum = 0.0L;
      for (int j = M - 1; j >= 2; --j) sum += std::pow(static_cast<long double>(j), -k);
      const long double m = M;
      const long double mk = std::pow(m, -k);
      sum += m * mk / (k - 1.0L) + 0.5L * mk + k * mk / (12.0L * m) -
             k * (k + 1.0L) * (k + 2.0L) * mk / (720.0L * m * m * m) +
             k * (k + 1.0L) * (k + 2.0L) * (k + 3.0L) * (k + 4.0L) * mk /
                 (30240.0L * m * m * m * m * m);
      out[idx] = static_cast<double>(sum);
    }
    return out;
  }();
  return table;
}

// ln Gamma(1+z) for |z| <= 0.5.
inline double log_gamma_1p(double z) {
  constexpr long double euler_gamma = 0.57721566490153286060651209008240243L;
  const auto& zm1 = zeta_minus_one();
  long double series = 0.0L;
  long double zk = static_cast<long double>(z) * z;
  for (int idx = 0; idx < kZetaTerms; ++idx) {
    const int k = idx + 2;
    const long double term = zm1[idx] * zk / k;
    series += (k % 2 == 0) ? term : -term;
    zk *= z;
  }
  return static_cast<double>(-std::log1p(static_cast<long double>(z)) +
                             z * (1.0L - euler_gamma) + series);
}

inline double log_gamma_stirling(double x) {
  static constexpr std::array<double, 8> c = {
      1.0 / 12.0,     -1.0 / 360.0, 1.0 / 1260.0,       -1.0 / 1680.0,
      1.0 / 1188.0,   -691.0 / 360360.0, 1.0 / 156.0,   -3617.0 / 122400.0};
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double corr = 0.0;
  for (int k = 7; k >= 0; --k) corr = corr * inv2 + c[k];
  corr *= inv;
  constexpr double half_log_two_pi = 0.91893853320467274178;
  return (x - 0.5) * std::log(x) - x + half_log_two_pi + corr;
}

}  // namespace detail

/// ln Gamma(x) for x > 0. Throws DomainError for non-positive or non-finite x.
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be positive and finite, got " +
                      std::to_string(x));
  }
  if (x >= 10.0) return detail::log_gamma_stirling(x);
  if (x < 0.5) {
    // Gamma(x) = Gamma(x+1) / x, with x+1 in [1, 1.5)
    return detail::log_gamma_1p(x) - std::log(x);
  }
  if (x < 1.5) return detail::log_gamma_1p(x - 1.0);
  if (x < 2.5) return std::log1p(x - 2.0) + detail::log_gamma_1p(x - 2.0);
  // 2.5 <= x < 10: recur down into [1.5, 2.5); the product term is >= 1 so
  // nothing cancels.
  double y = x;
  double prod = 1.0;
  while (y >= 2.5) {
    y -= 1.0;
    prod *= y;
  }
  return std::log(prod) + std::log1p(y - 2.0) + detail::log_gamma_1p(y - 2.0);
}

/// ln Gamma(a) - ln Gamma(b).
inline double log_gamma_ratio(double a, double b) {
  return log_gamma(a) - log_gamma(b);
}

}  // namespace fracgelfand

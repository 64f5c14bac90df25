#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracgelfand/errors.hpp"

namespace fracgelfand {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

inline constexpr int kMaxGaussOrder = 64;

inline GaussRule build_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Cached Gauss-Legendre rule of the given order (1..64). Thread-safe.
inline const GaussRule& gauss_legendre(int order) {
  static const std::vector<GaussRule> rules = [] {
    std::vector<GaussRule> out(detail::kMaxGaussOrder + 1);
    for (int n = 1; n <= detail::kMaxGaussOrder; ++n) {
      out[n] = detail::build_gauss_legendre(n);
    }
    return out;
  }();
  if (order < 1 || order > detail::kMaxGaussOrder) {
    throw ConfigError("gauss_legendre: order must lie in [1, 64]");
  }
  return rules[order];
}

/// Integral of f over [a, b] with a single Gauss-Legendre panel.
template <class F>
double gauss_integrate(F&& f, double a, double b, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int q = 0; q < rule.order(); ++q) sum += rule.weights[q] * f(mid + half * rule.nodes[q]);
  return half * sum;
}

/// Integral of f over [a, b] split into `panels` equal Gauss-Legendre panels.
template <class F>
double gauss_integrate_composite(F&& f, double a, double b, int order, int panels) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) sum += gauss_integrate(f, a + p * h, a + (p + 1) * h, order);
  return sum;
}

}  // namespace fracgelfand

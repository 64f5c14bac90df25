#pragma once

// Angular part of the radially reduced fractional Laplacian:
//
//   k(r, rho) = \int_{S^{n-1}} |r e_1 - rho w|^{-(n+2s)} dsigma(w).
//
// With M = max(r, rho), t = min(r, rho) / M and z = t^2, k = |S^{n-1}| M^{-n-2s} F(t),
// where F(0) = 1 and F blows up like (1-z)^{-1-2s} as t -> 1. The assembly uses
// the tabulated G(w) = (1-z)^{1+2s} F, w = -log(1-z), which is smooth and
// bounded on [0, inf) (including the logarithmic case s = 1/2).

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "fracgelfand/constants.hpp"
#include "fracgelfand/quadrature.hpp"

namespace fracgelfand {

namespace detail {

// F(t) for n >= 2, given t and 1 - t separately (1 - t is passed in to keep
// digits when t is within rounding of 1).
inline double reduced_profile(int n, double s, double t, double one_minus_t) {
  const double p = 0.5 * (n + 2.0 * s);
  const double a2 = one_minus_t * one_minus_t;
  auto integrand = [&](double theta) {
    const double sh = std::sin(0.5 * theta);
    const double base = a2 + 4.0 * t * sh * sh;
    const double w = (n == 2) ? 1.0 : std::pow(std::sin(theta), n - 2);
    return w * std::pow(base, -p);
  };
  constexpr int order = 20;
  double sum = 0.0;
  const double pi = std::numbers::pi;
  const double width = t > 0.0 ? one_minus_t / std::sqrt(t) : pi;
  if (width >= 0.25 * pi) {
    sum = gauss_integrate_composite(integrand, 0.0, pi, order, 4);
  } else {
    double lo = 0.0, hi = width;
    while (lo < pi) {
      hi = std::min(hi, pi);
      sum += gauss_integrate(integrand, lo, hi, order);
      lo = hi;
      hi = 2.0 * hi;
    }
  }
  return sphere_area(n - 1) / sphere_area(n) * sum;
}

}  // namespace detail

/// k(r, rho) by direct quadrature over the polar angle. Infinite at r == rho.
inline double angular_kernel(const ProblemParams& p, double r, double rho) {
  if (!(r >= 0.0) || !(rho > 0.0)) throw DomainError("angular_kernel: need r >= 0 and rho > 0");
  const double s = p.s();
  const int n = p.n();
  if (r == rho) return std::numeric_limits<double>::infinity();
  if (n == 1) return std::pow(std::abs(r - rho), -1.0 - 2.0 * s) + std::pow(r + rho, -1.0 - 2.0 * s);
  const double big = std::max(r, rho), small = std::min(r, rho);
  const double t = small / big;
  const double one_minus_t = std::abs(r - rho) / big;
  return sphere_area(n) * std::pow(big, -n - 2.0 * s) * detail::reduced_profile(n, s, t, one_minus_t);
}

/// Tabulated evaluation of k and of the radial integrand rho^{n-1} k(r, rho).
class RadialKernel {
 public:
  static constexpr int kPieces = 40;      // unit-width pieces of w in [0, 40]
  static constexpr int kChebPoints = 21;  // per piece

  explicit RadialKernel(const ProblemParams& p) : params_(p), area_(sphere_area(p.n())) {
    if (p.n() >= 2) build_table();
  }

  const ProblemParams& params() const { return params_; }

  /// G(w) = (1-z)^{1+2s} F(t), w = -log(1-z).
  double profile(double w) const {
    if (w <= 0.0) return 1.0;
    if (w >= kPieces) return tail_value_;
    const int piece = static_cast<int>(w);
    const double x = 2.0 * (w - piece) - 1.0;
    const double* c = &coeffs_[piece * kChebPoints];
    double b1 = 0.0, b2 = 0.0;
    for (int k = kChebPoints - 1; k >= 1; --k) {
      const double b0 = 2.0 * x * b1 - b2 + c[k];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + c[0];
  }

  /// k(r, rho) for r != rho.
  double k(double r, double rho) const {
    const int n = params_.n();
    const double s = params_.s();
    const double d = std::abs(r - rho), sum = r + rho;
    if (n == 1) return std::pow(d, -1.0 - 2.0 * s) + std::pow(sum, -1.0 - 2.0 * s);
    const double big = std::max(r, rho);
    if (std::min(r, rho) == 0.0) return area_ * std::pow(big, -n - 2.0 * s);
    const double log_big = std::log(big);
    const double log_ds = std::log(d * sum);
    return area_ * std::exp((2.0 + 2.0 * s - n) * log_big - (1.0 + 2.0 * s) * log_ds) *
           profile(2.0 * log_big - log_ds);
  }

  /// rho^{n-1} k(r, rho): the kernel of the radial integral over rho in (0, inf).
  double weighted(double r, double rho) const { return weighted_impl(r, rho, std::abs(r - rho)); }

  /// weighted(r, r + t), with the separation |t| taken exactly rather than
  /// recovered from the rounded rho.
  double weighted_offset(double r, double t) const { return weighted_impl(r, r + t, std::abs(t)); }

  /// Coefficient a in F(t) = 1 + a t^2 + O(t^4), used for far-field tails.
  double far_field_coefficient() const {
    const double n = params_.n(), s = params_.s();
    return (n + 2.0 * s) * (s + 1.0) / n;
  }

 private:
  void build_table() {
    const int n = params_.n();
    const double s = params_.s();
    coeffs_.assign(static_cast<std::size_t>(kPieces) * kChebPoints, 0.0);
    std::array<double, kChebPoints> samples{};
    auto g_at = [&](double w) {
      const double one_minus_z = std::exp(-w);
      const double t = std::sqrt(-std::expm1(-w));
      const double one_minus_t = one_minus_z / (1.0 + t);
      return std::exp(-(1.0 + 2.0 * s) * w) * detail::reduced_profile(n, s, t, one_minus_t);
    };
    for (int piece = 0; piece < kPieces; ++piece) {
      for (int j = 0; j < kChebPoints; ++j) {
        const double x = std::cos(std::numbers::pi * (j + 0.5) / kChebPoints);
        samples[j] = g_at(piece + 0.5 * (x + 1.0));
      }
      for (int k = 0; k < kChebPoints; ++k) {
        double c = 0.0;
        for (int j = 0; j < kChebPoints; ++j) {
          c += samples[j] * std::cos(std::numbers::pi * k * (j + 0.5) / kChebPoints);
        }
        c *= 2.0 / kChebPoints;
        if (k == 0) c *= 0.5;
        coeffs_[piece * kChebPoints + k] = c;
      }
    }
    tail_value_ = g_at(kPieces);
  }

  ProblemParams params_;
  double weighted_impl(double r, double rho, double d) const {
    const int n = params_.n();
    const double s = params_.s();
    const double sum = r + rho;
    if (n == 1) return std::pow(d, -1.0 - 2.0 * s) + std::pow(sum, -1.0 - 2.0 * s);
    if (rho == 0.0) return 0.0;
    const double big = std::max(r, rho);
    if (r == 0.0) return area_ * std::pow(rho, -1.0 - 2.0 * s);
    const double log_big = std::log(big);
    const double log_ds = std::log(d * sum);
    return area_ *
           std::exp((2.0 + 2.0 * s - n) * log_big - (1.0 + 2.0 * s) * log_ds + (n - 1) * std::log(rho)) *
           profile(2.0 * log_big - log_ds);
  }

  double area_;
  std::vector<double> coeffs_;
  double tail_value_ = 1.0;
};

}  // namespace fracgelfand

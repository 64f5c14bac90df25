#pragma once

// Closed-form constants of the fractional Gelfand problem. Every quantity is
// assembled in log space and exponentiated once, so large dimensions do not
// overflow the individual Gamma factors.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "fracgelfand/errors.hpp"
#include "fracgelfand/specfun.hpp"

namespace fracgelfand {

/// Dimension n and fractional order s. s = 1 is admitted for analytic
/// cross-checks only; the discrete operator rejects it.
class ProblemParams {
 public:
  ProblemParams(int n, double s) : n_(n), s_(s) {
    if (n < 1) throw DomainError("ProblemParams: dimension must be >= 1");
    if (!(s > 0.0 && s <= 1.0) || !std::isfinite(s)) {
      throw DomainError("ProblemParams: fractional order must lie in (0, 1]");
    }
  }

  int n() const { return n_; }
  double s() const { return s_; }
  /// n > 2s: the power/log profiles and the constants lambda0, H are defined.
  bool supercritical() const { return n_ > 2.0 * s_; }

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;

 private:
  int n_;
  double s_;
};

namespace detail {

inline void require_supercritical(const ProblemParams& p, const char* who) {
  if (!p.supercritical()) {
    throw RegimeError(std::string(who) + ": requires n > 2s (n = " + std::to_string(p.n()) +
                      ", s = " + std::to_string(p.s()) + ")");
  }
}

}  // namespace detail

/// Surface measure of the unit sphere S^{n-1} in R^n.
inline double sphere_area(int n) {
  return 2.0 * std::exp(0.5 * n * std::log(std::numbers::pi) - log_gamma(0.5 * n));
}

/// ln lambda0 = 2s ln 2 + ln Gamma(n/2) + ln Gamma(1+s) - ln Gamma((n-2s)/2).
inline double log_lambda0(const ProblemParams& p) {
  detail::require_supercritical(p, "lambda0");
  const double n = p.n(), s = p.s();
  return 2.0 * s * std::numbers::ln2 + log_gamma(0.5 * n) + log_gamma(1.0 + s) -
         log_gamma(0.5 * (n - 2.0 * s));
}

/// lambda0: log(1/|x|^{2s}) solves (-Delta)^s u = lambda0 e^u in all of R^n.
inline double lambda0(const ProblemParams& p) { return std::exp(log_lambda0(p)); }

inline double log_hardy_constant(const ProblemParams& p) {
  detail::require_supercritical(p, "hardy_constant");
  const double n = p.n(), s = p.s();
  return 2.0 * s * std::numbers::ln2 +
         2.0 * (log_gamma(0.25 * (n + 2.0 * s)) - log_gamma(0.25 * (n - 2.0 * s)));
}

/// H_{n,s} = 2^{2s} Gamma((n+2s)/4)^2 / Gamma((n-2s)/4)^2, the fractional Hardy constant.
inline double hardy_constant(const ProblemParams& p) { return std::exp(log_hardy_constant(p)); }

inline double log_power_coefficient(const ProblemParams& p, double alpha) {
  detail::require_supercritical(p, "power_coefficient");
  const double n = p.n(), s = p.s();
  if (!(alpha > 0.0 && alpha < n - 2.0 * s)) {
    throw DomainError("power_coefficient: alpha must lie in (0, n - 2s)");
  }
  return 2.0 * s * std::numbers::ln2 + log_gamma(0.5 * (alpha + 2.0 * s)) +
         log_gamma(0.5 * (n - alpha)) - log_gamma(0.5 * (n - alpha - 2.0 * s)) -
         log_gamma(0.5 * alpha);
}

/// C(n,s,alpha) with (-Delta)^s |x|^{-alpha} = C |x|^{-alpha-2s}, alpha in (0, n-2s).
inline double power_coefficient(const ProblemParams& p, double alpha) {
  return std::exp(log_power_coefficient(p, alpha));
}

/// c_{n,s} = 4^s s Gamma(n/2+s) / (pi^{n/2} Gamma(1-s)): the constant in front
/// of the singular integral that gives the operator the symbol |xi|^{2s}.
inline double operator_normalization(const ProblemParams& p) {
  const double n = p.n(), s = p.s();
  if (!(s < 1.0)) throw DomainError("operator_normalization: requires 0 < s < 1");
  return std::exp(2.0 * s * std::numbers::ln2 + std::log(s) + log_gamma(0.5 * n + s) -
                  0.5 * n * std::log(std::numbers::pi) - log_gamma(1.0 - s));
}

/// Power coefficients near the two critical exponents.
struct EpsilonExpansion {
  double hardy_side;   ///< C(n,s,(n-2s-eps)/2); tends to H_{n,s}
  double lambda_side;  ///< (2s/eps) C(n,s,n-2s-eps); tends to lambda0
};

inline EpsilonExpansion epsilon_expansion(const ProblemParams& p, double eps) {
  detail::require_supercritical(p, "epsilon_expansion");
  const double gap = p.n() - 2.0 * p.s();
  if (!(eps > 0.0 && eps < gap)) {
    throw DomainError("epsilon_expansion: eps must lie in (0, n - 2s)");
  }
  return {power_coefficient(p, 0.5 * (gap - eps)),
          std::exp(std::log(2.0 * p.s() / eps) + log_power_coefficient(p, gap - eps))};
}

}  // namespace fracgelfand

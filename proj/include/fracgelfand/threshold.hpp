#pragma once

// Regularity classification of (n, s): the extremal solution is bounded when
// n <= 2s, or when n > 2s and lambda0 > H_{n,s}. The margin ln lambda0 - ln H
// is the log of the ratio of the two Gamma expressions (the 2^{2s} cancels).

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "fracgelfand/constants.hpp"

namespace fracgelfand {

enum class Regime { BoundedSubcritical, BoundedByInequality, Inconclusive };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::BoundedSubcritical:
      return "bounded-subcritical";
    case Regime::BoundedByInequality:
      return "bounded-by-inequality";
    case Regime::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

struct RegularityVerdict {
  Regime regime;
  std::optional<double> margin;  ///< only when n > 2s
};

/// ln lambda0(n,s) - ln H_{n,s}. Positive exactly when the boundedness
/// inequality holds.
inline double margin(const ProblemParams& p) {
  detail::require_supercritical(p, "margin");
  const double n = p.n(), s = p.s();
  const double lhs = log_gamma(0.5 * n) + log_gamma(1.0 + s) - log_gamma(0.5 * (n - 2.0 * s));
  const double rhs = 2.0 * (log_gamma(0.25 * (n + 2.0 * s)) - log_gamma(0.25 * (n - 2.0 * s)));
  return lhs - rhs;
}

inline RegularityVerdict classify(const ProblemParams& p) {
  if (!p.supercritical()) return {Regime::BoundedSubcritical, std::nullopt};
  const double m = margin(p);
  return {m > 0.0 ? Regime::BoundedByInequality : Regime::Inconclusive, m};
}

struct ThresholdOptions {
  int scan_samples = 200;
  double s_min = 1e-6;
  double s_max = 1.0 - 1e-9;
};

/// Admissible s-interval for margin(n, .): s in (0, 1) with n > 2s.
inline std::pair<double, double> admissible_s_range(int n, const ThresholdOptions& opt = {}) {
  double hi = opt.s_max;
  if (n < 2) hi = std::min(hi, 0.5 * n - 1e-9);
  return {opt.s_min, hi};
}

/// The s at which margin(n, .) changes sign on the admissible interval, by a
/// bracketing scan followed by bisection to `tol`. Empty when the margin keeps
/// one sign.
inline std::optional<double> critical_s(int n, double tol = 1e-8, const ThresholdOptions& opt = {}) {
  if (n < 1) throw DomainError("critical_s: dimension must be >= 1");
  if (!(tol > 0.0)) throw DomainError("critical_s: tolerance must be positive");
  const auto [lo, hi] = admissible_s_range(n, opt);
  auto f = [n](double s) { return margin(ProblemParams(n, s)); };

  double a = lo;
  double fa = f(a);
  for (int k = 1; k <= opt.scan_samples; ++k) {
    const double b = lo + (hi - lo) * k / opt.scan_samples;
    const double fb = f(b);
    if ((fa > 0.0) != (fb > 0.0)) {
      double left = a, right = b;
      double fl = fa;
      while (right - left > tol) {
        const double mid = 0.5 * (left + right);
        const double fm = f(mid);
        if ((fm > 0.0) == (fl > 0.0)) {
          left = mid;
          fl = fm;
        } else {
          right = mid;
        }
      }
      return 0.5 * (left + right);
    }
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

struct ThresholdRow {
  int n;
  std::optional<double> critical_s;
  bool all_s_bounded;  ///< bounded for every sampled s in (0, 1)
};

inline std::vector<ThresholdRow> threshold_table(int n_max, double tol = 1e-8,
                                                 const ThresholdOptions& opt = {}) {
  if (n_max < 1) throw DomainError("threshold_table: n_max must be >= 1");
  std::vector<ThresholdRow> rows;
  rows.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    ThresholdRow row{n, critical_s(n, tol, opt), true};
    for (int k = 0; k <= opt.scan_samples; ++k) {
      const double s = opt.s_min + (opt.s_max - opt.s_min) * k / opt.scan_samples;
      if (classify(ProblemParams(n, s)).regime == Regime::Inconclusive) {
        row.all_s_bounded = false;
        break;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fracgelfand

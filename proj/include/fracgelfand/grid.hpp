#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fracgelfand/errors.hpp"

namespace fracgelfand {

/// Radial mesh r_0 = 0 < r_1 < ... < r_N = 1 on the unit ball.
class RadialGrid {
 public:
  static constexpr int kMinIntervals = 16;

  RadialGrid(std::vector<double> nodes, double grading, int quad_order)
      : nodes_(std::move(nodes)), grading_(grading), quad_order_(quad_order) {
    if (static_cast<int>(nodes_.size()) < kMinIntervals + 1) {
      throw ConfigError("RadialGrid: need at least 16 intervals");
    }
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0) {
      throw ConfigError("RadialGrid: nodes must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      if (!(nodes_[i] > nodes_[i - 1])) throw ConfigError("RadialGrid: nodes must increase strictly");
    }
    if (!(grading_ >= 1.0)) throw ConfigError("RadialGrid: grading exponent must be >= 1");
    if (quad_order_ < 2 || quad_order_ > 64) throw ConfigError("RadialGrid: quadrature order must lie in [2, 64]");
  }

  /// N intervals, clustered algebraically at both ends:
  /// r(x) = x^g / (x^g + (1-x)^g) on a uniform x-mesh.
  static RadialGrid graded(int intervals, double grading = 2.0, int quad_order = 10) {
    if (intervals < kMinIntervals) throw ConfigError("RadialGrid: need at least 16 intervals");
    if (!(grading >= 1.0)) throw ConfigError("RadialGrid: grading exponent must be >= 1");
    std::vector<double> nodes(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
      const double x = static_cast<double>(i) / intervals;
      const double a = std::pow(x, grading), b = std::pow(1.0 - x, grading);
      nodes[i] = a / (a + b);
    }
    nodes.front() = 0.0;
    nodes.back() = 1.0;
    return RadialGrid(std::move(nodes), grading, quad_order);
  }

  int intervals() const { return static_cast<int>(nodes_.size()) - 1; }
  /// Number of interior nodes r_1..r_{N-1}: the unknowns of the discrete operator.
  int interior_size() const { return intervals() - 1; }
  double node(int i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  double grading() const { return grading_; }
  int quad_order() const { return quad_order_; }

  friend bool operator==(const RadialGrid&, const RadialGrid&) = default;

 private:
  std::vector<double> nodes_;
  double grading_;
  int quad_order_;
};

/// Exterior data of a radial function on r > 1.
struct ZeroTail {
  friend bool operator==(const ZeroTail&, const ZeroTail&) = default;
};
/// coeff * r^{-alpha}; alpha = 0 is a constant.
struct PowerTail {
  double alpha = 0.0;
  double coeff = 1.0;
  friend bool operator==(const PowerTail&, const PowerTail&) = default;
};
/// coeff * log r^{-2s}.
struct LogPowerTail {
  double coeff = 1.0;
  friend bool operator==(const LogPowerTail&, const LogPowerTail&) = default;
};

class TailSpec {
 public:
  using Kind = std::variant<ZeroTail, PowerTail, LogPowerTail>;

  TailSpec() = default;
  TailSpec(ZeroTail z) : kind_(z) {}
  TailSpec(PowerTail p) : kind_(p) {
    if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.coeff)) {
      throw DomainError("TailSpec: power tail needs a finite alpha >= 0 and finite coefficient");
    }
  }
  TailSpec(LogPowerTail l) : kind_(l) {
    if (!std::isfinite(l.coeff)) throw DomainError("TailSpec: log tail coefficient must be finite");
  }

  static TailSpec zero() { return TailSpec(ZeroTail{}); }
  static TailSpec constant(double c) { return TailSpec(PowerTail{0.0, c}); }
  static TailSpec power(double alpha, double coeff) { return TailSpec(PowerTail{alpha, coeff}); }
  static TailSpec log_power(double coeff) { return TailSpec(LogPowerTail{coeff}); }

  const Kind& kind() const { return kind_; }
  bool is_zero() const { return std::holds_alternative<ZeroTail>(kind_); }

  /// Value at radius rho >= 1.
  double value(double rho, double s) const {
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ZeroTail>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, PowerTail>) {
            return k.alpha == 0.0 ? k.coeff : k.coeff * std::pow(rho, -k.alpha);
          } else {
            return -2.0 * s * k.coeff * std::log(rho);
          }
        },
        kind_);
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ZeroTail>) return "zero";
          else if constexpr (std::is_same_v<T, PowerTail>) return "power";
          else return "log_power";
        },
        kind_);
  }

  friend bool operator==(const TailSpec&, const TailSpec&) = default;

 private:
  Kind kind_ = ZeroTail{};
};

/// Nodal values of a radial function on a grid plus its exterior data.
/// values has one entry per node r_0..r_N. A function flagged singular at the
/// origin carries NaN at r_0 and is never evaluated there.
struct RadialFunction {
  std::shared_ptr<const RadialGrid> grid;
  Eigen::VectorXd values;
  TailSpec tail;
  bool singular_at_origin = false;

  RadialFunction(std::shared_ptr<const RadialGrid> g, Eigen::VectorXd v, TailSpec t = {},
                 bool singular = false)
      : grid(std::move(g)), values(std::move(v)), tail(t), singular_at_origin(singular) {
    if (!grid) throw ConfigError("RadialFunction: null grid");
    if (values.size() != grid->intervals() + 1) throw ConfigError("RadialFunction: value count does not match grid");
    for (Eigen::Index i = singular ? 1 : 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) throw DomainError("RadialFunction: non-finite value at node " + std::to_string(i));
    }
  }

  /// Samples f at every node (r_0 skipped when singular).
  template <class F>
  static RadialFunction sample(std::shared_ptr<const RadialGrid> g, F&& f, TailSpec t = {},
                               bool singular = false) {
    Eigen::VectorXd v(g->intervals() + 1);
    for (int i = 0; i <= g->intervals(); ++i) {
      v[i] = (singular && i == 0) ? std::numeric_limits<double>::quiet_NaN() : f(g->node(i));
    }
    return RadialFunction(std::move(g), std::move(v), t, singular);
  }

  /// Values at r_1..r_{N-1}.
  Eigen::VectorXd interior() const { return values.segment(1, grid->interior_size()); }
};

}  // namespace fracgelfand

#pragma once

// (-Delta)^s u = lambda e^u in B_1 with prescribed exterior data, solved on the
// branch parametrized by the peak m = u(0): Newton on (u, lambda) with the
// closing equation u(0) = m, continuation in m, fold location, the linearized
// stability eigenvalue and the diagnostics built on top of them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracgelfand/constants.hpp"
#include "fracgelfand/errors.hpp"
#include "fracgelfand/fraclap.hpp"
#include "fracgelfand/grid.hpp"

namespace fracgelfand {

struct BranchPoint {
  double lambda = 0.0;
  RadialFunction profile;
  double peak = 0.0;
  double stability_eig = std::numeric_limits<double>::quiet_NaN();
  int newton_iters = 0;
  double residual_norm = 0.0;
};

struct Branch {
  std::vector<BranchPoint> points;  ///< ordered by increasing peak
  double lambda_star_estimate = 0.0;
  bool fold_detected = false;
  std::optional<std::size_t> fold_index;  ///< point of maximal lambda when a fold was seen
  std::optional<double> lambda_star_fit;  ///< vertex of the parabola through the fold neighbours
};

struct ContinuationConfig {
  ProblemParams params{1, 0.5};
  std::shared_ptr<const RadialGrid> grid;
  TailSpec exterior = TailSpec::zero();
  double peak_start = 0.1;
  double peak_end = 8.0;
  double peak_step = 0.1;
  double newton_tol = 1e-10;
  int max_iters = 50;
  int fold_refinements = 6;     ///< interval halvings around the first fold
  double fold_tolerance = 1e-8;  ///< relative drop in lambda that counts as a fold
  bool compute_stability = true;

  void validate() const {
    if (!grid) throw ConfigError("continuation: grid not set");
    if (!(peak_start > 0.0) || !(peak_start < peak_end)) {
      throw ConfigError("continuation: need 0 < peak_start < peak_end");
    }
    if (!(peak_step > 0.0)) throw ConfigError("continuation: peak_step must be positive");
    if (!(newton_tol > 0.0)) throw ConfigError("continuation: newton_tol must be positive");
    if (max_iters < 1) throw ConfigError("continuation: max_iters must be at least 1");
    if (fold_refinements < 0) throw ConfigError("continuation: fold_refinements must be nonnegative");
    if (!(fold_tolerance >= 0.0)) throw ConfigError("continuation: fold_tolerance must be nonnegative");
  }
};

/// Newton did not reach the tolerance; carries the last iterate.
class NewtonFailure : public NumericalError {
 public:
  NewtonFailure(const std::string& what, BranchPoint last) : NumericalError(what), last_iterate(std::move(last)) {}
  BranchPoint last_iterate;
};

/// Newton converged to lambda <= 0.
class InfeasibleSolution : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A continuation step failed; carries the points computed so far.
class BranchFailure : public NumericalError {
 public:
  BranchFailure(const std::string& what, Branch partial) : NumericalError(what), partial_branch(std::move(partial)) {}
  Branch partial_branch;
};

namespace detail {

// u(0) from the interior values, by the even quadratic through r_1 and r_2.
inline std::pair<double, double> origin_weights(const RadialGrid& g) {
  const double a = g.node(1) * g.node(1), b = g.node(2) * g.node(2);
  return {b / (b - a), -a / (b - a)};
}

inline double origin_value(const RadialGrid& g, const Eigen::VectorXd& u) {
  const auto [c1, c2] = origin_weights(g);
  return c1 * u[0] + c2 * u[1];
}

inline RadialFunction assemble_profile(const OperatorMatrix& op, const Eigen::VectorXd& u, const TailSpec& tail) {
  const RadialGrid& g = *op.grid();
  Eigen::VectorXd v(g.intervals() + 1);
  v[0] = origin_value(g, u);
  v.segment(1, u.size()) = u;
  v[g.intervals()] = tail.value(1.0, op.params().s());
  return RadialFunction(op.grid(), std::move(v), tail);
}

struct NewtonState {
  Eigen::VectorXd u;
  double lambda;
};

inline double scaled_residual(const OperatorMatrix& op, const TailSpec& tail, const NewtonState& x, double m,
                              Eigen::VectorXd* f_out = nullptr) {
  const Eigen::VectorXd eu = x.u.array().exp().matrix();
  Eigen::VectorXd f = op.apply_interior(x.u, tail) - x.lambda * eu;
  const double scale = std::max(1.0, std::abs(x.lambda) * eu.cwiseAbs().maxCoeff());
  const double constraint = std::abs(origin_value(*op.grid(), x.u) - m);
  const double r = std::max(f.cwiseAbs().maxCoeff() / scale, constraint);
  if (f_out) *f_out = std::move(f);
  return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

inline BranchPoint newton_at_peak(const OperatorMatrix& op, const ContinuationConfig& cfg, double m, NewtonState x) {
  const int size = op.size();
  const auto [c1, c2] = origin_weights(*op.grid());
  Eigen::VectorXd f;
  double res = scaled_residual(op, cfg.exterior, x, m, &f);
  auto make_point = [&](int iters) {
    BranchPoint bp{x.lambda, assemble_profile(op, x.u, cfg.exterior), m};
    bp.newton_iters = iters;
    bp.residual_norm = res;
    return bp;
  };
  int iter = 0;
  while (res > cfg.newton_tol) {
    if (iter == cfg.max_iters) {
      throw NewtonFailure("Newton did not converge at peak " + std::to_string(m) + " (residual " +
                              std::to_string(res) + ")",
                          make_point(iter));
    }
    ++iter;
    const Eigen::VectorXd eu = x.u.array().exp().matrix();
    Eigen::MatrixXd jac(size + 1, size + 1);
    jac.topLeftCorner(size, size) = op.matrix();
    jac.topLeftCorner(size, size).diagonal() -= x.lambda * eu;
    jac.topRightCorner(size, 1) = -eu;
    jac.bottomRows(1).setZero();
    jac(size, 0) = c1;
    jac(size, 1) = c2;
    Eigen::VectorXd rhs(size + 1);
    rhs.head(size) = -f;
    rhs[size] = m - origin_value(*op.grid(), x.u);
    const Eigen::VectorXd step = jac.partialPivLu().solve(rhs);
    if (!step.allFinite()) throw NewtonFailure("Newton step is not finite", make_point(iter));

    // Backtracking on the scaled residual.
    double t = 1.0;
    NewtonState trial;
    Eigen::VectorXd f_trial;
    double res_trial = 0.0;
    for (int halving = 0; halving <= 30; ++halving) {
      trial.u = x.u + t * step.head(size);
      trial.lambda = x.lambda + t * step[size];
      res_trial = scaled_residual(op, cfg.exterior, trial, m, &f_trial);
      if (res_trial < res) break;
      t *= 0.5;
    }
    if (!(res_trial < res) && !std::isfinite(res_trial)) {
      throw NewtonFailure("Newton line search failed", make_point(iter));
    }
    x = std::move(trial);
    f = std::move(f_trial);
    res = res_trial;
  }
  if (!(x.lambda > 0.0)) throw InfeasibleSolution("Newton converged to a nonpositive lambda");
  return make_point(iter);
}

// Interior values of zeta with (-Delta)^s zeta = 1 in B_1, zeta = 0 outside.
inline Eigen::VectorXd torsion(const OperatorMatrix& op) {
  return op.matrix().partialPivLu().solve(Eigen::VectorXd::Ones(op.size()));
}

inline NewtonState initial_guess(const OperatorMatrix& op, const TailSpec& tail, double m) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.matrix());
  const Eigen::VectorXd zeta = lu.solve(Eigen::VectorXd::Ones(op.size()));
  const Eigen::VectorXd h = lu.solve(-op.tail_response(tail));  // s-harmonic extension of the data
  const RadialGrid& g = *op.grid();
  const double z0 = origin_value(g, zeta), h0 = origin_value(g, h);
  const double amp = (m - h0) / z0;
  return {h + amp * zeta, amp};
}

}  // namespace detail

/// zeta(0) for (-Delta)^s zeta = 1 in B_1, zeta = 0 outside.
inline double torsion_peak(const ProblemParams& p) {
  const double n = p.n(), s = p.s();
  return std::exp(log_gamma(0.5 * n) - 2.0 * s * std::log(2.0) - log_gamma(1.0 + s) - log_gamma(0.5 * (n + 2.0 * s)));
}

/// Solution with u(0) = m. Without a warm start the iteration starts from the
/// linearization u = h + a zeta, with h the s-harmonic extension of the
/// exterior data.
inline BranchPoint solve_at_peak(const OperatorMatrix& op, const ContinuationConfig& cfg, double m,
                                 const std::optional<BranchPoint>& warm_start = std::nullopt) {
  cfg.validate();
  if (!(m > 0.0)) throw DomainError("solve_at_peak: the peak must be positive");
  if (!(*cfg.grid == *op.grid())) throw ConfigError("solve_at_peak: operator and configuration grids differ");
  detail::NewtonState x;
  if (warm_start) {
    if (!(*warm_start->profile.grid == *op.grid())) throw ConfigError("solve_at_peak: warm start on another grid");
    x = {warm_start->profile.interior(), warm_start->lambda};
  } else {
    x = detail::initial_guess(op, cfg.exterior, m);
  }
  return detail::newton_at_peak(op, cfg, m, std::move(x));
}

namespace detail {

/// Hat-function averages of e^u against r^{n-1} dr. Between nodes u is taken
/// linear in log r (exact for a - b log r); on [0, r_1] it is extrapolated from
/// r_1, r_2. Point values of a density that blows up at the origin are larger
/// than anything the discrete operator resolves at grid scale.
inline Eigen::VectorXd averaged_density(const OperatorMatrix& op, const RadialFunction& u) {
  const RadialGrid& g = *op.grid();
  const int n_int = g.intervals();
  const int n = op.params().n();
  const GaussRule& rule = gauss_legendre(g.quad_order());
  Eigen::VectorXd num = Eigen::VectorXd::Zero(n_int - 1), den = num;
  for (int j = 0; j < n_int; ++j) {
    const double a = g.node(j), b = g.node(j + 1);
    const int k = j == 0 ? 1 : j;
    const double r0 = g.node(k), r1 = g.node(k + 1);
    const double u0 = u.values[k], u1 = u.values[k + 1];
    const double slope = (u1 - u0) / std::log(r1 / r0);
    for (int q = 0; q < rule.order(); ++q) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
      const double w = 0.5 * (b - a) * rule.weights[q] * std::pow(x, n - 1);
      const double t = (x - a) / (b - a);
      const double f = std::exp(u0 + slope * std::log(x / r0));
      if (j >= 1) {
        num[j - 1] += w * (1.0 - t) * f;
        den[j - 1] += w * (1.0 - t);
      }
      if (j + 1 < n_int) {
        num[j] += w * t * f;
        den[j] += w * t;
      }
    }
  }
  return num.cwiseQuotient(den);
}

}  // namespace detail

/// Smallest mu with (A - lambda diag(e^u)) eta = mu eta, the discrete form of
/// (Q - lambda E) eta = mu M eta. Shifted inverse iteration from the all-ones
/// vector with Rayleigh quotients in the mass-weighted inner product. The shift
/// starts below the spectrum and moves halfway toward the current estimate
/// while the sign of det(J - shift) shows no eigenvalue has been passed.
inline double stability_eigenvalue(const OperatorMatrix& op, const BranchPoint& point, double tol = 1e-8,
                                   int max_iters = 500) {
  if (!(*point.profile.grid == *op.grid())) throw ConfigError("stability_eigenvalue: grid mismatch");
  const int size = op.size();
  // singular profiles use cell averages of e^u instead of nodal values
  const Eigen::VectorXd eu = point.profile.singular_at_origin
                                 ? detail::averaged_density(op, point.profile)
                                 : Eigen::VectorXd(point.profile.interior().array().exp().matrix());
  Eigen::MatrixXd jac = op.matrix();
  jac.diagonal() -= point.lambda * eu;
  const Eigen::VectorXd& w = op.mass_weights();

  auto rayleigh = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd jx = jac * x;
    return (w.array() * x.array() * jx.array()).sum() / (w.array() * x.array().square()).sum();
  };
  auto factor = [&](double shift) {
    Eigen::MatrixXd m = jac;
    m.diagonal().array() -= shift;
    return Eigen::PartialPivLU<Eigen::MatrixXd>(m);
  };
  auto det_positive = [](const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
    int sign = lu.permutationP().determinant();
    const auto d = lu.matrixLU().diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (d[i] < 0.0) sign = -sign;
      if (d[i] == 0.0) return false;
    }
    return sign > 0;
  };

  double shift = std::min(-point.lambda * eu.maxCoeff(), 0.0) - 1.0;
  auto lu = factor(shift);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(size);
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < max_iters; ++k) {
    x = lu.solve(x);
    x /= x.cwiseAbs().maxCoeff();
    const double mu = rayleigh(x);
    if (!std::isfinite(mu)) throw NumericalError("stability_eigenvalue: iteration broke down");
    const double scale = std::max(1.0, std::abs(mu));
    if (std::abs(mu - previous) <= tol * scale) return mu;
    previous = mu;
    if (mu - shift > 1e-3 * scale) {
      double target = shift + 0.5 * (mu - shift);
      for (int tries = 0; tries < 30; ++tries) {
        auto trial = factor(target);
        if (det_positive(trial)) {
          shift = target;
          lu = std::move(trial);
          break;
        }
        target = shift + 0.5 * (target - shift);
      }
    }
  }
  throw NumericalError("stability_eigenvalue: inverse iteration did not converge");
}

namespace detail {

inline std::optional<double> parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  // y = y0 + d01 (x - x0) + a (x - x0)(x - x1)
  const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (!(a < 0.0)) return std::nullopt;
  const double xv = 0.5 * (x0 + x1) - d01 / (2.0 * a);
  return y0 + d01 * (xv - x0) + a * (xv - x0) * (xv - x1);
}

}  // namespace detail

/// Marches the peak from peak_start to peak_end with secant-predicted warm
/// starts. The first time lambda decreases, the bracket around the largest
/// lambda is halved cfg.fold_refinements times by inserting extra points.
inline Branch trace_branch(const OperatorMatrix& op, const ContinuationConfig& cfg) {
  cfg.validate();
  Branch branch;
  auto finish = [&](Branch& b) {
    if (b.points.empty()) return;
    std::size_t best = 0;
    for (std::size_t i = 1; i < b.points.size(); ++i) {
      if (b.points[i].lambda > b.points[best].lambda) best = i;
    }
    b.lambda_star_estimate = b.points[best].lambda;
    if (b.fold_detected) {
      b.fold_index = best;
      if (best > 0 && best + 1 < b.points.size()) {
        const auto& p0 = b.points[best - 1];
        const auto& p1 = b.points[best];
        const auto& p2 = b.points[best + 1];
        b.lambda_star_fit = detail::parabola_vertex(p0.peak, p0.lambda, p1.peak, p1.lambda, p2.peak, p2.lambda);
      }
    }
  };

  auto solve = [&](double m, const detail::NewtonState* guess) {
    BranchPoint bp = guess ? detail::newton_at_peak(op, cfg, m, *guess) : solve_at_peak(op, cfg, m);
    if (cfg.compute_stability) bp.stability_eig = stability_eigenvalue(op, bp);
    return bp;
  };

  // Secant predictor from the two points bracketing or preceding m.
  auto predict = [&](const std::vector<BranchPoint>& pts, double m) {
    std::size_t hi = 0;
    while (hi < pts.size() && pts[hi].peak < m) ++hi;
    std::size_t a = 0, b = 0;
    if (pts.size() == 1) {
      return detail::NewtonState{pts[0].profile.interior(), pts[0].lambda};
    }
    if (hi == 0) {
      a = 0, b = 1;
    } else if (hi >= pts.size()) {
      a = pts.size() - 2, b = pts.size() - 1;
    } else {
      a = hi - 1, b = hi;
    }
    const double t = (m - pts[a].peak) / (pts[b].peak - pts[a].peak);
    const Eigen::VectorXd ua = pts[a].profile.interior(), ub = pts[b].profile.interior();
    return detail::NewtonState{ua + t * (ub - ua), pts[a].lambda + t * (pts[b].lambda - pts[a].lambda)};
  };

  const int steps = static_cast<int>(std::floor((cfg.peak_end - cfg.peak_start) / cfg.peak_step + 1e-9));
  try {
    for (int k = 0; k <= steps; ++k) {
      const double m = cfg.peak_start + k * cfg.peak_step;
      if (branch.points.empty()) {
        branch.points.push_back(solve(m, nullptr));
      } else {
        const auto guess = predict(branch.points, m);
        branch.points.push_back(solve(m, &guess));
      }
      const std::size_t last = branch.points.size() - 1;
      if (!branch.fold_detected && last >= 1 &&
          branch.points[last].lambda < branch.points[last - 1].lambda * (1.0 - cfg.fold_tolerance)) {
        branch.fold_detected = true;
        // Bracket [left, right] around the best point; halve it repeatedly.
        double h = cfg.peak_step;
        for (int level = 0; level < cfg.fold_refinements; ++level) {
          std::size_t best = 0;
          for (std::size_t i = 1; i < branch.points.size(); ++i) {
            if (branch.points[i].lambda > branch.points[best].lambda) best = i;
          }
          h *= 0.5;
          const double centre = branch.points[best].peak;
          for (double m_new : {centre - h, centre + h}) {
            if (!(m_new > 0.0)) continue;
            const auto guess = predict(branch.points, m_new);
            BranchPoint bp = solve(m_new, &guess);
            auto pos = std::lower_bound(branch.points.begin(), branch.points.end(), m_new,
                                        [](const BranchPoint& p, double v) { return p.peak < v; });
            branch.points.insert(pos, std::move(bp));
          }
        }
      }
    }
  } catch (const NumericalError& e) {
    finish(branch);
    throw BranchFailure(std::string("trace_branch: ") + e.what(), std::move(branch));
  }
  finish(branch);
  return branch;
}

inline Branch trace_branch(const ContinuationConfig& cfg) {
  cfg.validate();
  const OperatorMatrix op = assemble(cfg.params, cfg.grid);
  return trace_branch(op, cfg);
}

// ---------------------------------------------------------------------------
// Integrated stability inequality with the singular test function
//   psi = r^{-beta} chi(r),  beta = (n - 2s - eps)/2,
// chi = 1 on [0, rho0] and a degree-7 smoothstep down to 0 at (1 + rho0)/2.

struct InequalityCheck {
  double lhs = 0.0;         ///< \int u (-Delta)^s psi^2
  double rhs = 0.0;         ///< \int psi (-Delta)^s psi
  double lhs_direct = 0.0;  ///< lambda \int e^u psi^2 (equals lhs for zero exterior data)
  double rho0 = 0.0, eps = 0.0, cutoff_radius = 0.0;
  bool holds(double rel_tol) const { return lhs <= rhs + rel_tol * std::abs(rhs); }
};

namespace detail {

inline double smoothstep7(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * x * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)));
}

struct Cutoff {
  double rho0, rc;
  double operator()(double r) const { return 1.0 - smoothstep7((r - rho0) / (rc - rho0)); }
};

}  // namespace detail

namespace detail {

// 1 / Gamma(x) for any real x, as (log |.|, sign); sign 0 at the poles.
inline std::pair<double, int> log_reciprocal_gamma(double x) {
  if (x > 0.0) return {-log_gamma(x), 1};
  if (x == std::floor(x)) return {0.0, 0};
  // Gamma(x) = Gamma(x + k) / (x (x + 1) ... (x + k - 1))
  double log_prod = 0.0;
  int sign = 1;
  double y = x;
  while (y <= 0.0) {
    log_prod += std::log(std::abs(y));
    if (y < 0.0) sign = -sign;
    y += 1.0;
  }
  return {log_prod - log_gamma(y), sign};
}

}  // namespace detail

/// Coefficient C with (-Delta)^s |x|^{-alpha} = C |x|^{-alpha-2s} for
/// -2s < alpha < n; it coincides with power_coefficient on (0, n - 2s).
inline double power_image_coefficient(const ProblemParams& p, double alpha) {
  const double n = p.n(), s = p.s();
  if (!(alpha > -2.0 * s && alpha < n)) throw DomainError("power_image_coefficient: need -2s < alpha < n");
  const auto [l3, s3] = detail::log_reciprocal_gamma(0.5 * (n - alpha - 2.0 * s));
  const auto [l4, s4] = detail::log_reciprocal_gamma(0.5 * alpha);
  if (s3 == 0 || s4 == 0) return 0.0;
  const double log_mag =
      2.0 * s * std::log(2.0) + log_gamma(0.5 * (alpha + 2.0 * s)) + log_gamma(0.5 * (n - alpha)) + l3 + l4;
  return s3 * s4 * std::exp(log_mag);
}

/// Both sides of int u (-Delta)^s(psi^2) <= int psi (-Delta)^s psi over B_1.
/// The powers r^{-beta} and r^{-2 beta} are mapped in closed form; the
/// operator is only applied to the smooth remainders -(1 - chi^k) r^{-gamma}.
inline InequalityCheck stability_inequality_check(const OperatorMatrix& op, const BranchPoint& point, double rho0,
                                                  double eps, double stability_tol = 1e-6) {
  const ProblemParams& p = op.params();
  const double n = p.n(), s = p.s();
  if (!(rho0 > 0.0 && rho0 < 1.0)) throw DomainError("stability_inequality_check: rho0 must lie in (0, 1)");
  if (!(eps > 0.0 && eps < n)) throw DomainError("stability_inequality_check: eps must lie in (0, n)");
  if (!(*point.profile.grid == *op.grid())) throw ConfigError("stability_inequality_check: grid mismatch");
  if (point.profile.singular_at_origin) throw DomainError("stability_inequality_check: profile must be bounded");
  if (std::isnan(point.stability_eig) || point.stability_eig < -stability_tol) {
    throw DomainError("stability_inequality_check: the point is not stable");
  }
  const auto& grid = op.grid();
  const double area = sphere_area(p.n());
  const double beta = 0.5 * (n - 2.0 * s - eps);
  const detail::Cutoff chi{rho0, 0.5 * (1.0 + rho0)};

  auto remainder_image = [&](double gamma, int k) {
    Eigen::VectorXd v(op.size());
    for (int i = 0; i < op.size(); ++i) {
      const double r = grid->node(i + 1);
      v[i] = -(1.0 - std::pow(chi(r), k)) * std::pow(r, -gamma);
    }
    // exterior data -r^{-gamma}, equal to -1 at r = 1
    return Eigen::VectorXd(op.apply_interior(v, TailSpec::zero()) + op.boundary_weights() +
                           op.power_exterior(gamma));
  };
  auto psi = [&](double r) { return std::pow(r, -beta) * chi(r); };

  InequalityCheck out;
  out.rho0 = rho0;
  out.eps = eps;
  out.cutoff_radius = chi.rc;

  {
    const double inner = std::pow(rho0, eps) / eps +
                         gauss_integrate_composite([&](double r) { return chi(r) * std::pow(r, eps - 1.0); }, rho0,
                                                   chi.rc, 16, 8);
    const Eigen::VectorXd l1 = remainder_image(beta, 1);
    const double cross = integrate_radial(
        op, l1, 0.0, [&](double r) { return psi(r) * area * std::pow(r, n - 1.0); }, n - 1.0 - beta);
    out.rhs = area * power_image_coefficient(p, beta) * inner + cross;
  }
  {
    const Eigen::VectorXd u = point.profile.interior();
    const double ub = point.profile.values[grid->intervals()];
    const double main = integrate_radial(op, u, ub, [&](double r) { return std::pow(r, eps - 1.0); }, eps - 1.0);
    const Eigen::VectorXd l2 = remainder_image(2.0 * beta, 2);
    const Eigen::VectorXd prod = u.cwiseProduct(l2);
    const double cross =
        integrate_radial(op, prod, 0.0, [&](double r) { return area * std::pow(r, n - 1.0); }, n - 1.0);
    out.lhs = area * power_image_coefficient(p, 2.0 * beta) * main + cross;
    const Eigen::VectorXd eu = u.array().exp().matrix();
    out.lhs_direct = point.lambda * integrate_radial(
                                        op, eu, std::exp(ub),
                                        [&](double r) {
                                          const double c = chi(r);
                                          return area * c * c * std::pow(r, 2.0 * s + eps - 1.0);
                                        },
                                        2.0 * s + eps - 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SingularProfileReport {
  double sigma = 0.0;
  double peak = 0.0;
  double lambda = 0.0;
  std::vector<std::pair<double, double>> ratio;  ///< (r, u(r) / (2s log(1/r))) at nodes in (0, 0.1]
  std::optional<double> threshold_radius;        ///< largest sampled r with ratio > 1 - sigma
  std::vector<double> top_peaks;                 ///< peaks of the highest three points, ascending
  std::vector<double> ratio_at_0_01;             ///< the ratio at r = 0.01 on those points
  bool trend_increasing = false;                 ///< ratio at 0.01 strictly increasing with the peak
};

inline double log_ratio(const RadialFunction& u, double s, double r) {
  return interpolate(u, r) / (2.0 * s * std::log(1.0 / r));
}

inline SingularProfileReport singular_profile_diagnostic(const Branch& branch, double s, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("singular_profile_diagnostic: sigma must lie in (0, 1)");
  if (branch.points.empty()) throw DomainError("singular_profile_diagnostic: empty branch");
  std::vector<const BranchPoint*> order;
  for (const auto& bp : branch.points) order.push_back(&bp);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->peak < b->peak; });
  const BranchPoint& top = *order.back();

  SingularProfileReport rep;
  rep.sigma = sigma;
  rep.peak = top.peak;
  rep.lambda = top.lambda;
  const RadialGrid& g = *top.profile.grid;
  for (int i = 1; i < g.intervals() && g.node(i) <= 0.1; ++i) {
    const double r = g.node(i);
    const double q = top.profile.values[i] / (2.0 * s * std::log(1.0 / r));
    rep.ratio.emplace_back(r, q);
    if (q > 1.0 - sigma) rep.threshold_radius = r;
  }
  const std::size_t k = std::min<std::size_t>(3, order.size());
  for (std::size_t i = order.size() - k; i < order.size(); ++i) {
    rep.top_peaks.push_back(order[i]->peak);
    rep.ratio_at_0_01.push_back(log_ratio(order[i]->profile, s, 0.01));
  }
  rep.trend_increasing = k >= 2;
  for (std::size_t i = 1; i < rep.ratio_at_0_01.size(); ++i) {
    if (!(rep.ratio_at_0_01[i] > rep.ratio_at_0_01[i - 1])) rep.trend_increasing = false;
  }
  return rep;
}

/// u = log r^{-2s} with matching exterior data and lambda = lambda0.
inline BranchPoint singular_solution(const OperatorMatrix& op) {
  const ProblemParams& p = op.params();
  const double s = p.s();
  BranchPoint bp{lambda0(p),
                 RadialFunction::sample(op.grid(), [s](double r) { return -2.0 * s * std::log(r); },
                                        TailSpec::log_power(1.0), true),
                 std::numeric_limits<double>::infinity()};
  return bp;
}

/// max over nodes in [0.1, 0.9] of |(-Delta)^s u - lambda0 e^u| / (lambda0 r^{-2s})
/// for the singular solution.
inline double singular_solution_residual(const OperatorMatrix& op) {
  const ProblemParams& p = op.params();
  detail::require_supercritical(p, "gelfand");
  const BranchPoint bp = singular_solution(op);
  const Eigen::VectorXd lu = apply(op, bp.profile);
  const RadialGrid& g = *op.grid();
  double worst = 0.0;
  for (int i = 1; i < g.intervals(); ++i) {
    const double r = g.node(i);
    if (r < 0.1 || r > 0.9) continue;
    const double target = bp.lambda * std::pow(r, -2.0 * p.s());
    worst = std::max(worst, std::abs(lu[i - 1] - target) / target);
  }
  return worst;
}

inline double singular_solution_residual(const ProblemParams& p, std::shared_ptr<const RadialGrid> grid) {
  detail::require_supercritical(p, "gelfand");
  return singular_solution_residual(assemble(p, std::move(grid)));
}

}  // namespace fracgelfand

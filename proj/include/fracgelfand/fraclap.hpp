#pragma once

// Collocation discretization of the radial fractional Laplacian on B_1,
//
//   (-Delta)^s u(r) = c_{n,s} PV \int_0^inf (u(r) - u(rho)) rho^{n-1} k(r, rho) drho,
//
// at the interior nodes r_1..r_{N-1}. For a target r_i the integral is split into
//   near  [r_{i-2}, r_{i+2}]: u replaced by its degree-4 interpolant through the
//         five nearest nodes; the resulting moments of (rho - r_i)^k against the
//         kernel are integrated with symmetric pairing (PV for k = 1) on
//         geometrically graded panels;
//   far   the remaining grid panels: Gauss-Legendre against a local cubic
//         interpolant;
//   tail  rho > 1: the exterior data, on panels graded away from rho = 1 plus an
//         analytic remainder beyond rho = 10^3.
// Interpolation stencils near the origin use the even reflection r -> -r.
//
// The operator is stored in difference form, (Lu)_i = sum_j W_ij (u_i - u_j)
// + boundary and tail terms, so global constants are annihilated exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracgelfand/constants.hpp"
#include "fracgelfand/grid.hpp"
#include "fracgelfand/kernel.hpp"
#include "fracgelfand/quadrature.hpp"

namespace fracgelfand {

struct AssemblyOptions {
  int near_levels = 12;      ///< geometric levels toward the collocation point
  int near_order = 16;       ///< Gauss order on near-field and tail panels
  double tail_cutoff = 1e3;  ///< beyond this radius the tail is integrated analytically
};

namespace detail {

/// Node list extended by reflection through the origin: -r_m..-r_1, r_1..r_N
/// with m = min(4, N). Each entry keeps the grid index it takes its value from.
class ExtendedNodes {
 public:
  struct Entry {
    double x;
    int index;  // 1..N
  };

  explicit ExtendedNodes(const RadialGrid& grid) : grid_(&grid), mirrored_(std::min(4, grid.intervals())) {}

  /// Position of r_k (k >= 1) in the list.
  int position(int k) const { return mirrored_ + k - 1; }
  int last() const { return mirrored_ + grid_->intervals() - 1; }
  Entry operator[](int pos) const {
    if (pos < mirrored_) return {-grid_->node(mirrored_ - pos), mirrored_ - pos};
    return {grid_->node(pos - mirrored_ + 1), pos - mirrored_ + 1};
  }

 private:
  const RadialGrid* grid_;
  int mirrored_;
};

template <int M>
struct Stencil {
  std::array<double, M> x{};
  std::array<int, M> index{};

  std::array<double, M> lagrange(double at) const {
    std::array<double, M> out{};
    for (int l = 0; l < M; ++l) {
      double v = 1.0;
      for (int m = 0; m < M; ++m) {
        if (m != l) v *= (at - x[m]) / (x[l] - x[m]);
      }
      out[l] = v;
    }
    return out;
  }
};

/// Local cubic interpolation on each grid panel [r_j, r_{j+1}].
class PanelInterpolant {
 public:
  explicit PanelInterpolant(const RadialGrid& grid) : grid_(&grid) {
    stencils_.reserve(grid.intervals());
    for (int j = 0; j < grid.intervals(); ++j) stencils_.push_back(panel_stencil(grid, j));
  }

  static Stencil<4> panel_stencil(const RadialGrid& grid, int panel) {
    const ExtendedNodes ext(grid);
    const int start = std::min(ext.position(panel + 1) - 2, ext.last() - 3);
    Stencil<4> st;
    for (int l = 0; l < 4; ++l) {
      st.x[l] = ext[start + l].x;
      st.index[l] = ext[start + l].index;
    }
    return st;
  }

  const Stencil<4>& stencil(int panel) const { return stencils_[panel]; }

  /// Value at x in panel j from interior values (index 1..N-1 -> v[idx-1]) and
  /// the value at r_N.
  double eval(int panel, double x, std::span<const double> interior, double boundary) const {
    const auto& st = stencils_[panel];
    const auto l = st.lagrange(x);
    const int n_int = grid_->intervals();
    double v = 0.0;
    for (int m = 0; m < 4; ++m) v += l[m] * (st.index[m] == n_int ? boundary : interior[st.index[m] - 1]);
    return v;
  }

 private:
  const RadialGrid* grid_;
  std::vector<Stencil<4>> stencils_;
};

}  // namespace detail

/// Dense discrete (-Delta)^s on a radial grid, immutable after assembly.
class OperatorMatrix {
 public:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  const ProblemParams& params() const { return params_; }
  const std::shared_ptr<const RadialGrid>& grid() const { return grid_; }
  int size() const { return grid_->interior_size(); }
  double normalization() const { return c_ns_; }

  /// A with (A u)_i + tail_response(g)_i = (-Delta)^s u(r_i).
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  /// Off-diagonal weights of the difference form (normalization included).
  const RowMatrix& difference_weights() const { return weights_; }
  /// Weight of the boundary node r_N = 1 in each row.
  const Eigen::VectorXd& boundary_weights() const { return boundary_; }
  /// c_{n,s} \int_1^inf rho^{n-1} k(r_i, rho) drho.
  const Eigen::VectorXd& constant_tail() const { return tail_const_; }
  /// Radial mass weights: sum_i w_i f(r_i) ~ \int_{B_1} f dx for f vanishing at r = 1.
  const Eigen::VectorXd& mass_weights() const { return mass_; }
  const RadialKernel& kernel() const { return *kernel_; }
  const detail::PanelInterpolant& interpolant() const { return *interp_; }

  /// Contribution of exterior data g (and of the node value g(1)) to the operator.
  Eigen::VectorXd tail_response(const TailSpec& tail) const {
    const double g1 = tail.value(1.0, params_.s());
    return -(boundary_ * g1 + exterior_integral(tail));
  }

  /// c_{n,s} \int_1^inf g(rho) rho^{n-1} k(r_i, rho) drho for every interior node.
  Eigen::VectorXd exterior_integral(const TailSpec& tail) const {
    return std::visit(
        [&](const auto& k) -> Eigen::VectorXd {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ZeroTail>) {
            return Eigen::VectorXd::Zero(size());
          } else if constexpr (std::is_same_v<T, PowerTail>) {
            if (k.alpha == 0.0) return k.coeff * tail_const_;
            return k.coeff * power_exterior(k.alpha);
          } else {
            return (-2.0 * params_.s() * k.coeff) * tail_log_;
          }
        },
        tail.kind());
  }

  /// c_{n,s} \int_1^inf rho^{-alpha} rho^{n-1} k(r_i, rho) drho; alpha > -2s.
  Eigen::VectorXd power_exterior(double alpha) const {
    if (!(alpha > -2.0 * params_.s())) throw DomainError("power_exterior: need alpha > -2s");
    Eigen::VectorXd out(size());
    for (int i = 0; i < size(); ++i) {
      out[i] = c_ns_ * tail_integral(grid_->node(i + 1), [alpha](double rho) { return std::pow(rho, -alpha); },
                                     [&](double R, double r) {
                                       const double s = params_.s();
                                       const double a1 = kernel_->far_field_coefficient();
                                       return std::pow(R, -alpha - 2.0 * s) / (alpha + 2.0 * s) +
                                              a1 * r * r * std::pow(R, -alpha - 2.0 - 2.0 * s) /
                                                  (alpha + 2.0 + 2.0 * s);
                                     });
    }
    return out;
  }

  /// (-Delta)^s applied to interior values with exterior data `tail`, evaluated
  /// in difference form.
  Eigen::VectorXd apply_interior(const Eigen::VectorXd& u, const TailSpec& tail) const {
    if (u.size() != size()) throw ConfigError("OperatorMatrix: vector size does not match the grid");
    const double g1 = tail.value(1.0, params_.s());
    const Eigen::VectorXd ext = exterior_integral(tail);
    Eigen::VectorXd out(size());
    for (int i = 0; i < size(); ++i) {
      const double ui = u[i];
      double acc = 0.0;
      const double* row = weights_.data() + static_cast<Eigen::Index>(i) * size();
      for (int j = 0; j < size(); ++j) acc += row[j] * (ui - u[j]);
      out[i] = acc + boundary_[i] * (ui - g1) + tail_const_[i] * ui - ext[i];
    }
    return out;
  }

  /// \int_1^inf g(rho) rho^{n-1} k(r, rho) drho without the normalization;
  /// `remainder(R, r)` is the analytic integral of g over (R, inf) against the
  /// far-field expansion of the kernel, divided by |S^{n-1}|.
  template <class G, class Rem>
  double tail_integral(double r, G&& g, Rem&& remainder) const {
    const double d = 1.0 - r;
    const double cutoff = options_.tail_cutoff;
    double lo = 1.0, width = d;
    double sum = 0.0;
    while (lo < cutoff) {
      const double hi = std::min(lo + width, cutoff);
      sum += gauss_integrate([&](double rho) { return g(rho) * kernel_->weighted(r, rho); }, lo, hi,
                             options_.near_order);
      lo = hi;
      width *= 2.0;
    }
    return sum + sphere_area(params_.n()) * remainder(cutoff, r);
  }

 private:
  friend OperatorMatrix assemble(const ProblemParams&, std::shared_ptr<const RadialGrid>,
                                 const AssemblyOptions&);

  OperatorMatrix(const ProblemParams& p, std::shared_ptr<const RadialGrid> g, const AssemblyOptions& opt)
      : params_(p), grid_(std::move(g)), options_(opt) {}

  ProblemParams params_;
  std::shared_ptr<const RadialGrid> grid_;
  AssemblyOptions options_;
  double c_ns_ = 0.0;
  std::shared_ptr<const RadialKernel> kernel_;
  std::shared_ptr<const detail::PanelInterpolant> interp_;
  RowMatrix weights_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd boundary_, tail_const_, tail_log_, mass_;
};

namespace detail {

// Moments m_k = \int_a^b ((rho - r)/scale)^k K(r, rho) drho, k = 1..4, with the
// k = 1 integral in the principal-value sense.
inline std::array<double, 5> near_moments(const RadialKernel& kernel, double r, double a, double b,
                                          double scale, const AssemblyOptions& opt) {
  const double s = kernel.params().s();
  const GaussRule& rule = gauss_legendre(opt.near_order);
  std::array<double, 5> m{};
  const double delta = std::min(r - a, b - r);

  auto add_symmetric = [&](double t, double w) {
    const double kp = kernel.weighted_offset(r, t);
    const double km = kernel.weighted_offset(r, -t);
    const double y = t / scale;
    double yk = y;
    for (int k = 1; k <= 4; ++k) {
      m[k] += w * yk * ((k % 2 == 1) ? (kp - km) : (kp + km));
      yk *= y;
    }
  };

  double hi = delta;
  for (int level = 0; level < opt.near_levels; ++level) {
    const double lo = 0.5 * hi;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int q = 0; q < rule.order(); ++q) add_symmetric(mid + half * rule.nodes[q], half * rule.weights[q]);
    hi = lo;
  }
  // Innermost piece [0, eps]: the integrand behaves like t^gamma with
  // gamma = k - 2s (odd k) or k - 1 - 2s (even k).
  {
    const double eps = hi;
    const double kp = kernel.weighted_offset(r, eps);
    const double km = kernel.weighted_offset(r, -eps);
    const double y = eps / scale;
    double yk = y;
    for (int k = 1; k <= 4; ++k) {
      const double f = yk * ((k % 2 == 1) ? (kp - km) : (kp + km));
      const double gamma = (k % 2 == 1) ? k - 2.0 * s : k - 1.0 - 2.0 * s;
      m[k] += f * eps / (gamma + 1.0);
      yk *= y;
    }
  }

  // One-sided remainder, graded away from r.
  const double left = r - a, right = b - r;
  if (left > delta || right > delta) {
    const double extent = std::max(left, right);
    const double sign = right > left ? 1.0 : -1.0;
    double lo = delta, width = delta;
    while (lo < extent) {
      const double up = std::min(lo + width, extent);
      const double half = 0.5 * (up - lo), mid = 0.5 * (up + lo);
      for (int q = 0; q < rule.order(); ++q) {
        const double t = mid + half * rule.nodes[q];
        const double kv = kernel.weighted_offset(r, sign * t);
        const double y = sign * t / scale;
        double yk = y;
        for (int k = 1; k <= 4; ++k) {
          m[k] += half * rule.weights[q] * yk * kv;
          yk *= y;
        }
      }
      lo = up;
      width *= 2.0;
    }
  }
  return m;
}

}  // namespace detail

/// Assembles the discrete operator for 0 < s < 1 on the given grid.
inline OperatorMatrix assemble(const ProblemParams& p, std::shared_ptr<const RadialGrid> grid,
                               const AssemblyOptions& opt = {}) {
  if (!(p.s() < 1.0)) throw ConfigError("assemble: the discrete operator requires 0 < s < 1");
  if (!grid) throw ConfigError("assemble: null grid");
  OperatorMatrix op(p, grid, opt);
  const RadialGrid& g = *grid;
  const int n_int = g.intervals();
  const int size = g.interior_size();
  const double s = p.s();
  op.c_ns_ = operator_normalization(p);
  op.kernel_ = std::make_shared<const RadialKernel>(p);
  op.interp_ = std::make_shared<const detail::PanelInterpolant>(g);
  const RadialKernel& kernel = *op.kernel_;
  const detail::PanelInterpolant& interp = *op.interp_;
  const detail::ExtendedNodes ext(g);

  // Far-field quadrature points and interpolation weights per panel.
  const GaussRule& rule = gauss_legendre(g.quad_order());
  const int nq = rule.order();
  std::vector<double> qx(static_cast<std::size_t>(n_int) * nq), qw(qx.size());
  std::vector<std::array<double, 4>> ql(qx.size());
  for (int j = 0; j < n_int; ++j) {
    const double a = g.node(j), b = g.node(j + 1);
    for (int q = 0; q < nq; ++q) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
      qx[j * nq + q] = x;
      qw[j * nq + q] = 0.5 * (b - a) * rule.weights[q];
      ql[j * nq + q] = interp.stencil(j).lagrange(x);
    }
  }

  op.weights_ = OperatorMatrix::RowMatrix::Zero(size, size);
  op.boundary_ = Eigen::VectorXd::Zero(size);
  op.tail_const_ = Eigen::VectorXd::Zero(size);
  op.tail_log_ = Eigen::VectorXd::Zero(size);

  for (int i = 1; i <= n_int - 1; ++i) {
    const double r = g.node(i);
    double* row = op.weights_.data() + static_cast<Eigen::Index>(i - 1) * size;
    double& bnd = op.boundary_[i - 1];
    auto deposit = [&](int index, double w) {
      if (index == i) return;
      if (index == n_int) bnd += w;
      else row[index - 1] += w;
    };

    const int lo_node = std::max(i - 2, 0), hi_node = std::min(i + 2, n_int);

    // far field
    for (int j = 0; j < n_int; ++j) {
      if (j >= lo_node && j < hi_node) continue;
      const auto& st = interp.stencil(j);
      for (int q = 0; q < nq; ++q) {
        const std::size_t at = static_cast<std::size_t>(j) * nq + q;
        const double kw = kernel.weighted(r, qx[at]) * qw[at];
        for (int l = 0; l < 4; ++l) deposit(st.index[l], kw * ql[at][l]);
      }
    }

    // near field
    {
      const int start = std::min(ext.position(i) - 2, ext.last() - 4);
      std::array<double, 5> y{};
      std::array<int, 5> idx{};
      double scale = 0.0;
      for (int l = 0; l < 5; ++l) {
        y[l] = ext[start + l].x - r;
        idx[l] = ext[start + l].index;
        scale = std::max(scale, std::abs(y[l]));
      }
      Eigen::Matrix<double, 5, 5> vander;
      for (int l = 0; l < 5; ++l) {
        double yk = 1.0;
        for (int k = 0; k < 5; ++k) {
          vander(l, k) = yk;
          yk *= y[l] / scale;
        }
      }
      const Eigen::Matrix<double, 5, 5> inv = vander.fullPivLu().inverse();
      const auto m = detail::near_moments(kernel, r, g.node(lo_node), g.node(hi_node), scale, opt);
      for (int l = 0; l < 5; ++l) {
        double w = 0.0;
        for (int k = 1; k <= 4; ++k) w += inv(k, l) * m[k];
        deposit(idx[l], w);
      }
    }

    // exterior
    const double a1 = kernel.far_field_coefficient();
    op.tail_const_[i - 1] = op.tail_integral(
        r, [](double) { return 1.0; },
        [&](double R, double rr) {
          return std::pow(R, -2.0 * s) / (2.0 * s) + a1 * rr * rr * std::pow(R, -2.0 - 2.0 * s) / (2.0 + 2.0 * s);
        });
    op.tail_log_[i - 1] = op.tail_integral(
        r, [](double rho) { return std::log(rho); },
        [&](double R, double rr) {
          const double g0 = 2.0 * s, g2 = 2.0 + 2.0 * s, lr = std::log(R);
          return std::pow(R, -g0) * (lr / g0 + 1.0 / (g0 * g0)) +
                 a1 * rr * rr * std::pow(R, -g2) * (lr / g2 + 1.0 / (g2 * g2));
        });
  }

  op.weights_ *= op.c_ns_;
  op.boundary_ *= op.c_ns_;
  op.tail_const_ *= op.c_ns_;
  op.tail_log_ *= op.c_ns_;

  op.matrix_ = -Eigen::MatrixXd(op.weights_);
  for (int i = 0; i < size; ++i) {
    op.matrix_(i, i) = op.weights_.row(i).sum() + op.boundary_[i] + op.tail_const_[i];
  }

  // radial mass weights
  const double area = sphere_area(p.n());
  op.mass_ = Eigen::VectorXd::Zero(size);
  for (int j = 0; j < n_int; ++j) {
    const auto& st = interp.stencil(j);
    for (int q = 0; q < nq; ++q) {
      const std::size_t at = static_cast<std::size_t>(j) * nq + q;
      const double w = qw[at] * area * std::pow(qx[at], p.n() - 1);
      for (int l = 0; l < 4; ++l) {
        if (st.index[l] < n_int) op.mass_[st.index[l] - 1] += w * ql[at][l];
      }
    }
  }
  return op;
}

inline OperatorMatrix assemble(const ProblemParams& p, const RadialGrid& grid, const AssemblyOptions& opt = {}) {
  return assemble(p, std::make_shared<const RadialGrid>(grid), opt);
}

namespace detail {

inline void require_same_grid(const OperatorMatrix& op, const RadialFunction& u) {
  if (u.grid != op.grid() && !(*u.grid == *op.grid())) {
    throw ConfigError("fractional Laplacian: function grid does not match operator grid");
  }
}

}  // namespace detail

/// (-Delta)^s u at the interior nodes r_1..r_{N-1}.
inline Eigen::VectorXd apply(const OperatorMatrix& op, const RadialFunction& u) {
  detail::require_same_grid(op, u);
  return op.apply_interior(u.interior(), u.tail);
}

/// \int_{B_1} eta (-Delta)^s zeta dx for test functions vanishing outside B_1.
inline double quadratic_form(const OperatorMatrix& op, const RadialFunction& eta, const RadialFunction& zeta) {
  detail::require_same_grid(op, eta);
  detail::require_same_grid(op, zeta);
  if (!eta.tail.is_zero() || !zeta.tail.is_zero()) {
    throw DomainError("quadratic_form: test functions must vanish outside the unit ball");
  }
  const Eigen::VectorXd lz = apply(op, zeta);
  return (op.mass_weights().array() * eta.interior().array() * lz.array()).sum();
}

/// Matrix Q with eta^T Q zeta = quadratic_form(eta, zeta) on interior values.
inline Eigen::MatrixXd quadratic_form_matrix(const OperatorMatrix& op) {
  return op.mass_weights().asDiagonal() * op.matrix();
}

/// Piecewise-cubic value of u at r in [0, 1]; the value at r_0 is never used.
inline double interpolate(const RadialFunction& u, double r) {
  const RadialGrid& g = *u.grid;
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("interpolate: r must lie in [0, 1]");
  const auto& nodes = g.nodes();
  const int panel = std::clamp(static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), r) - nodes.begin()) - 1,
                               0, g.intervals() - 1);
  const auto st = detail::PanelInterpolant::panel_stencil(g, panel);
  const auto l = st.lagrange(r);
  double v = 0.0;
  for (int m = 0; m < 4; ++m) v += l[m] * u.values[st.index[m]];
  return v;
}

/// \int_0^1 f(r) weight(r) dr, where f is given by interior nodal values and its
/// value at r = 1, and weight(r) ~ r^origin_exponent as r -> 0 (exponent > -1).
template <class W>
double integrate_radial(const OperatorMatrix& op, const Eigen::VectorXd& interior, double boundary, W&& weight,
                        double origin_exponent, int order = 16) {
  const RadialGrid& g = *op.grid();
  const auto& interp = op.interpolant();
  const std::span<const double> vals(interior.data(), static_cast<std::size_t>(interior.size()));
  double sum = 0.0;
  for (int j = 1; j < g.intervals(); ++j) {
    sum += gauss_integrate([&](double x) { return weight(x) * interp.eval(j, x, vals, boundary); }, g.node(j),
                           g.node(j + 1), order);
  }
  auto f = [&](double x) { return weight(x) * interp.eval(0, x, vals, boundary); };
  double hi = g.node(1);
  for (int level = 0; level < 40; ++level) {
    sum += gauss_integrate(f, 0.5 * hi, hi, order);
    hi *= 0.5;
  }
  return sum + f(hi) * hi / (origin_exponent + 1.0);
}

}  // namespace fracgelfand

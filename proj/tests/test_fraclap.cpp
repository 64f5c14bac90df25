#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "fracgelfand/fraclap.hpp"
#include "fracgelfand/gelfand.hpp"
#include "oracles.hpp"

namespace fg = fracgelfand;

namespace {

using Grid = std::shared_ptr<const fg::RadialGrid>;

Grid graded(int n) { return std::make_shared<const fg::RadialGrid>(fg::RadialGrid::graded(n)); }

// (-Delta)^s u(x) in R^2 at |x| = a for radial u, straight from the singular
// integral in polar coordinates around x:
//   c \int_0^inf rho^{-1-2s} \int_0^{2 pi} (u(x) - u(x + rho w)) dtheta drho.
// The inner integral is split where |x + rho w| crosses the given radii; below
// rho = delta the second-order Taylor term (pi rho^2 / 2) Laplacian u is used.
struct Radial2D {
  std::function<double(double)> u, laplacian;
  std::vector<double> kinks;  // radii where u is not smooth
};

double frac_lap_2d(double s, const Radial2D& f, double a) {
  const double pi = std::numbers::pi;
  boost::math::quadrature::tanh_sinh<double> ts;
  const double ua = f.u(a);
  // int_0^{2 pi} (u(x) - u(x + rho w)) = 2 pi u(x) - 2 int_0^pi u(|x - rho w|), with
  // |x - rho w|^2 = (a - rho)^2 + 4 a rho sin^2(phi/2) free of cancellation near y = 0
  auto angular = [&](double rho) {
    std::vector<double> cuts{0.0, pi};
    for (double k : f.kinks) {
      const double q = (k * k - (a - rho) * (a - rho)) / (4.0 * a * rho);
      if (q > 0.0 && q < 1.0) cuts.push_back(2.0 * std::asin(std::sqrt(q)));
    }
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] - cuts[i] < 1e-15) continue;
      sum += ts.integrate(
          [&](double phi) {
            const double h = std::sin(0.5 * phi);
            return f.u(std::sqrt((a - rho) * (a - rho) + 4.0 * a * rho * h * h));
          },
          cuts[i], cuts[i + 1], 1e-14);
    }
    return 2.0 * pi * ua - 2.0 * sum;
  };
  const double delta = 1e-3;
  double total = -0.5 * pi * f.laplacian(a) * std::pow(delta, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
  std::vector<double> breaks{delta};
  for (double k : f.kinks) {
    for (double b : {std::abs(k - a), k + a}) {
      if (b > delta) breaks.push_back(b);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    total += ts.integrate([&](double rho) { return std::pow(rho, -1.0 - 2.0 * s) * angular(rho); }, breaks[i],
                          breaks[i + 1], 1e-12);
  }
  // rho = 1/t beyond the last break
  const double tmax = 1.0 / breaks.back();
  total += ts.integrate([&](double t) { return std::pow(t, 2.0 * s - 1.0) * angular(1.0 / t); }, 0.0, tmax, 1e-12);
  return fg::operator_normalization({2, s}) * total;
}

fg::RadialFunction bump(const Grid& g, double centre, double width, double amp = 1.0) {
  return fg::RadialFunction::sample(g, [=](double r) {
    const double x = (r - centre) / width;
    return std::abs(x) < 1.0 ? amp * std::pow(1.0 - x * x, 3) : 0.0;
  });
}

}  // namespace

TEST(Normalization, QuadratureOracleTwoDimensions) {
  // power function: the closed-form power map fixes the constant in front of the integral
  const double alpha = 0.5, a = 0.6;
  const Radial2D power{[=](double r) { return std::pow(r, -alpha); },
                       [=](double r) { return alpha * alpha * std::pow(r, -alpha - 2.0); },
                       {0.0}};
  const double value = frac_lap_2d(0.5, power, a);
  const double expected = fg::power_coefficient({2, 0.5}, alpha) * std::pow(a, -alpha - 1.0);
  EXPECT_NEAR(value / expected, 1.0, 1e-6);
}

TEST(Normalization, QuadratureOracleTorsionProfile) {
  // (1 - r^2)_+^s has constant image 2^{2s} Gamma(1+s) Gamma((n+2s)/2) / Gamma(n/2) in B_1
  const Radial2D torsion{[](double r) { return r < 1.0 ? std::sqrt(1.0 - r * r) : 0.0; },
                         [](double r) {
                           const double q = 1.0 - r * r;
                           return -1.0 / std::sqrt(q) - r * r / (q * std::sqrt(q)) - 1.0 / std::sqrt(q);
                         },
                         {1.0}};
  const double expected = 1.0 / fg::torsion_peak({2, 0.5});
  for (double a : {0.3, 0.5}) EXPECT_NEAR(frac_lap_2d(0.5, torsion, a) / expected, 1.0, 1e-6) << a;
}

TEST(Assemble, Validation) {
  const auto g = graded(32);
  EXPECT_THROW(fg::assemble({3, 1.0}, g), fg::ConfigError);
  EXPECT_THROW(fg::RadialGrid::graded(15), fg::ConfigError);
  EXPECT_THROW(fg::RadialGrid({0.0, 0.5, 1.0}, 2.0, 10), fg::ConfigError);
  std::vector<double> bad(17);
  for (int i = 0; i <= 16; ++i) bad[i] = i / 16.0;
  bad[5] = bad[4];
  EXPECT_THROW(fg::RadialGrid(bad, 2.0, 10), fg::ConfigError);
  EXPECT_THROW(fg::TailSpec::power(-1.0, 1.0), fg::DomainError);
  EXPECT_THROW(fg::TailSpec::log_power(INFINITY), fg::DomainError);
}

TEST(Apply, AnnihilatesConstants) {
  for (auto [n, s] : std::vector<std::pair<int, double>>{{1, 0.3}, {2, 0.5}, {3, 0.5}, {7, 0.9}, {12, 0.1}}) {
    const auto op = fg::assemble({n, s}, graded(128));
    EXPECT_LE(oracles::constant_error(op), 1e-8) << n << ' ' << s;
    const auto u = fg::RadialFunction::sample(op.grid(), [](double) { return -3.5; }, fg::TailSpec::constant(-3.5));
    EXPECT_LE(fg::apply(op, u).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Apply, PowerMapConvergesUnderRefinement) {
  for (const auto& c : oracles::power_test_matrix()) {
    const fg::ProblemParams p(c.n, c.s);
    const double alpha = 0.5 * (c.n - 2.0 * c.s);
    double previous = INFINITY;
    for (int n_int : {128, 256, 512, 1024}) {
      const double err = oracles::power_map_error(p, n_int, alpha);
      if (n_int == 512) {
        EXPECT_LE(err, 1e-2) << c.n << ' ' << c.s;
      }
      EXPECT_LT(err, previous) << c.n << ' ' << c.s << " N=" << n_int;
      previous = err;
    }
  }
}

TEST(Apply, InverseDistanceInThreeDimensions) {
  const auto op = fg::assemble({3, 0.5}, graded(512));
  const auto u = fg::RadialFunction::sample(op.grid(), [](double r) { return 1.0 / r; }, fg::TailSpec::power(1.0, 1.0),
                                            true);
  const Eigen::VectorXd lu = fg::apply(op, u);
  const auto& g = *op.grid();
  for (int i = 1; i < g.intervals(); ++i) {
    const double r = g.node(i);
    if (r < 0.1 || r > 0.9) continue;
    EXPECT_NEAR(lu[i - 1] / (2.0 / std::numbers::pi / (r * r)), 1.0, 1e-2) << r;
  }
}

TEST(Apply, TorsionProfileHasConstantImage) {
  // n = 2, s = 1/2: (1 - r^2)^{1/2} with zero exterior maps to 1/zeta(0); the
  // closed form is checked against direct quadrature above
  const auto op = fg::assemble({2, 0.5}, graded(512));
  const auto u = fg::RadialFunction::sample(op.grid(), [](double r) { return std::sqrt(1.0 - r * r); });
  const Eigen::VectorXd lu = fg::apply(op, u);
  const double expected = 1.0 / fg::torsion_peak({2, 0.5});
  const auto& g = *op.grid();
  for (int i = 1; i < g.intervals(); ++i) {
    if (g.node(i) > 0.9) break;
    EXPECT_NEAR(lu[i - 1] / expected, 1.0, 1e-5) << g.node(i);
  }
}

TEST(Apply, LogarithmicProfile) {
  for (auto [n, s] : std::vector<std::pair<int, double>>{{3, 0.5}, {4, 0.25}}) {
    const auto op = fg::assemble({n, s}, graded(512));
    const double sv = s;
    const auto u = fg::RadialFunction::sample(op.grid(), [sv](double r) { return -2.0 * sv * std::log(r); },
                                              fg::TailSpec::log_power(1.0), true);
    const Eigen::VectorXd lu = fg::apply(op, u);
    const double l0 = fg::lambda0({n, s});
    const auto& g = *op.grid();
    for (int i = 1; i < g.intervals(); ++i) {
      const double r = g.node(i);
      if (r < 0.05 || r > 0.95) continue;
      EXPECT_NEAR(lu[i - 1] / (l0 * std::pow(r, -2.0 * s)), 1.0, 1e-2) << r;
    }
  }
}

TEST(Apply, Linearity) {
  const auto op = fg::assemble({3, 0.3}, graded(64));
  const auto g = op.grid();
  const auto u = fg::RadialFunction::sample(g, [](double r) { return std::cos(3.0 * r) + r * r; });
  const auto v = fg::RadialFunction::sample(g, [](double r) { return std::exp(-r) * (1.0 - r); });
  const double a = 2.5, b = -0.75;
  const auto w = fg::RadialFunction(g, a * u.values + b * v.values);
  const Eigen::VectorXd lhs = fg::apply(op, w);
  const Eigen::VectorXd rhs = a * fg::apply(op, u) + b * fg::apply(op, v);
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));

  // tails combine linearly too
  const auto p1 = fg::RadialFunction::sample(g, [](double r) { return 1.0 / r; }, fg::TailSpec::power(1.0, 1.0), true);
  const auto p3 = fg::RadialFunction::sample(g, [](double r) { return 3.0 / r; }, fg::TailSpec::power(1.0, 3.0), true);
  EXPECT_LE((fg::apply(op, p3) - 3.0 * fg::apply(op, p1)).cwiseAbs().maxCoeff(),
            1e-12 * fg::apply(op, p3).cwiseAbs().maxCoeff());
}

TEST(Apply, NonnegativeAtInteriorMaximum) {
  for (auto [n, s] : std::vector<std::pair<int, double>>{{1, 0.3}, {3, 0.5}, {6, 0.8}}) {
    const auto op = fg::assemble({n, s}, graded(128));
    const auto& g = *op.grid();
    for (double c : {0.2, 0.5, 0.8}) {
      const auto u = bump(op.grid(), c, 0.15);
      int best = 1;
      for (int i = 1; i < g.intervals(); ++i) {
        if (u.values[i] > u.values[best]) best = i;
      }
      EXPECT_GE(fg::apply(op, u)[best - 1], 0.0) << n << ' ' << s << ' ' << c;
    }
  }
}

TEST(Apply, Errors) {
  const auto op = fg::assemble({3, 0.5}, graded(32));
  const auto other = fg::RadialFunction::sample(graded(40), [](double r) { return 1.0 - r; });
  EXPECT_THROW(fg::apply(op, other), fg::ConfigError);
  EXPECT_THROW(op.apply_interior(Eigen::VectorXd::Zero(3), fg::TailSpec::zero()), fg::ConfigError);
  // an equal grid held by another pointer is accepted
  const auto same = fg::RadialFunction::sample(graded(32), [](double r) { return 1.0 - r; });
  EXPECT_NO_THROW(fg::apply(op, same));
}

TEST(QuadraticForm, RejectsExteriorData) {
  const auto op = fg::assemble({3, 0.5}, graded(32));
  const auto eta = bump(op.grid(), 0.5, 0.2);
  const auto c = fg::RadialFunction::sample(op.grid(), [](double) { return 1.0; }, fg::TailSpec::constant(1.0));
  EXPECT_THROW(fg::quadratic_form(op, eta, c), fg::DomainError);
  EXPECT_THROW(fg::quadratic_form(op, c, eta), fg::DomainError);
}

TEST(QuadraticForm, MassWeightsIntegrate) {
  const auto op = fg::assemble({3, 0.5}, graded(256));
  // \int_{B_1} (1 - r^2) dx = 4 pi (1/3 - 1/5)
  double sum = 0.0;
  for (int i = 0; i < op.size(); ++i) {
    const double r = op.grid()->node(i + 1);
    sum += op.mass_weights()[i] * (1.0 - r * r);
  }
  EXPECT_NEAR(sum, 4.0 * std::numbers::pi * (1.0 / 3.0 - 1.0 / 5.0), 1e-8);
  const Eigen::MatrixXd q = fg::quadratic_form_matrix(op);
  const auto eta = bump(op.grid(), 0.4, 0.3);
  EXPECT_NEAR(eta.interior().dot(q * eta.interior()), fg::quadratic_form(op, eta, eta), 1e-10);
}

TEST(QuadraticForm, PositiveOnRandomTestFunctions) {
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), centre(0.1, 0.85), width(0.05, 0.4);
  for (auto [n, s] : std::vector<std::pair<int, double>>{{1, 0.3}, {3, 0.5}, {10, 0.9}}) {
    const auto op = fg::assemble({n, s}, graded(128));
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(op.grid()->intervals() + 1);
      for (int k = 0; k < 3; ++k) {
        const double c = centre(rng);
        const double w = std::min(width(rng), 0.98 - c);
        v += bump(op.grid(), c, w, coef(rng)).values;
      }
      const fg::RadialFunction eta(op.grid(), v);
      EXPECT_GT(fg::quadratic_form(op, eta, eta), 0.0) << n << ' ' << s << " trial " << trial;
    }
  }
}

TEST(QuadraticForm, Symmetric) {
  // energy-normalized: |Q(a,b) - Q(b,a)| / sqrt(Q(a,a) Q(b,b))
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> centre(0.15, 0.8), width(0.1, 0.3);
  auto asym = [&](const fg::OperatorMatrix& op, int trials) {
    double worst = 0.0;
    std::mt19937_64 local(11);
    for (int t = 0; t < trials; ++t) {
      const double c1 = centre(local), c2 = centre(local);
      const auto a = bump(op.grid(), c1, std::min(width(local), 0.98 - c1));
      const auto b = bump(op.grid(), c2, std::min(width(local), 0.98 - c2));
      const double ab = fg::quadratic_form(op, a, b), ba = fg::quadratic_form(op, b, a);
      const double scale = std::sqrt(fg::quadratic_form(op, a, a) * fg::quadratic_form(op, b, b));
      worst = std::max(worst, std::abs(ab - ba) / scale);
    }
    return worst;
  };
  for (auto [n, s] : std::vector<std::pair<int, double>>{{3, 0.5}, {1, 0.3}}) {
    EXPECT_LE(asym(fg::assemble({n, s}, graded(512)), 20), 1e-6) << n << ' ' << s;
  }
  // larger n and s: the defect shrinks under refinement
  for (auto [n, s] : std::vector<std::pair<int, double>>{{5, 0.7}, {10, 0.9}}) {
    const double coarse = asym(fg::assemble({n, s}, graded(256)), 10);
    const double fine = asym(fg::assemble({n, s}, graded(512)), 10);
    EXPECT_LT(fine, coarse) << n << ' ' << s;
    EXPECT_LE(fine, 1e-5) << n << ' ' << s;
  }
  (void)rng;
}

TEST(Interpolate, CubicAccuracy) {
  const auto g = graded(64);
  const auto u = fg::RadialFunction::sample(g, [](double r) { return std::cos(r); });
  for (double r : {0.0, 0.013, 0.25, 0.5, 0.77, 0.999, 1.0}) EXPECT_NEAR(fg::interpolate(u, r), std::cos(r), 1e-7);
  EXPECT_THROW(fg::interpolate(u, 1.5), fg::DomainError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ibnls/error.hpp"
#include "ibnls/field_ops.hpp"

using namespace ibnls;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

ComplexField gaussian_1d(GridPtr g, double width = 1.0) {
  ComplexField u(g);
  const auto x = g->axis_coordinates();
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(-0.5 * x[i] * x[i] / (width * width));
  return u;
}

ComplexField gaussian_nd(GridPtr g, double x0) {
  ComplexField u(g);
  const auto xs = g->axis_coordinates();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto idx = g->unravel(i);
    double r2 = 0.0;
    for (int d = 0; d < g->dimension(); ++d) {
      const double s = xs[idx[d]] - (d == 0 ? x0 : 0.0);
      r2 += s * s;
    }
    u[i] = std::exp(-0.5 * r2) * std::exp(cplx(0, 0.7 * xs[idx[0]]));
  }
  return u;
}

ModelParams params_for(const Grid& g, double b, double nu = 0.0) {
  ModelParams p;
  p.dimension = g.dimension();
  p.b = b;
  p.nu = nu;
  p.epsilon = 0.5 * g.spacing();
  return p;
}

}  // namespace

TEST(Norms, ZeroField) {
  const auto g = Grid::build({2, 16, 4.0});
  ComplexField u(g);
  EXPECT_EQ(l2_norm_sq(u), 0.0);
  EXPECT_EQ(grad_norm_sq(u), 0.0);
  EXPECT_EQ(lap_norm_sq(u), 0.0);
  EXPECT_EQ(sup_norm(u), 0.0);
  EXPECT_EQ(potential_integral(u, params_for(*g, 0.3)), 0.0);
}

TEST(Norms, GaussianMoments) {
  const auto g = Grid::build({1, 512, 20.0});
  const auto u = gaussian_1d(g);
  EXPECT_NEAR(l2_norm_sq(u), kSqrtPi, 1e-8);
  EXPECT_NEAR(grad_norm_sq(u), 0.5 * kSqrtPi, 1e-8);
  EXPECT_NEAR(lap_norm_sq(u), 0.75 * kSqrtPi, 1e-8);
  EXPECT_NEAR(sup_norm(u), 1.0, 1e-15);
}

TEST(Norms, Homogeneous) {
  const auto g = Grid::build({2, 32, 8.0});
  const auto u = gaussian_nd(g, 0.5);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0.1, 5.0);
  for (int k = 0; k < 5; ++k) {
    const double s = d(rng);
    ComplexField v = u;
    v *= cplx(0.0, s);
    EXPECT_NEAR(l2_norm_sq(v), s * s * l2_norm_sq(u), 1e-12 * s * s * l2_norm_sq(u));
    EXPECT_NEAR(grad_norm_sq(v), s * s * grad_norm_sq(u), 1e-12 * s * s * grad_norm_sq(u));
    EXPECT_NEAR(lap_norm_sq(v), s * s * lap_norm_sq(u), 1e-12 * s * s * lap_norm_sq(u));
    EXPECT_NEAR(sup_norm(v), s * sup_norm(u), 1e-13 * s);
  }
}

TEST(Norms, SpectralAndPhysicalGradientAgree) {
  const auto g = Grid::build({2, 64, 10.0});
  const auto u = gaussian_nd(g, 1.0);
  double phys = 0.0;
  for (const auto& d : gradient(u))
    for (const auto& v : d.values()) phys += std::norm(v);
  phys *= g->cell_volume();
  EXPECT_NEAR(phys, grad_norm_sq(u), 1e-10);
}

TEST(Restricted, ZeroRadiusIsGlobal) {
  const auto g = Grid::build({2, 32, 8.0});
  const auto u = gaussian_nd(g, 1.0);
  const auto e = restricted_norms(u, 0.0);
  EXPECT_EQ(e.mass, l2_norm_sq(u));
  EXPECT_NEAR(e.grad_sq, grad_norm_sq(u), 1e-12 * grad_norm_sq(u));
  EXPECT_NEAR(e.lap_sq, lap_norm_sq(u), 1e-12 * lap_norm_sq(u));
}

TEST(Restricted, EmptyRegion) {
  const auto g = Grid::build({2, 16, 4.0});
  ComplexField u(g);
  try {
    restricted_norms(u, 4.0 * std::sqrt(2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RegionEmpty);
  }
}

TEST(Restricted, ExteriorMassMatchesErfc) {
  // h = 1/128 puts x = +-2 on the lattice; the indicator r > 2 drops them,
  // so the oracle is the trapezoid sum with its endpoint corrections.
  const auto g = Grid::build({1, 4096, 16.0});
  const double h = g->spacing();
  const auto e = restricted_norms(gaussian_1d(g), 2.0);
  const double f2 = std::exp(-4.0);
  const double oracle = kSqrtPi * std::erfc(2.0) - h * f2 + 2.0 / 3.0 * h * h * f2;
  EXPECT_NEAR(e.mass, oracle, 1e-6);
}

TEST(Weight, OriginAndEpsilon) {
  const auto g = Grid::build({1, 64, 4.0});
  ModelParams p = params_for(*g, 0.7);
  p.epsilon = g->spacing();
  const auto w = singular_weight(*g, p);
  const auto x = g->axis_coordinates();
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_TRUE(std::isfinite(w[i]));
    if (std::abs(x[i]) < 1e-14) EXPECT_NEAR(w[i], std::pow(p.epsilon, -0.7), 1e-13);
    if (std::abs(std::abs(x[i]) - p.epsilon) < 1e-14)
      EXPECT_NEAR(w[i], std::pow(2.0 * p.epsilon * p.epsilon, -0.35), 1e-13);
  }
}

TEST(Weight, CloseToPowerLawAwayFromOrigin) {
  const auto g = Grid::build({1, 64, 4.0});
  for (double b : {0.1, 0.3, 0.45}) {
    ModelParams p = params_for(*g, b);
    p.epsilon = 0.1 * g->spacing();
    const auto w = singular_weight(*g, p);
    const auto x = g->axis_coordinates();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (std::abs(std::abs(x[i]) - 10.0 * p.epsilon) > 1e-12) continue;
      const double exact = std::pow(std::abs(x[i]), -b);
      EXPECT_LT(std::abs(w[i] - exact) / exact, 0.005 * b);
    }
    // radially decreasing
    for (std::size_t i = g->points() / 2; i + 1 < w.size(); ++i) EXPECT_GT(w[i], w[i + 1]);
  }
}

TEST(Potential, Homogeneity) {
  const auto g = Grid::build({2, 32, 8.0});
  const auto p = params_for(*g, 0.3);
  const auto u = gaussian_nd(g, 1.0);
  ComplexField v = u;
  v *= 2.0;
  const double q = p.exponent();
  EXPECT_NEAR(potential_integral(v, p), std::pow(2.0, 2.0 + q) * potential_integral(u, p),
              1e-12 * potential_integral(v, p));
}

TEST(Potential, MonotoneInModulus) {
  const auto g = Grid::build({1, 128, 10.0});
  const auto p = params_for(*g, 0.3);
  const auto u = gaussian_1d(g);
  ComplexField v = u;
  const auto x = g->axis_coordinates();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (x[i] > 0.5 && x[i] < 1.5) v[i] *= 1.1;
  EXPECT_GT(potential_integral(v, p), potential_integral(u, p));
}

TEST(Potential, GaussianAgainstAdaptiveQuadrature) {
  const auto g = Grid::build({1, 512, 20.0});
  const auto p = params_for(*g, 0.3);
  const double power = 2.0 + p.exponent();
  auto f = [&](double x) {
    return std::pow(x * x + p.epsilon * p.epsilon, -0.5 * p.b) * std::exp(-0.5 * power * x * x);
  };
  using boost::math::quadrature::gauss_kronrod;
  double oracle = 0.0;
  const double breaks[] = {0.0, p.epsilon, 10.0 * p.epsilon, 1.0, 20.0};
  for (int k = 0; k < 4; ++k)
    oracle += 2.0 * gauss_kronrod<double, 61>::integrate(f, breaks[k], breaks[k + 1], 15, 1e-14);
  EXPECT_NEAR(potential_integral(gaussian_1d(g), p), oracle, 1e-5);
}

TEST(ModelParams, Validation) {
  ModelParams p;
  p.dimension = 1;
  p.epsilon = 0.1;
  p.b = 0.6;
  EXPECT_THROW(p.validate(), Error);
  p.b = 0.3;
  EXPECT_NO_THROW(p.validate());
  p.nu = -1.0;
  EXPECT_THROW(p.validate(), Error);
  p.nu = 0.0;
  p.epsilon = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p.epsilon = 0.1;
  p.dimension = 3;
  p.b = 1.49;
  EXPECT_NO_THROW(p.validate());
  p.b = 1.5;
  EXPECT_THROW(p.validate(), Error);
  p.b = 0.0;
  EXPECT_THROW(p.validate(), Error);
}

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <boost/math/quadrature/gauss.hpp>

#include "ibnls/virial.hpp"

using namespace ibnls;

namespace {

ComplexField packet(GridPtr g, double amp, double x0, double k, double width = 1.0) {
  ComplexField u(g);
  const auto xs = g->axis_coordinates();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto idx = g->unravel(i);
    double r2 = 0.0;
    for (int d = 0; d < g->dimension(); ++d) {
      const double s = xs[idx[d]] - (d == 0 ? x0 : 0.5 * x0);
      r2 += s * s;
    }
    u[i] = amp * std::exp(-0.5 * r2 / (width * width)) * std::exp(cplx(0, k * xs[idx[0]]));
  }
  return u;
}

ModelParams model(const Grid& g, double b, double nu, double coupling = 1.0) {
  ModelParams p;
  p.dimension = g.dimension();
  p.b = b;
  p.nu = nu;
  p.epsilon = 0.5 * g.spacing();
  p.coupling = coupling;
  return p;
}

CutoffSpec cutoff(double R, double b = 0.3) { return {ChiProfile::build(8, b), R}; }

}  // namespace

TEST(VirialZ, RealFieldAndConjugation) {
  const auto g = Grid::build({2, 32, 10.0});
  const auto p = model(*g, 0.3, 1.0);
  const auto cut = CartesianCutoff::build(g, cutoff(3.0), p);
  const auto real = packet(g, 1.0, 2.0, 0.0);
  EXPECT_NEAR(virial_Z(real, cut), 0.0, 1e-13);
  const auto u = packet(g, 1.0, 2.0, 1.3);
  ComplexField ubar = u;
  for (auto& v : ubar.values()) v = std::conj(v);
  EXPECT_NEAR(virial_Z(ubar, cut), -virial_Z(u, cut), 1e-12 * std::abs(virial_Z(u, cut)));
}

TEST(VirialZ, ModulatedProfileMatchesQuadrature) {
  const auto g = Grid::build({1, 512, 20.0});
  const auto p = model(*g, 0.3, 0.0);
  const auto spec = cutoff(4.0);
  const auto cut = CartesianCutoff::build(g, spec, p);
  const double k = 1.7, x0 = 6.0;
  const auto u = packet(g, 1.0, x0, k);
  // Z = factor k int d_x phi_R g^2, with d_x phi_R = sign(x) phi_R'(|x|);
  // Gauss-Legendre panels broken at the cutoff junctions.
  using boost::math::quadrature::gauss;
  const double R = spec.R, a = spec.profile.bridge_start() * R;
  const double breaks[] = {0.0, R, a, 2.0 * R, 20.0};
  double oracle = 0.0;
  for (double sgn : {1.0, -1.0})
    for (int piece = 0; piece < 4; ++piece) {
      const double lo = breaks[piece], w = (breaks[piece + 1] - lo) / 200.0;
      for (int q = 0; q < 200; ++q)
        oracle += sgn * gauss<double, 8>::integrate(
                            [&](double r) {
                              const double x = sgn * r;
                              return spec.phi_jet(r)[1] * std::exp(-(x - x0) * (x - x0));
                            },
                            lo + q * w, lo + (q + 1) * w);
    }
  oracle *= 2.0 * k;
  EXPECT_NEAR(virial_Z(u, cut, 2.0), oracle, 1e-8 * std::abs(oracle));
  EXPECT_NEAR(virial_Z(u, cut, 1.0), 0.5 * oracle, 1e-8 * std::abs(oracle));
}

TEST(VirialRhs, HessianTermMatchesBruteForce) {
  const auto g = Grid::build({2, 32, 10.0});
  const auto p = model(*g, 0.3, 1.0);
  const auto spec = cutoff(2.0);
  const auto cut = CartesianCutoff::build(g, spec, p);
  const auto u = packet(g, 1.0, 1.0, 0.8, 1.5);
  const double term = virial_rhs(u, cut, p).terms[2];

  // 8 sum_ijk int d_jk phi Re(d_ik u conj d_ij u) on a 32x finer lattice
  const auto fine = Grid::build({2, 1024, 10.0});
  const auto v = resample(u, fine);
  ComplexField hess[2][2] = {{ComplexField(fine), ComplexField(fine)},
                             {ComplexField(fine), ComplexField(fine)}};
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c) {
      MultiIndex o{0, 0, 0};
      o[a] += 1;
      o[c] += 1;
      hess[a][c] = apply_derivative(v, o);
    }
  const auto xs = fine->axis_coordinates();
  double acc = 0.0;
  for (std::size_t n = 0; n < fine->size(); ++n) {
    const auto idx = fine->unravel(n);
    const double x[2] = {xs[idx[0]], xs[idx[1]]};
    const double r = std::hypot(x[0], x[1]);
    const auto jet = spec.phi_jet(r);
    const double af = r > 0 ? jet[1] / r : 2.0;
    const double cf = r > 0 ? (jet[2] - af) / (r * r) : 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          const double hphi = (j == k ? af : 0.0) + cf * x[j] * x[k];
          acc += hphi * std::real(hess[i][k][n] * std::conj(hess[i][j][n]));
        }
  }
  acc *= 8.0 * fine->cell_volume();
  EXPECT_NEAR(term, acc, 1e-6 * std::abs(acc));
}

TEST(VirialRhs, ZeroFieldIsStationary) {
  const auto g = Grid::build({1, 64, 10.0});
  const auto p = model(*g, 0.3, 1.0);
  const auto cut = CartesianCutoff::build(g, cutoff(3.0), p);
  const auto rep = virial_residual_at(ComplexField(g), 0.0, 1e-5, cut, p);
  EXPECT_EQ(rep.sum, 0.0);
  EXPECT_EQ(rep.Z, 0.0);
  ASSERT_TRUE(rep.fd.has_value());
  EXPECT_EQ(*rep.fd, 0.0);
  EXPECT_EQ(rep.residual, 0.0);
}

TEST(VirialRhs, LargeCutoffReducesToFreeForm) {
  const auto g = Grid::build({2, 64, 12.0});
  const auto p = model(*g, 0.3, 1.0);
  const auto cut = CartesianCutoff::build(g, cutoff(40.0), p);
  const auto rep = virial_rhs(packet(g, 1.0, 1.0, 0.5), cut, p);
  const double scale = std::abs(rep.terms[2]);
  EXPECT_LT(std::abs(rep.terms[1]), 1e-10 * scale);  // Lap^3 phi
  EXPECT_LT(std::abs(rep.terms[3]), 1e-10 * scale);  // Lap^2 phi |grad u|^2
  EXPECT_LT(std::abs(rep.terms[4]), 1e-10 * scale);  // nu Lap^2 phi |u|^2
  EXPECT_EQ(rep.R2, 0.0);
  EXPECT_LE(rep.R1nu, 1e-10);
}

TEST(VirialZ, ConvergesInR) {
  const auto g = Grid::build({1, 512, 40.0});
  const auto p = model(*g, 0.3, 0.0);
  const auto u = packet(g, 1.0, 1.0, 1.0);
  const double z8 = virial_Z(u, CartesianCutoff::build(g, cutoff(8.0), p));
  const double z16 = virial_Z(u, CartesianCutoff::build(g, cutoff(16.0), p));
  EXPECT_LT(std::abs(z8 - z16), 1e-8);
}

TEST(VirialRhs, RemainderSigns) {
  const auto g = Grid::build({1, 256, 20.0});
  for (double nu : {0.0, 1.0}) {
    const auto p = model(*g, 0.3, nu);
    for (double R : {1.0, 2.0, 4.0}) {
      const auto cut = CartesianCutoff::build(g, cutoff(R), p);
      for (double x0 : {0.0, 2.0, 5.0}) {
        const auto rep = virial_rhs(packet(g, 1.2, x0, 1.5), cut, p);
        EXPECT_LE(rep.R1nu, 1e-10) << "R=" << R << " x0=" << x0;
        EXPECT_GE(rep.R2, 0.0);
      }
    }
  }
}

TEST(VirialRhs, ResolutionIndependent) {
  const auto p32 = Grid::build({1, 256, 20.0});
  const auto p64 = Grid::build({1, 512, 20.0});
  const auto u = packet(p32, 1.0, 1.0, 0.5);
  const auto v = resample(u, p64);
  auto params = model(*p32, 0.3, 1.0, 0.0);
  const auto r1 = virial_rhs(u, CartesianCutoff::build(p32, cutoff(3.0), params), params);
  params.epsilon = 0.5 * p64->spacing();
  const auto r2 = virial_rhs(v, CartesianCutoff::build(p64, cutoff(3.0), params), params);
  EXPECT_NEAR(r1.sum, r2.sum, 1e-6 * std::max(1.0, std::abs(r1.sum)));
}

TEST(VirialResidual, FreeFlow) {
  const auto g = Grid::build({1, 512, 20.0});
  const auto p = model(*g, 0.3, 0.0, 0.0);
  const auto cut = CartesianCutoff::build(g, cutoff(3.0), p);
  const auto rep = virial_residual_at(packet(g, 1.0, 2.0, 1.0), 0.0, 1e-5, cut, p);
  EXPECT_LT(rep.residual, 1e-3);
}

TEST(VirialResidual, FullModelDefaultVariant) {
  const auto g = Grid::build({1, 512, 20.0});
  const auto p = model(*g, 0.3, 1.0);
  const auto cut = CartesianCutoff::build(g, cutoff(8.0), p);
  const auto rep = virial_residual_at(packet(g, 1.0, 3.0, 0.0), 0.0, 1e-5, cut, p);
  EXPECT_LT(rep.residual, 1e-3);
}

TEST(VirialVariant, Candidates) {
  const auto c = virial_candidates();
  ASSERT_EQ(c.size(), 8u);
  std::set<std::string> labels;
  for (const auto& v : c) labels.insert(v.label());
  EXPECT_EQ(labels.size(), 8u);
  const VirialVariant d;
  EXPECT_EQ(d.factor, 2.0);
  EXPECT_EQ(d.nu_term_sign, -1.0);
  EXPECT_FALSE(d.printed_last_exponent);
}

TEST(Morawetz, SyntheticReports) {
  std::vector<MorawetzSample> s;
  for (int i = 0; i < 20; ++i) {
    MorawetzSample m;
    m.t = 0.1 * i;
    m.Z = 1.0 - 2.0 * m.t;
    m.dZdt = -2.0;
    m.R1nu = -1e-3;
    m.decay_test = m.dZdt + 16.0;
    s.push_back(m);
  }
  EXPECT_TRUE(morawetz_decay_report(s, -1.0, 1.0).pass());
  auto bad = s;
  bad[5].R1nu = 1e-6;
  EXPECT_FALSE(morawetz_decay_report(bad, -1.0, 1.0).pass());
  // nu = 0: dZ/dt <= 8 E0
  EXPECT_FALSE(morawetz_decay_report(s, -1.0, 0.0).pass());
  for (auto& m : s) m.dZdt = -9.0;
  EXPECT_TRUE(morawetz_decay_report(s, -1.0, 0.0).pass());
}

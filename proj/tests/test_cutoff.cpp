#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ibnls/cutoff.hpp"
#include "ibnls/error.hpp"

using namespace ibnls;

namespace {

double outer_phi2(int N, double b) { return 16.0 * N / (N + 4.0 - b); }

}  // namespace

TEST(Chi, RejectsSmallK) {
  try {
    ChiProfile::build(3, 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::KTooSmall);
  }
  EXPECT_NO_THROW(ChiProfile::build(4, 0.3));
}

TEST(Chi, PiecewiseValues) {
  const auto chi = ChiProfile::build(8, 0.3);
  EXPECT_DOUBLE_EQ(chi.chi_jet(1.0)[0], 2.0);
  EXPECT_NEAR(chi.chi_jet(1.0 + 1e-12)[0], 2.0, 1e-10);
  EXPECT_NEAR(chi.chi_jet(0.37)[0], 0.74, 1e-15);
  for (double s : {2.0, 2.5, 10.0}) EXPECT_EQ(chi.chi_jet(s)[0], 0.0);
  const double a = 1.0 + std::pow(8.0, -1.0 / 7.0);
  EXPECT_NEAR(chi.bridge_start(), a, 1e-15);
  EXPECT_NEAR(chi.chi_jet(a)[0], 2.0 * a - 2.0 * std::pow(8.0, -8.0 / 7.0), 1e-14);
}

TEST(Chi, BridgeMatchesC3AtBothEnds) {
  const auto chi = ChiProfile::build(8, 1.0);
  const double a = chi.bridge_start();
  const double d = 1e-12;
  for (double s : {a, 2.0}) {
    const auto lo = chi.chi_jet(s - d);
    const auto hi = chi.chi_jet(s + d);
    for (int j = 0; j <= 3; ++j) EXPECT_NEAR(lo[j], hi[j], 1e-5) << "s=" << s << " j=" << j;
  }
}

TEST(Chi, StrictlyDecreasingOnBridge) {
  for (int k : {4, 8, 14}) {
    const auto chi = ChiProfile::build(k, 0.3);
    const double a = chi.bridge_start();
    for (int i = 1; i < 10000; ++i) {
      const double s = a + (2.0 - a) * i / 10000.0;
      ASSERT_LT(chi.chi_jet(s)[1], 0.0) << "k=" << k << " s=" << s;
      ASSERT_GE(chi.chi_jet(s)[0], 0.0);
    }
  }
}

TEST(PhiFamily, InnerRegion) {
  const CutoffSpec spec{ChiProfile::build(8, 0.3), 5.0};
  for (double r : {0.0, 1.0, 2.5, 4.99}) {
    const auto j = spec.phi_jet(r);
    EXPECT_NEAR(j[1], 2.0 * r, 1e-13);
    EXPECT_NEAR(j[2], 2.0, 1e-13);
    EXPECT_EQ(Phi1(spec, r), 0.0);
    EXPECT_EQ(Phi2(spec, 3, 0.3, r), 0.0);
  }
  EXPECT_EQ(spec.radial_quotient(0.0), 2.0);
  EXPECT_DOUBLE_EQ(spec.phi_jet(2.5)[1], 5.0);
}

TEST(PhiFamily, OuterRegionConstants) {
  const CutoffSpec spec{ChiProfile::build(8, 1.0), 3.0};
  for (double r : {6.0, 7.0, 100.0}) {
    EXPECT_NEAR(Phi1(spec, r), 16.0, 1e-12);
    for (int N : {1, 2, 3, 5}) EXPECT_NEAR(Phi2(spec, N, 1.0, r), outer_phi2(N, 1.0), 1e-12);
  }
  EXPECT_NEAR(Phi2(spec, 5, 1.0, 10.0), 10.0, 1e-12);
}

TEST(PhiFamily, ScaleCovariance) {
  const auto chi = ChiProfile::build(8, 0.3);
  const CutoffSpec s1{chi, 2.0}, s2{chi, 4.0};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const double r = d(rng);
    EXPECT_NEAR(s2.phi_jet(2 * r)[0], 4.0 * s1.phi_jet(r)[0], 1e-12 * (1 + s1.phi_jet(r)[0]));
    EXPECT_NEAR(Phi1(s2, 2 * r), Phi1(s1, r), 1e-12);
    EXPECT_NEAR(Phi2(s2, 3, 0.3, 2 * r), Phi2(s1, 3, 0.3, r), 1e-12);
  }
}

TEST(PhiFamily, BoundsEverywhere) {
  // On the bridge 2 - chi' > 2, so Phi_2 overshoots its outer value; the
  // bound there is c_lap (2 + sup|chi'|) + 2 c_quot.
  const CutoffSpec spec{ChiProfile::build(8, 1.0), 1.0};
  double slope = 0.0;
  for (int i = 0; i <= 30000; ++i)
    slope = std::max(slope, std::abs(spec.profile.chi_jet(1.0 + i / 30000.0)[1]));
  for (int i = 0; i <= 30000; ++i) {
    const double r = 3.0 * i / 30000.0;
    const double p1 = Phi1(spec, r);
    EXPECT_GE(p1, -1e-14);
    EXPECT_LE(p1, 16.0 + 1e-12);
    for (int N : {1, 3, 5}) {
      const auto c = Phi2Coefficients::make(N, 1.0);
      const double p2 = Phi2(spec, N, 1.0, r);
      EXPECT_GE(p2, -1e-14);
      EXPECT_LE(p2, c.c_lap * (2.0 + slope) + 2.0 * c.c_quot + 1e-9);
      if (r <= 1.0 || r >= 2.0) EXPECT_LE(p2, outer_phi2(N, 1.0) + 1e-12);
    }
  }
}

TEST(PhiFamily, DerivativesMatchFiniteDifferences) {
  const CutoffSpec spec{ChiProfile::build(8, 0.3), 3.0};
  const double a = spec.profile.bridge_start() * spec.R;
  const std::vector<double> junctions{spec.R, a, 2.0 * spec.R};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(0.0, 8.0);
  const double h = 1e-4;
  int checked = 0;
  while (checked < 1000) {
    const double r = d(rng);
    bool near = r < 2 * h;
    for (double x : junctions) near = near || std::abs(r - x) < 4 * h;
    if (near) continue;
    const auto lo2 = spec.phi_jet(r - 2 * h), lo = spec.phi_jet(r - h);
    const auto hi2 = spec.phi_jet(r + 2 * h), hi = spec.phi_jet(r + h), mid = spec.phi_jet(r);
    for (int j = 0; j < 6; ++j) {
      const double fd = (8.0 * (hi[j] - lo[j]) - (hi2[j] - lo2[j])) / (12 * h);
      const double scale = 1.0 + std::abs(mid[j + 1]);
      EXPECT_NEAR(fd, mid[j + 1], 1e-6 * scale * std::max(1.0, std::pow(10.0, j - 2)))
          << "r=" << r << " j=" << j;
    }
    ++checked;
  }
}

TEST(PhiFamily, EvaluationIsConsistent) {
  const CutoffSpec spec{ChiProfile::build(8, 1.0), 2.0};
  const std::vector<double> radii{0.0, 1.0, 2.5, 3.3, 5.0};
  const auto ev = eval_phi_family(spec, 3, 1.0, radii);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto j = spec.phi_jet(radii[i]);
    for (int k = 0; k < 7; ++k) EXPECT_EQ(ev.derivatives[k][i], j[k]);
    EXPECT_EQ(ev.phi1[i], Phi1(spec, radii[i]));
    EXPECT_EQ(ev.phi2[i], Phi2(spec, 3, 1.0, radii[i]));
  }
}

TEST(CutoffAudit, PropertiesHold) {
  const auto chi = ChiProfile::build(8, 0.3);
  const std::vector<double> Rs{4, 8, 16, 32};
  const auto rep = verify_cutoff_properties(chi, Rs);
  EXPECT_TRUE(rep.pass()) << rep.to_text();
  // normalized third-derivative sups agree across R
  std::vector<double> s3;
  for (double R : Rs) {
    const CutoffSpec spec{chi, R};
    double m = 0.0;
    for (int i = 0; i <= 20000; ++i) m = std::max(m, std::abs(spec.phi_jet(R + R * i / 20000.0)[3]));
    s3.push_back(m * R);
  }
  for (double v : s3) EXPECT_NEAR(v / s3.front(), 1.0, 0.05);
  const CutoffSpec spec{chi, 8.0};
  EXPECT_EQ(spec.phi_jet(4.0)[5], 0.0);
  EXPECT_EQ(spec.phi_jet(24.0)[5], 0.0);
}

TEST(Phi2Scaling, PassesForDefaultK) {
  const auto chi = ChiProfile::build(8, 1.0, 1.0);
  const std::vector<double> Rs{16, 32};
  const auto rep = verify_Phi2_scaling(chi, 5, 1.0, 1.0, Rs);
  EXPECT_TRUE(rep.pass()) << rep.to_text();
  for (double b : {0.3, 1.0, 2.0}) {
    const auto c = ChiProfile::build(8, b);
    const std::vector<double> R4{10, 20, 40, 80};
    for (int N : {1, 3, 5}) EXPECT_TRUE(verify_Phi2_scaling(c, N, b, 2.0 / (4.0 - b), R4).pass());
  }
}

TEST(Phi2Scaling, ExponentTooSmall) {
  // alpha (k - 1) = 1.8 < 2
  const std::vector<double> Rs{10, 20};
  EXPECT_THROW(verify_Phi2_scaling(ChiProfile::build(4, 1.0, 0.6), 3, 1.0, 0.6, Rs), Error);
  const CutoffSpec spec{ChiProfile::build(8, 1.0), 1.0};
  try {
    phi2_power_jet(spec, 3, 1.0, 0.25, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::KTooSmall);
  }
}

TEST(Comparison, OuterRatioAndBridgeBound) {
  const double b = 1.0;
  const int N = 3;
  const auto chi = ChiProfile::build(8, b);
  const CutoffSpec spec{chi, 5.0};
  const double expect = std::pow(outer_phi2(N, b), 4.0 / (4.0 - b)) / 16.0;
  for (double r : {10.0, 15.0, 40.0})
    EXPECT_NEAR(std::pow(Phi2(spec, N, b, r), 4.0 / (4.0 - b)) / Phi1(spec, r), expect, 1e-12);
  const double k = 8.0;
  const double bound = 16.0 * std::pow(k, k / (1.0 - k)) / (1.0 + std::pow(k, 1.0 / (1.0 - k)));
  const double a = chi.bridge_start();
  for (int i = 0; i <= 1000; ++i) {
    const double s = a + (2.0 - a) * i / 1000.0;
    EXPECT_GE(Phi1(spec, s * spec.R), bound - 1e-12);
  }
  const std::vector<double> Rs{4, 8, 16, 32};
  const auto rep = phi_comparison_audit(chi, N, b, Rs);
  EXPECT_TRUE(rep.pass()) << rep.to_text();
}

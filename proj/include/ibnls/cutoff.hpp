#pragma once

#include <array>
#include <span>
#include <vector>

#include "ibnls/report.hpp"

namespace ibnls {

/// The unit-scale profile chi on [0, inf):
///   2s                     on [0, 1]
///   2s - 2(s-1)^k          on (1, a],  a = 1 + k^(1/(1-k))
///   degree-7 bridge P(s-a) on (a, 2)   (C^3 match at both ends, chi' < 0)
///   0                      on [2, inf)
/// together with phi(s) = int_0^s chi.
class ChiProfile {
 public:
  enum class Region { Inner, Power, Bridge, Outer };

  /// Builds the profile for exponent k with alpha = 2/(4-b).
  /// Throws KTooSmall unless k >= 4 and k > 2 + 1/alpha, and
  /// BridgeMonotonicityFailed if chi' >= 0 anywhere on a 10^4-point bridge
  /// sample (or chi < 0 there).
  static ChiProfile build(int k, double b);
  static ChiProfile build(int k, double b, double alpha);

  int k() const { return k_; }
  double alpha() const { return alpha_; }
  /// a = 1 + k^(1/(1-k)); chi'(a) = 0.
  double bridge_start() const { return a_; }
  /// Coefficients c_0..c_7 of the bridge in powers of (s - a).
  const std::array<double, 8>& bridge_coefficients() const { return bridge_; }

  Region region(double s) const;

  /// chi^(j)(s) for j = 0..5.
  std::array<double, 6> chi_jet(double s) const;
  /// phi^(j)(s) for j = 0..6 (phi' = chi).
  std::array<double, 7> phi_jet(double s) const;

  /// D1 = 2 - chi(s)/s and D2 = 2 - chi'(s) with their first two
  /// s-derivatives, free of cancellation near s = 1. D1 uses the analytic
  /// limit chi(s)/s -> 2 at s = 0.
  struct Defects {
    std::array<double, 3> d1{};
    std::array<double, 3> d2{};
  };
  Defects defects(double s) const;

 private:
  ChiProfile() = default;

  int k_ = 8;
  double alpha_ = 0.5;
  double a_ = 0.0;
  std::array<double, 8> bridge_{};
  std::array<double, 4> q_{};
  double H_ = 0.0;
  double phi_at_a_ = 0.0;
  double phi_at_2_ = 0.0;
};

/// A profile dilated to radius R: phi_R(r) = R^2 phi(r/R).
struct CutoffSpec {
  ChiProfile profile;
  double R = 1.0;

  /// d^j phi_R / dr^j at r, j = 0..6.
  std::array<double, 7> phi_jet(double r) const;
  /// d_r phi_R / r, equal to 2 at r = 0.
  double radial_quotient(double r) const;
};

/// Coefficients of Phi_2 = c_lap (2 - phi_R'') + c_quot (2 - phi_R'/r).
struct Phi2Coefficients {
  double c_lap;
  double c_quot;
  static Phi2Coefficients make(int dimension, double b);
};

double Phi1(const CutoffSpec& spec, double r);
double Phi2(const CutoffSpec& spec, int dimension, double b, double r);

/// (Phi_2)^alpha and its first two r-derivatives at r.
/// Throws KTooSmall if alpha (k - 1) < 2 (the second derivative would blow
/// up at r = R+).
std::array<double, 3> phi2_power_jet(const CutoffSpec& spec, int dimension, double b,
                                     double alpha, double r);

struct CutoffEvaluation {
  std::vector<double> radii;
  /// derivatives[j][i] = d^j phi_R / dr^j at radii[i], j = 0..6.
  std::array<std::vector<double>, 7> derivatives;
  std::vector<double> phi1;
  std::vector<double> phi2;
};

CutoffEvaluation eval_phi_family(const CutoffSpec& spec, int dimension, double b,
                                 std::span<const double> radii);

/// Sign/support/scaling properties of phi_R for each R in R_list, sampled at
/// `samples_per_R` radii uniformly spread over [0, 3R].
AuditReport verify_cutoff_properties(const ChiProfile& profile, std::span<const double> R_list,
                                     int samples_per_R = 30000);

/// R sup|d_r Phi_2^alpha| and R^2 sup|Lap Phi_2^alpha| across R_list; PASS
/// iff each sequence stays within 50% of its median.
AuditReport verify_Phi2_scaling(const ChiProfile& profile, int dimension, double b,
                                double alpha, std::span<const double> R_list,
                                int samples_per_R = 20000);

/// rho(R) = sup_{r > R, Phi_1 > 0} Phi_2^(4/(4-b)) / Phi_1 over (R, 4R], the
/// vanishing-order margin at R+, and the bridge bounds on Phi_1 and Phi_2.
AuditReport phi_comparison_audit(const ChiProfile& profile, int dimension, double b,
                                 std::span<const double> R_list, int samples_per_R = 30000);

}  // namespace ibnls

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ibnls/cutoff.hpp"
#include "ibnls/dynamics.hpp"
#include "ibnls/report.hpp"

namespace ibnls {

/// Cartesian data of a radial weight phi_R on a grid. A radial f has
/// Hessian  d_jk f = a_f delta_jk + c_f x_j x_k  with a_f = f'/r and
/// c_f = (f'' - f'/r) / r^2.
///
/// Z and the quadratic terms are evaluated on `quad`, a refinement of the
/// solution grid by `oversample` per axis that holds the quadratic densities
/// of the interpolated u exactly (oversample >= 4 recommended). There all
/// derivatives are moved onto the densities, so only phi_R itself is
/// sampled. The nonlinear terms use the solution grid.
struct CartesianCutoff {
  GridPtr grid;
  GridPtr quad;
  int oversample = 1;
  double R = 0.0;
  // on quad
  std::vector<cplx> phi_hat;         ///< forward transform of phi_R
  std::vector<double> a_phi, c_phi;  ///< Hessian coefficients of phi_R
  // on grid
  std::vector<double> lap;              ///< Lap phi_R
  std::vector<double> phi2;             ///< Phi_2
  std::vector<double> grad_dot_weight;  ///< grad phi_R . grad w

  static CartesianCutoff build(GridPtr grid, const CutoffSpec& spec, const ModelParams& params,
                               int oversample = 4);
};

/// Readings of the identity that calibration chooses between.
struct VirialVariant {
  /// Z = factor * Im int grad phi . grad u conj(u).
  double factor = 2.0;
  /// Sign in front of nu int Lap^2 phi |u|^2 (printed: -1).
  double nu_term_sign = -1.0;
  /// Use the printed last-term exponent (8-2N)/N + 2 instead of (8-2b)/N + 2.
  bool printed_last_exponent = false;

  std::string label() const;
};

/// All 8 candidates in a fixed order.
std::vector<VirialVariant> virial_candidates();

inline constexpr std::array<const char*, 8> kVirialTermNames = {
    "hess_lap_phi", "lap3_phi", "hess_hess", "lap2_phi_grad", "nu_lap2_phi",
    "nu_hess",      "nl_lap",   "nl_weight_grad"};

struct VirialReport {
  double t = 0.0;
  double Z = 0.0;
  std::array<double, 8> terms{};
  double sum = 0.0;
  double R1nu = 0.0;
  double R2 = 0.0;
  std::optional<double> fd;
  double residual = 0.0;
};

double virial_Z(const ComplexField& u, const CartesianCutoff& cut, double factor = 2.0);

/// Right-hand side of the localized identity at u. Each quadratic term is
/// integrated by parts onto phi_R (e.g. int Lap^3 phi |u|^2 as
/// int phi Lap^3 |u|^2), which also carries the junction contributions of the
/// C^4 weight.
VirialReport virial_rhs(const ComplexField& u, const CartesianCutoff& cut,
                        const ModelParams& params, const VirialVariant& variant = {});

/// Centered difference of Z over (u_minus, u_plus) spaced 2 delta apart,
/// compared to virial_rhs at u_mid.
VirialReport virial_residual(const ComplexField& u_minus, const ComplexField& u_mid,
                             const ComplexField& u_plus, double delta,
                             const CartesianCutoff& cut, const ModelParams& params,
                             const VirialVariant& variant = {});

/// Steps +/- delta from u with the Strang integrator and evaluates the
/// residual at u.
VirialReport virial_residual_at(const ComplexField& u, double t, double delta,
                                const CartesianCutoff& cut, const ModelParams& params,
                                const VirialVariant& variant = {});

struct CalibrationResult {
  VirialVariant best;
  std::vector<std::pair<VirialVariant, double>> scores;  ///< worst residual per candidate
};

/// Picks the candidate with the smallest worst-case residual over `states`.
CalibrationResult calibrate_virial(const std::vector<std::pair<double, ComplexField>>& states,
                                   double delta, const CartesianCutoff& cut,
                                   const ModelParams& params);

struct MorawetzSample {
  double t = 0.0;
  double Z = 0.0;
  double dZdt = 0.0;
  double grad_sq = 0.0;
  double R1nu = 0.0;
  double R2 = 0.0;
  double decay_test = 0.0;  ///< dZ/dt - 16 E0 + 8 nu ||grad u||^2
};

/// Per-sample remainders plus the eventual-sign checks:
///  R1nu <= 1e-10 everywhere;
///  E0 < 0: Z negative and decreasing from some sample on;
///  nu = 0: dZ/dt <= 8 E0 + tol at every sample.
AuditReport morawetz_decay_report(const std::vector<MorawetzSample>& samples, double E0,
                                  double nu, double tol = 1e-6);

}  // namespace ibnls

#pragma once

#include <vector>

#include "ibnls/spectral_grid.hpp"

namespace ibnls {

/// Parameters of the weighted mass-critical biharmonic model
///   i u_t - Lap^2 u + nu Lap u = -w(x) |u|^q u,   q = (8 - 2b) / N,
/// with w(x) = (|x|^2 + eps^2)^(-b/2) standing in for |x|^-b.
struct ModelParams {
  int dimension = 1;
  double b = 0.3;
  double nu = 0.0;
  double epsilon = 0.0;
  /// Diagnostic only: false flips the sign of the nonlinearity.
  bool focusing = true;
  /// Scales the nonlinearity and the potential energy; 0 gives the free flow.
  double coupling = 1.0;

  double exponent() const { return (8.0 - 2.0 * b) / dimension; }
  /// Throws Error(ConfigInvalid) unless 0 < b < min(N/2, 4), nu >= 0, eps > 0.
  void validate() const;
};

/// Riemann sum of |u|^2 with weight h^N.
double l2_norm_sq(const ComplexField& u);
double sup_norm(const ComplexField& u);
/// ||grad u||^2 and ||Lap u||^2 through the discrete Parseval identity.
double grad_norm_sq(const ComplexField& u);
double lap_norm_sq(const ComplexField& u);

/// Physical-space partial derivatives d_j u, one field per axis.
std::vector<ComplexField> gradient(const ComplexField& u);

struct ExteriorNorms {
  double mass = 0.0;     ///< int_{|x|>R} |u|^2
  double grad_sq = 0.0;  ///< int_{|x|>R} |grad u|^2
  double lap_sq = 0.0;   ///< int_{|x|>R} |Lap u|^2
};

/// Squared norms over {|x| > R}; derivatives are taken globally and then
/// masked. R <= 0 selects the whole box. Throws Error(RegionEmpty) when no
/// lattice point lies outside the ball.
ExteriorNorms restricted_norms(const ComplexField& u, double R);

/// w(x) = (|x|^2 + eps^2)^(-b/2) on every lattice point.
std::vector<double> singular_weight(const Grid& grid, const ModelParams& params);

/// int w |u|^p dx with p = 2 + q unless given explicitly.
double potential_integral(const ComplexField& u, const ModelParams& params);
double potential_integral(const ComplexField& u, const ModelParams& params, double power);
/// Same integral with a caller-supplied weight array (avoids recomputing w).
double weighted_power_integral(const ComplexField& u, std::span<const double> weight,
                               double power);

}  // namespace ibnls

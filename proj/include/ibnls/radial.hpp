#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ibnls/spectral_grid.hpp"

namespace ibnls {

/// Half-offset radial grid r_j = (j + 1/2) dr, j = 0..count-1, for radially
/// symmetric functions on R^N.
struct RadialGrid {
  int dimension = 4;
  int count = 2000;
  double dr = 0.01;

  /// Throws ConfigInvalid unless dimension >= 1, count >= 4 and r_max > 0.
  static RadialGrid make(int dimension, double r_max, int count);

  double radius(int j) const { return (j + 0.5) * dr; }
  double r_max() const { return count * dr; }
  /// |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2).
  double sphere_area() const;
  /// Quadrature weight |S^{N-1}| r_j^{N-1} dr.
  double weight(int j) const;
};

/// Complex radial profile sampled on a RadialGrid. Derivatives use centered
/// differences with the even reflection u(-r) = u(r) at the origin and zero
/// beyond r_max.
struct RadialField {
  RadialGrid grid;
  std::vector<cplx> values;

  static RadialField sample(const RadialGrid& grid, const std::function<cplx(double)>& f);

  RadialField scaled(cplx s) const;
  /// Pointwise product with a real profile on the same grid.
  RadialField multiplied(std::span<const double> g) const;

  std::vector<cplx> derivative() const;
  /// u'' + (N-1)/r u'.
  std::vector<cplx> laplacian() const;
};

/// Samples a real profile at the grid radii.
std::vector<double> sample_radial(const RadialGrid& grid, const std::function<double(double)>& f);

double radial_l2_sq(const RadialField& u);
double radial_grad_sq(const RadialField& u);
double radial_lap_sq(const RadialField& u);
/// ||u||^2 + 2 ||grad u||^2 + ||Lap u||^2, i.e. || (1 + |xi|^2) u_hat ||^2.
double radial_h2_sq(const RadialField& u);
/// int psi |u|^p over R^N.
double radial_power_integral(const RadialField& u, std::span<const double> psi, double p);

}  // namespace ibnls

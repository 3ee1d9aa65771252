#include "ibnls/radial.hpp"

#include <cmath>
#include <numbers>

#include "ibnls/error.hpp"

namespace ibnls {

RadialGrid RadialGrid::make(int dimension, double r_max, int count) {
  if (dimension < 1 || count < 4 || !(r_max > 0.0))
    throw Error(ErrorKind::ConfigInvalid, "radial grid needs N >= 1, count >= 4, r_max > 0");
  return {dimension, count, r_max / count};
}

double RadialGrid::sphere_area() const {
  const double n = dimension;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double RadialGrid::weight(int j) const {
  return sphere_area() * std::pow(radius(j), dimension - 1) * dr;
}

RadialField RadialField::sample(const RadialGrid& grid, const std::function<cplx(double)>& f) {
  RadialField u{grid, std::vector<cplx>(grid.count)};
  for (int j = 0; j < grid.count; ++j) u.values[j] = f(grid.radius(j));
  return u;
}

RadialField RadialField::scaled(cplx s) const {
  RadialField out = *this;
  for (auto& v : out.values) v *= s;
  return out;
}

RadialField RadialField::multiplied(std::span<const double> g) const {
  if (g.size() != values.size())
    throw Error(ErrorKind::ConfigInvalid, "radial profile size mismatch");
  RadialField out = *this;
  for (std::size_t j = 0; j < g.size(); ++j) out.values[j] *= g[j];
  return out;
}

namespace {

cplx at(const std::vector<cplx>& v, int j) {
  if (j < 0) return v[-j - 1];
  if (j >= static_cast<int>(v.size())) return 0.0;
  return v[j];
}

}  // namespace

std::vector<cplx> RadialField::derivative() const {
  const int n = grid.count;
  std::vector<cplx> d(n);
  for (int j = 0; j < n; ++j) d[j] = (at(values, j + 1) - at(values, j - 1)) / (2.0 * grid.dr);
  return d;
}

std::vector<cplx> RadialField::laplacian() const {
  const int n = grid.count;
  const double h2 = grid.dr * grid.dr;
  const auto d = derivative();
  std::vector<cplx> lap(n);
  for (int j = 0; j < n; ++j) {
    const cplx dd = (at(values, j + 1) - 2.0 * values[j] + at(values, j - 1)) / h2;
    lap[j] = dd + (grid.dimension - 1) / grid.radius(j) * d[j];
  }
  return lap;
}

std::vector<double> sample_radial(const RadialGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> out(grid.count);
  for (int j = 0; j < grid.count; ++j) out[j] = f(grid.radius(j));
  return out;
}

namespace {

double weighted_sq(const RadialGrid& g, const std::vector<cplx>& v) {
  double s = 0.0;
  for (int j = 0; j < g.count; ++j) s += std::norm(v[j]) * g.weight(j);
  return s;
}

}  // namespace

double radial_l2_sq(const RadialField& u) { return weighted_sq(u.grid, u.values); }
double radial_grad_sq(const RadialField& u) { return weighted_sq(u.grid, u.derivative()); }
double radial_lap_sq(const RadialField& u) { return weighted_sq(u.grid, u.laplacian()); }

double radial_h2_sq(const RadialField& u) {
  return radial_l2_sq(u) + 2.0 * radial_grad_sq(u) + radial_lap_sq(u);
}

double radial_power_integral(const RadialField& u, std::span<const double> psi, double p) {
  if (psi.size() != u.values.size())
    throw Error(ErrorKind::ConfigInvalid, "radial profile size mismatch");
  double s = 0.0;
  for (int j = 0; j < u.grid.count; ++j) {
    const double a = std::abs(u.values[j]);
    if (a > 0.0 && psi[j] != 0.0) s += psi[j] * std::pow(a, p) * u.grid.weight(j);
  }
  return s;
}

}  // namespace ibnls

#include "ibnls/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ibnls/error.hpp"

namespace ibnls {

void ModelParams::validate() const {
  std::ostringstream why;
  if (dimension < 1) why << "dimension must be >= 1; ";
  const double bmax = std::min(dimension / 2.0, 4.0);
  if (!(b > 0.0 && b < bmax)) why << "b must satisfy 0 < b < min(N/2, 4) = " << bmax << "; ";
  if (!(nu >= 0.0)) why << "nu must be >= 0; ";
  if (!(epsilon > 0.0)) why << "epsilon must be > 0; ";
  if (!why.str().empty()) throw Error(ErrorKind::ConfigInvalid, why.str());
}

namespace {

void require_physical(const ComplexField& u) {
  if (u.space() != Space::Physical)
    throw Error(ErrorKind::ConfigInvalid, "expected a physical-space field");
}

// sum_xi weight(xi) |u_hat|^2 scaled to the continuous L2 convention.
template <typename Weight>
double spectral_quadratic(const ComplexField& u, Weight&& weight) {
  const ComplexField uh = forward_transform(u);
  const Grid& g = u.grid();
  double acc = 0.0;
  const auto vals = uh.values();
  for (std::size_t i = 0; i < vals.size(); ++i) acc += weight(i) * std::norm(vals[i]);
  return acc * g.cell_volume() / static_cast<double>(g.size());
}

}  // namespace

double l2_norm_sq(const ComplexField& u) {
  require_physical(u);
  double acc = 0.0;
  for (const auto& v : u.values()) acc += std::norm(v);
  return acc * u.grid().cell_volume();
}

double sup_norm(const ComplexField& u) {
  require_physical(u);
  double m = 0.0;
  for (const auto& v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double grad_norm_sq(const ComplexField& u) {
  require_physical(u);
  const Grid& g = u.grid();
  const auto xi = g.axis_frequencies();
  const int nyq = g.nyquist_index();
  return spectral_quadratic(u, [&](std::size_t i) {
    const auto idx = g.unravel(i);
    double w = 0.0;
    for (int d = 0; d < g.dimension(); ++d)
      if (idx[d] != nyq) w += xi[idx[d]] * xi[idx[d]];
    return w;
  });
}

double lap_norm_sq(const ComplexField& u) {
  require_physical(u);
  const auto xi4 = u.grid().xi_quad();
  return spectral_quadratic(u, [&](std::size_t i) { return xi4[i]; });
}

std::vector<ComplexField> gradient(const ComplexField& u) {
  std::vector<ComplexField> out;
  const ComplexField uh = forward_transform(u);
  for (int d = 0; d < u.grid().dimension(); ++d) {
    MultiIndex order{0, 0, 0};
    order[d] = 1;
    out.push_back(inverse_transform(apply_derivative(uh, order)));
  }
  return out;
}

ExteriorNorms restricted_norms(const ComplexField& u, double R) {
  require_physical(u);
  const Grid& g = u.grid();
  const auto r = g.radius();
  std::vector<char> mask(g.size());
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    mask[i] = (R <= 0.0 || r[i] > R) ? 1 : 0;
    count += mask[i];
  }
  if (count == 0) throw Error(ErrorKind::RegionEmpty, "no lattice point with |x| > R");

  const auto grad = gradient(u);
  MultiIndex lap_order{0, 0, 0};
  ComplexField lap(u.grid_ptr(), Space::Physical);
  {
    const ComplexField uh = forward_transform(u);
    ComplexField acc(u.grid_ptr(), Space::Spectral);
    for (int d = 0; d < g.dimension(); ++d) {
      lap_order = {0, 0, 0};
      lap_order[d] = 2;
      acc += apply_derivative(uh, lap_order);
    }
    lap = inverse_transform(acc);
  }

  ExteriorNorms out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mask[i]) continue;
    out.mass += std::norm(u[i]);
    for (const auto& gd : grad) out.grad_sq += std::norm(gd[i]);
    out.lap_sq += std::norm(lap[i]);
  }
  const double h = g.cell_volume();
  out.mass *= h;
  out.grad_sq *= h;
  out.lap_sq *= h;
  return out;
}

std::vector<double> singular_weight(const Grid& grid, const ModelParams& params) {
  const auto r = grid.radius();
  const double eps2 = params.epsilon * params.epsilon;
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = std::pow(r[i] * r[i] + eps2, -0.5 * params.b);
  return w;
}

double weighted_power_integral(const ComplexField& u, std::span<const double> weight,
                               double power) {
  require_physical(u);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    if (a == 0.0) continue;
    acc += weight[i] * std::pow(a, power);
  }
  return acc * u.grid().cell_volume();
}

double potential_integral(const ComplexField& u, const ModelParams& params, double power) {
  const auto w = singular_weight(u.grid(), params);
  return weighted_power_integral(u, w, power);
}

double potential_integral(const ComplexField& u, const ModelParams& params) {
  return potential_integral(u, params, 2.0 + params.exponent());
}

}  // namespace ibnls

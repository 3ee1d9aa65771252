#include "ibnls/spectral_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "ibnls/error.hpp"

namespace ibnls {

namespace {

// Plan creation in FFTW is not thread-safe; execution with the new-array
// interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

}  // namespace

struct Grid::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

GridPtr Grid::build(const GridSpec& spec) {
  std::ostringstream why;
  if (spec.dimension < 1 || spec.dimension > 3) why << "dimension must be 1, 2 or 3; ";
  if (!is_power_of_two(spec.points) || spec.points < 8)
    why << "points must be a power of two >= 8; ";
  if (!(spec.half_width > 0.0) || !std::isfinite(spec.half_width))
    why << "half_width must be positive; ";
  if (!why.str().empty()) throw Error(ErrorKind::ConfigInvalid, why.str());
  return GridPtr(new Grid(spec));
}

Grid::Grid(const GridSpec& spec) : spec_(spec), plans_(std::make_unique<Plans>()) {
  const int n = spec.dimension;
  const int m = spec.points;
  const double L = spec.half_width;
  spacing_ = 2.0 * L / m;
  cell_volume_ = std::pow(spacing_, n);
  size_ = 1;
  for (int d = 0; d < n; ++d) size_ *= static_cast<std::size_t>(m);

  axis_x_.resize(m);
  axis_xi_.resize(m);
  const double dk = std::numbers::pi / L;
  for (int i = 0; i < m; ++i) {
    axis_x_[i] = -L + i * spacing_;
    const int mode = i <= m / 2 ? i : i - m;
    axis_xi_[i] = dk * mode;
  }
  xi_max_ = std::sqrt(static_cast<double>(n)) * axis_xi_[m / 2];

  radius_.resize(size_);
  xi_sq_.resize(size_);
  xi_quad_.resize(size_);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    const auto idx = unravel(flat);
    double r2 = 0.0, k2 = 0.0;
    for (int d = 0; d < n; ++d) {
      r2 += axis_x_[idx[d]] * axis_x_[idx[d]];
      k2 += axis_xi_[idx[d]] * axis_xi_[idx[d]];
    }
    radius_[flat] = std::sqrt(r2);
    xi_sq_[flat] = k2;
    xi_quad_[flat] = k2 * k2;
  }

  std::array<int, 3> dims{m, m, m};
  std::vector<cplx> scratch(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_dft(n, dims.data(), buf, buf, FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_dft(n, dims.data(), buf, buf, FFTW_BACKWARD, flags);
}

Grid::~Grid() {
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

std::array<int, 3> Grid::unravel(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  const auto m = static_cast<std::size_t>(spec_.points);
  for (int d = spec_.dimension - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % m);
    flat /= m;
  }
  return idx;
}

void Grid::forward(std::span<cplx> data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, p, p);
}

void Grid::inverse(std::span<cplx> data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->backward, p, p);
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& v : data) v *= scale;
}

ComplexField::ComplexField(GridPtr grid, Space space)
    : grid_(std::move(grid)), values_(grid_->size()), space_(space) {}

ComplexField::ComplexField(GridPtr grid, std::vector<cplx> values, Space space)
    : grid_(std::move(grid)), values_(std::move(values)), space_(space) {
  if (values_.size() != grid_->size())
    throw Error(ErrorKind::ConfigInvalid, "field value count does not match grid size");
}

bool ComplexField::all_finite() const {
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void ComplexField::to_spectral() {
  if (space_ == Space::Spectral) return;
  grid_->forward(values_);
  space_ = Space::Spectral;
}

void ComplexField::to_physical() {
  if (space_ == Space::Physical) return;
  grid_->inverse(values_);
  space_ = Space::Physical;
}

ComplexField& ComplexField::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ComplexField& ComplexField::operator+=(const ComplexField& other) {
  if (other.size() != size() || other.space() != space_)
    throw Error(ErrorKind::ConfigInvalid, "field addition across grids or spaces");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ComplexField forward_transform(const ComplexField& f) {
  ComplexField out = f;
  out.to_spectral();
  return out;
}

ComplexField inverse_transform(const ComplexField& f) {
  ComplexField out = f;
  out.to_physical();
  return out;
}

ComplexField apply_derivative(const ComplexField& f, const MultiIndex& order) {
  const Grid& g = f.grid();
  int total = 0;
  for (int d = 0; d < 3; ++d) {
    if (order[d] < 0) throw Error(ErrorKind::OrderUnsupported, "negative derivative order");
    if (d >= g.dimension() && order[d] != 0)
      throw Error(ErrorKind::OrderUnsupported, "derivative along an axis the grid lacks");
    total += order[d];
  }
  if (total > 4) throw Error(ErrorKind::OrderUnsupported, "total derivative order above 4");

  const Space in_space = f.space();
  ComplexField out = f;
  out.to_spectral();
  if (total > 0) {
    const auto xi = g.axis_frequencies();
    const int nyq = g.nyquist_index();
    auto vals = out.values();
    for (std::size_t flat = 0; flat < vals.size(); ++flat) {
      const auto idx = g.unravel(flat);
      cplx mult{1.0, 0.0};
      for (int d = 0; d < g.dimension(); ++d) {
        if (order[d] == 0) continue;
        if (idx[d] == nyq && (order[d] % 2) == 1) {
          mult = 0.0;
          break;
        }
        const cplx ik{0.0, xi[idx[d]]};
        for (int p = 0; p < order[d]; ++p) mult *= ik;
      }
      vals[flat] *= mult;
    }
  }
  if (in_space == Space::Physical) out.to_physical();
  return out;
}

ComplexField resample(const ComplexField& f, GridPtr fine) {
  const Grid& c = f.grid();
  const int N = c.dimension();
  const int M = c.points();
  const int Mf = fine->points();
  if (fine->dimension() != N || fine->half_width() != c.half_width() || Mf % M != 0)
    throw Error(ErrorKind::ConfigInvalid, "resample needs a refinement of the same box");
  const ComplexField fh = f.space() == Space::Spectral ? f : forward_transform(f);
  ComplexField out(fine, Space::Spectral);
  const double scale = std::pow(static_cast<double>(Mf) / M, N);
  const int nyq = M / 2;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const auto idx = c.unravel(i);
    // Each axis maps to one or two fine indices (two for the Nyquist mode).
    std::array<std::array<int, 2>, 3> targets{};
    std::array<int, 3> count{1, 1, 1};
    double weight = scale;
    for (int d = 0; d < N; ++d) {
      const int m = idx[d];
      if (m == nyq) {
        targets[d] = {nyq, Mf - nyq};
        count[d] = 2;
        weight *= 0.5;
      } else {
        targets[d][0] = m < nyq ? m : Mf - (M - m);
      }
    }
    for (int a = 0; a < count[0]; ++a)
      for (int b = 0; b < (N > 1 ? count[1] : 1); ++b)
        for (int e = 0; e < (N > 2 ? count[2] : 1); ++e) {
          std::size_t flat = targets[0][a];
          if (N > 1) flat = flat * Mf + targets[1][b];
          if (N > 2) flat = flat * Mf + targets[2][e];
          out[flat] += weight * fh[i];
        }
  }
  out.to_physical();
  return out;
}

bool is_dealiased_mode(const Grid& grid, std::size_t flat) {
  const double cut = (2.0 / 3.0) * grid.nyquist();
  const auto idx = grid.unravel(flat);
  const auto xi = grid.axis_frequencies();
  for (int d = 0; d < grid.dimension(); ++d)
    if (std::abs(xi[idx[d]]) > cut) return true;
  return false;
}

double dealias_in_place(ComplexField& spectral) {
  if (spectral.space() != Space::Spectral)
    throw Error(ErrorKind::ConfigInvalid, "dealias expects a spectral field");
  const Grid& g = spectral.grid();
  double total = 0.0, removed = 0.0;
  auto vals = spectral.values();
  for (std::size_t flat = 0; flat < vals.size(); ++flat) {
    const double p = std::norm(vals[flat]);
    total += p;
    if (is_dealiased_mode(g, flat)) {
      removed += p;
      vals[flat] = 0.0;
    }
  }
  return total > 0.0 ? removed / total : 0.0;
}

DealiasResult dealias(const ComplexField& spectral) {
  ComplexField out = spectral;
  const double frac = dealias_in_place(out);
  return {std::move(out), frac};
}

}  // namespace ibnls

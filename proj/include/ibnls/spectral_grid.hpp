#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ibnls {

using cplx = std::complex<double>;

/// Periodic box [-L, L)^N sampled with M points per axis.
struct GridSpec {
  int dimension = 1;
  int points = 64;
  double half_width = 10.0;

  double spacing() const { return 2.0 * half_width / points; }
};

enum class Space { Physical, Spectral };

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Multi-index of a partial derivative; unused trailing axes stay zero.
using MultiIndex = std::array<int, 3>;

/// Immutable tensor-product grid with its frequency lattice and FFT plans.
///
/// Storage is row-major (axis N-1 fastest). The forward transform is
/// unnormalized and the inverse carries 1/M^N, so the discrete Parseval
/// identity reads  sum |u|^2 = M^-N sum |u_hat|^2.
class Grid {
 public:
  /// Validates the GridSpec and precomputes coordinates, radii and symbols.
  /// Throws Error(ConfigInvalid) on a bad GridSpec.
  static GridPtr build(const GridSpec& spec);

  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  const GridSpec& spec() const { return spec_; }
  int dimension() const { return spec_.dimension; }
  int points() const { return spec_.points; }
  double half_width() const { return spec_.half_width; }
  double spacing() const { return spacing_; }
  /// h^N, the quadrature weight of one lattice cell.
  double cell_volume() const { return cell_volume_; }
  std::size_t size() const { return size_; }

  std::span<const double> axis_coordinates() const { return axis_x_; }
  /// Per-axis angular frequencies, integer multiples of pi/L; the Nyquist
  /// entry is stored as +pi M / (2L).
  std::span<const double> axis_frequencies() const { return axis_xi_; }
  std::span<const double> radius() const { return radius_; }
  std::span<const double> xi_sq() const { return xi_sq_; }
  std::span<const double> xi_quad() const { return xi_quad_; }

  /// pi M / (2L), the largest per-axis frequency.
  double nyquist() const { return axis_xi_[spec_.points / 2]; }
  /// Largest |xi| over the whole lattice (sqrt(N) * nyquist).
  double xi_max() const { return xi_max_; }

  std::array<int, 3> unravel(std::size_t flat) const;
  double coordinate(std::size_t flat, int axis) const {
    return axis_x_[unravel(flat)[axis]];
  }
  /// Lattice index of the Nyquist frequency along each axis.
  int nyquist_index() const { return spec_.points / 2; }

  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

 private:
  explicit Grid(const GridSpec& spec);

  GridSpec spec_;
  double spacing_ = 0.0;
  double cell_volume_ = 0.0;
  double xi_max_ = 0.0;
  std::size_t size_ = 0;
  std::vector<double> axis_x_;
  std::vector<double> axis_xi_;
  std::vector<double> radius_;
  std::vector<double> xi_sq_;
  std::vector<double> xi_quad_;

  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// Complex samples on a grid, tagged with the space they live in.
class ComplexField {
 public:
  explicit ComplexField(GridPtr grid, Space space = Space::Physical);
  ComplexField(GridPtr grid, std::vector<cplx> values, Space space = Space::Physical);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  Space space() const { return space_; }
  std::size_t size() const { return values_.size(); }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const;

  /// In-place transforms; no-ops when already in the requested space.
  void to_spectral();
  void to_physical();

  ComplexField& operator*=(cplx s);
  ComplexField& operator+=(const ComplexField& other);

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
  Space space_;
};

ComplexField forward_transform(const ComplexField& f);
ComplexField inverse_transform(const ComplexField& f);

/// Multiplies each mode by prod_j (i xi_j)^{order_j}. The Nyquist mode of an
/// axis differentiated an odd number of times gets zero weight. The result
/// is returned in the same space as the input. Total order above 4 throws
/// Error(OrderUnsupported).
ComplexField apply_derivative(const ComplexField& f, const MultiIndex& order);

/// Trigonometric interpolation onto a finer grid with the same N and L
/// (fine points a multiple of the coarse ones). The coarse Nyquist mode is
/// split evenly between +/- Nyquist. Returns a physical field.
ComplexField resample(const ComplexField& f, GridPtr fine);

/// True when any |xi_j| exceeds 2/3 of the Nyquist frequency.
bool is_dealiased_mode(const Grid& grid, std::size_t flat);

struct DealiasResult {
  ComplexField field;
  double removed_fraction;  ///< share of sum |u_hat|^2 that was zeroed
};

/// 2/3-rule truncation of a spectral field.
DealiasResult dealias(const ComplexField& spectral);
/// In-place variant; returns the removed L2 fraction.
double dealias_in_place(ComplexField& spectral);

}  // namespace ibnls

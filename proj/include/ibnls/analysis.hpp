#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "ibnls/dynamics.hpp"
#include "ibnls/radial.hpp"
#include "ibnls/report.hpp"

namespace ibnls {

/// Which inequality a probe evaluates.
///   GN          ||grad u|| <= C ||Lap u||^1/2 ||u||^1/2 on R^N
///   GNExterior  the same with all norms over {|x| > R}
///   N1..N5      the weighted interpolation bounds for N = 1..5 (N5 covers N >= 5)
enum class ProbeCase { GN, GNExterior, N1, N2, N3, N4, N5 };
std::string_view to_string(ProbeCase c);

/// Constant-free comparison of the two sides of an inequality.
struct InequalityProbe {
  ProbeCase id = ProbeCase::GN;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  ///< lhs / rhs, 0 when lhs = 0
};

/// ||grad u|| / (||Lap u||^1/2 ||u||^1/2). Throws ZeroField for u = 0.
double gn_ratio(const ComplexField& u);
/// Same ratio over {|x| > R}; R <= 0 is the whole box. Throws RegionEmpty or
/// ZeroField.
double gn_exterior_ratio(const ComplexField& u, double R);
InequalityProbe gn_probe(const ComplexField& u, double R = 0.0);

/// N1..N3 on a full grid of matching dimension; psi is sampled on the grid.
/// Throws CaseDimensionMismatch otherwise.
InequalityProbe interpolation_probe(const ComplexField& u, std::span<const double> psi,
                                    const ModelParams& params, ProbeCase c);
/// N4 (dimension 4) and N5 (dimension >= 5) on radial profiles.
InequalityProbe interpolation_probe(const RadialField& u, std::span<const double> psi,
                                    const ModelParams& params, ProbeCase c);

/// Field corpora used by the inequality audits. All are deterministic in the seed.
/// Random trigonometric polynomials with |k| <= kmax lattice units.
std::vector<ComplexField> band_limited_corpus(GridPtr grid, int count, int kmax,
                                              std::uint64_t seed);
/// Sums of 1 to 3 modulated Gaussians with centers at radius in [1.5, 3].
std::vector<ComplexField> gaussian_corpus(GridPtr grid, int count, std::uint64_t seed);
/// One or two Gaussian rings centred at r in [3.5, 5].
std::vector<RadialField> radial_corpus(const RadialGrid& grid, int count, std::uint64_t seed);

struct RatioSummary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};
RatioSummary summarize(std::vector<double> ratios);

/// gn_ratio <= sqrt(2) + 1e-6 over a band-limited corpus, and exterior
/// ratios for Gaussians centered at |x| = 3R/2 within a factor 2 of their
/// whole-space value for every R in R_list.
AuditReport gn_audit(int dimension, int count, std::span<const double> R_list,
                     std::uint64_t seed);

struct InterpolationAuditOptions {
  int count = 50;
  double b = 0.3;
  double cutoff_R = 1.0;
  int cutoff_k = 8;
  std::uint64_t seed = 7;
  /// Radial cases: grid size and extent, and the refinement used for the
  /// resolution check.
  int radial_count = 32000;
  double radial_extent = 12.0;
  int refine = 16;
};

/// Scale invariance (lambda in {0.3, 3.7}, 1e-10), finiteness and
/// max/median < 10 for one case, with psi = Phi_2 of a built cutoff.
AuditReport interpolation_audit(ProbeCase c, const InterpolationAuditOptions& opts = {});

/// Closed form 1/(c y0) of the escape time of y' = c y^2 and an adaptive
/// Runge-Kutta estimate of the time y first exceeds `escape`.
struct RiccatiResult {
  double closed_form = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};
/// Throws NonPositiveInput unless c > 0, y0 > 0 and escape > y0.
RiccatiResult riccati_blowup_time(double c, double y0, double escape = 1e12);

struct PowerFit {
  double beta = 0.0;
  double residual = 0.0;  ///< RMS deviation of log(values)
  std::size_t samples = 0;
};
/// Least squares of log(value) against log(1 + t) over the samples with
/// 1 + t >= (1 + t_last) / 10, or the last 10 samples if that window holds
/// fewer. Throws InsufficientData (< 10 samples) or NonPositiveInput.
PowerFit fit_power_law(std::span<const double> times, std::span<const double> values);

enum class VerdictKind { FiniteTime, InfiniteTimeGrowth, NoBlowupDetected, Inconclusive };
std::string_view to_string(VerdictKind k);

struct VerdictThresholds {
  double growth = 10.0;  ///< G
  double dt_floor = 1e-10;
  double delta_fit = 0.3;
  double fit_residual = 0.1;
};

struct BlowupVerdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  double growth = 0.0;  ///< max ||Lap u|| / initial ||Lap u||
  double final_dt = 0.0;
  bool dt_hit_floor = false;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
};

/// FiniteTime when dt reached the floor with growth >= G. Otherwise a run
/// that reached t_end with beta >= 2 - delta_fit and a residual within
/// bounds is InfiniteTimeGrowth. Runs halted by resolution loss, a
/// non-finite field or the floor are Inconclusive. The rest are
/// NoBlowupDetected when growth < G, else Inconclusive.
BlowupVerdict classify_blowup(const SimSeries& series, const VerdictThresholds& th = {});

}  // namespace ibnls

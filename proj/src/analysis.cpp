#include "ibnls/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "ibnls/cutoff.hpp"
#include "ibnls/error.hpp"

namespace ibnls {

std::string_view to_string(ProbeCase c) {
  switch (c) {
    case ProbeCase::GN: return "GN";
    case ProbeCase::GNExterior: return "GN_exterior";
    case ProbeCase::N1: return "n=1";
    case ProbeCase::N2: return "n=2";
    case ProbeCase::N3: return "n=3";
    case ProbeCase::N4: return "n=4";
    case ProbeCase::N5: return "n=5";
  }
  return "unknown";
}

std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::FiniteTime: return "FiniteTime";
    case VerdictKind::InfiniteTimeGrowth: return "InfiniteTimeGrowth";
    case VerdictKind::NoBlowupDetected: return "NoBlowupDetected";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

namespace {

double ratio_of(double lhs, double rhs) { return lhs == 0.0 ? 0.0 : lhs / rhs; }

double gn_from(double mass, double grad_sq, double lap_sq) {
  if (mass == 0.0) throw Error(ErrorKind::ZeroField, "GN ratio of a zero field");
  if (grad_sq == 0.0) return 0.0;
  return std::sqrt(grad_sq) / std::pow(lap_sq * mass, 0.25);
}

}  // namespace

double gn_ratio(const ComplexField& u) {
  return gn_from(l2_norm_sq(u), grad_norm_sq(u), lap_norm_sq(u));
}

double gn_exterior_ratio(const ComplexField& u, double R) {
  const auto n = restricted_norms(u, R);
  return gn_from(n.mass, n.grad_sq, n.lap_sq);
}

InequalityProbe gn_probe(const ComplexField& u, double R) {
  InequalityProbe p;
  p.id = R > 0.0 ? ProbeCase::GNExterior : ProbeCase::GN;
  double mass, grad, lap;
  if (R > 0.0) {
    const auto n = restricted_norms(u, R);
    mass = n.mass, grad = n.grad_sq, lap = n.lap_sq;
  } else {
    mass = l2_norm_sq(u), grad = grad_norm_sq(u), lap = lap_norm_sq(u);
  }
  p.ratio = gn_from(mass, grad, lap);
  p.lhs = std::sqrt(grad);
  p.rhs = std::pow(lap * mass, 0.25);
  return p;
}

namespace {

double h2_sq(const ComplexField& u) {
  return l2_norm_sq(u) + 2.0 * grad_norm_sq(u) + lap_norm_sq(u);
}

ComplexField times_power(const ComplexField& u, std::span<const double> psi, double alpha) {
  ComplexField v = u;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= psi[i] > 0.0 ? std::pow(psi[i], alpha) : 0.0;
  return v;
}

std::vector<double> psi_power(std::span<const double> psi, double alpha) {
  std::vector<double> out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    out[i] = psi[i] > 0.0 ? std::pow(psi[i], alpha) : 0.0;
  return out;
}

void check_psi(std::span<const double> psi, std::size_t n) {
  if (psi.size() != n) throw Error(ErrorKind::ConfigInvalid, "psi has the wrong size");
  for (double p : psi)
    if (!(p >= 0.0) || !std::isfinite(p))
      throw Error(ErrorKind::ConfigInvalid, "psi must be finite and nonnegative");
}

}  // namespace

InequalityProbe interpolation_probe(const ComplexField& u, std::span<const double> psi,
                                    const ModelParams& params, ProbeCase c) {
  const int N = u.grid().dimension();
  const int want = c == ProbeCase::N1 ? 1 : c == ProbeCase::N2 ? 2 : c == ProbeCase::N3 ? 3 : 0;
  if (want == 0 || want != N)
    throw Error(ErrorKind::CaseDimensionMismatch,
                std::string(to_string(c)) + " on a " + std::to_string(N) + "-d grid");
  if (u.space() != Space::Physical)
    throw Error(ErrorKind::ConfigInvalid, "interpolation_probe needs a physical field");
  check_psi(psi, u.size());
  const double b = params.b;
  const double q = (8.0 - 2.0 * b) / N;
  const double m = l2_norm_sq(u);
  if (m == 0.0) throw Error(ErrorKind::ZeroField, "interpolation probe of a zero field");

  InequalityProbe p;
  p.id = c;
  p.lhs = weighted_power_integral(u, psi, q + 2.0);
  const double psi_sup = *std::max_element(psi.begin(), psi.end());
  switch (c) {
    case ProbeCase::N1:
      p.rhs = psi_sup * std::pow(m, 0.5 * (6.0 - b)) * std::pow(grad_norm_sq(u), 0.5 * (4.0 - b));
      break;
    case ProbeCase::N2:
      p.rhs = psi_sup * m * std::pow(grad_norm_sq(u), 0.5 * (4.0 - b));
      break;
    default: {
      const ComplexField v = times_power(u, psi, 2.0 / (4.0 - b));
      p.rhs = std::pow(h2_sq(u), (4.0 - b) / 12.0) * std::pow(h2_sq(v), (4.0 - b) / 4.0) * m;
    }
  }
  p.ratio = ratio_of(p.lhs, p.rhs);
  return p;
}

InequalityProbe interpolation_probe(const RadialField& u, std::span<const double> psi,
                                    const ModelParams& params, ProbeCase c) {
  const int N = u.grid.dimension;
  const bool ok = (c == ProbeCase::N4 && N == 4) || (c == ProbeCase::N5 && N >= 5);
  if (!ok)
    throw Error(ErrorKind::CaseDimensionMismatch,
                std::string(to_string(c)) + " on a radial profile in dimension " +
                    std::to_string(N));
  check_psi(psi, u.values.size());
  const double b = params.b;
  const double q = (8.0 - 2.0 * b) / N;
  const double m = radial_l2_sq(u);
  if (m == 0.0) throw Error(ErrorKind::ZeroField, "interpolation probe of a zero field");

  InequalityProbe p;
  p.id = c;
  p.lhs = radial_power_integral(u, psi, q + 2.0);
  if (c == ProbeCase::N4) {
    const double e = 2.0 - 0.25 * b;
    const RadialField v = u.multiplied(psi_power(psi, 2.0 / (4.0 - 0.5 * b)));
    p.rhs = std::pow(radial_h2_sq(v), 0.5 * e) * std::pow(m, 0.5 * e);
  } else {
    const RadialField v = u.multiplied(psi_power(psi, 2.0 / (4.0 - b)));
    p.rhs = std::pow(radial_lap_sq(v), 0.25 * (4.0 - b)) * std::pow(m, 0.5 * (q + 0.5 * b));
  }
  p.ratio = ratio_of(p.lhs, p.rhs);
  return p;
}

std::vector<ComplexField> band_limited_corpus(GridPtr grid, int count, int kmax,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double cap = (kmax + 0.5) * std::numbers::pi / grid->half_width();
  const auto xi = grid->axis_frequencies();
  std::vector<ComplexField> out;
  out.reserve(count);
  for (int f = 0; f < count; ++f) {
    ComplexField u(grid, Space::Spectral);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto idx = grid->unravel(i);
      bool inside = true;
      for (int d = 0; d < grid->dimension(); ++d) inside = inside && std::abs(xi[idx[d]]) < cap;
      if (inside) {
        const double re = normal(rng);
        const double im = normal(rng);
        u[i] = {re, im};
      }
    }
    u.to_physical();
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<ComplexField> gaussian_corpus(GridPtr grid, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const int N = grid->dimension();
  std::vector<ComplexField> out;
  out.reserve(count);
  for (int f = 0; f < count; ++f) {
    ComplexField u(grid);
    const int terms = 1 + static_cast<int>(unit(rng) * 3.0) % 3;
    for (int t = 0; t < terms; ++t) {
      std::array<double, 3> dir{}, mom{};
      double len = 0.0;
      for (int d = 0; d < N; ++d) {
        dir[d] = normal(rng);
        len += dir[d] * dir[d];
      }
      len = std::sqrt(len);
      const double radius = 1.5 + 1.5 * unit(rng);
      for (int d = 0; d < N; ++d) dir[d] *= radius / len;
      for (int d = 0; d < N; ++d) mom[d] = 2.0 * unit(rng) - 1.0;
      const double width = 0.6 + 0.6 * unit(rng);
      const cplx amp = std::polar(0.5 + 1.5 * unit(rng), 2.0 * std::numbers::pi * unit(rng));
      for (std::size_t i = 0; i < u.size(); ++i) {
        double r2 = 0.0, phase = 0.0;
        for (int d = 0; d < N; ++d) {
          const double x = grid->coordinate(i, d);
          r2 += (x - dir[d]) * (x - dir[d]);
          phase += mom[d] * x;
        }
        u[i] += amp * std::exp(-0.5 * r2 / (width * width)) * std::polar(1.0, phase);
      }
    }
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<RadialField> radial_corpus(const RadialGrid& grid, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RadialField> out;
  out.reserve(count);
  for (int f = 0; f < count; ++f) {
    const cplx a0 = std::polar(0.5 + 1.5 * unit(rng), 2.0 * std::numbers::pi * unit(rng));
    const double c0 = 3.5 + 1.5 * unit(rng);
    const double w0 = 0.5 + 0.4 * unit(rng);
    const bool twin = unit(rng) < 0.5;
    const cplx a1 = std::polar(0.5 + 1.5 * unit(rng), 2.0 * std::numbers::pi * unit(rng));
    const double c1 = 3.5 + 1.5 * unit(rng);
    const double w1 = 0.5 + 0.4 * unit(rng);
    out.push_back(RadialField::sample(grid, [=](double r) {
      cplx v = a0 * std::exp(-0.5 * (r - c0) * (r - c0) / (w0 * w0));
      if (twin) v += a1 * std::exp(-0.5 * (r - c1) * (r - c1) / (w1 * w1));
      return v;
    }));
  }
  return out;
}

RatioSummary summarize(std::vector<double> ratios) {
  if (ratios.empty()) throw Error(ErrorKind::InsufficientData, "no ratios to summarize");
  std::sort(ratios.begin(), ratios.end());
  const std::size_t n = ratios.size();
  const double median = n % 2 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
  return {ratios.front(), median, ratios.back()};
}

AuditReport gn_audit(int dimension, int count, std::span<const double> R_list,
                     std::uint64_t seed) {
  AuditReport rep("gn_audit N=" + std::to_string(dimension));
  const int M = dimension == 1 ? 512 : 128;
  const double L = dimension == 1 ? 16.0 : 14.0;
  const auto grid = Grid::build({dimension, M, L});

  double worst = 0.0;
  for (const auto& u : band_limited_corpus(grid, count, M / 4, seed))
    worst = std::max(worst, gn_ratio(u));
  rep.add("gn_max_ratio", worst);
  rep.check("gn_ratio <= sqrt(2) + 1e-6", worst <= std::sqrt(2.0) + 1e-6);

  // Exterior ratios: each corpus Gaussian is recentred at |x| = 3R/2.
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double lo = 1e300, hi = 0.0;
  for (int f = 0; f < count; ++f) {
    const double width = 0.6 + 0.6 * unit(rng);
    const double k = 2.0 * unit(rng) - 1.0;
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    for (double R : R_list) {
      const double c = 1.5 * R;
      const double cx = dimension == 1 ? c : c * std::cos(angle);
      const double cy = dimension == 1 ? 0.0 : c * std::sin(angle);
      ComplexField u(grid);
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = grid->coordinate(i, 0);
        const double y = dimension > 1 ? grid->coordinate(i, 1) : 0.0;
        const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        u[i] = std::exp(-0.5 * r2 / (width * width)) * std::polar(1.0, k * x);
      }
      const double rel = gn_exterior_ratio(u, R) / gn_ratio(u);
      lo = std::min(lo, rel);
      hi = std::max(hi, rel);
    }
  }
  rep.add("exterior_over_whole_min", lo);
  rep.add("exterior_over_whole_max", hi);
  rep.check("exterior ratio within a factor 2 of the whole-space value", lo >= 0.5 && hi <= 2.0);
  return rep;
}

namespace {

int case_dimension(ProbeCase c) {
  switch (c) {
    case ProbeCase::N1: return 1;
    case ProbeCase::N2: return 2;
    case ProbeCase::N3: return 3;
    case ProbeCase::N4: return 4;
    case ProbeCase::N5: return 5;
    default: throw Error(ErrorKind::CaseDimensionMismatch, "not an interpolation case");
  }
}

void scale_checks(AuditReport& rep, const std::vector<double>& ratios, double worst_scale) {
  bool finite = true;
  for (double r : ratios) finite = finite && std::isfinite(r) && r >= 0.0;
  const auto s = summarize(ratios);
  rep.add("ratio_min", s.min);
  rep.add("ratio_median", s.median);
  rep.add("ratio_max", s.max);
  rep.add("scale_invariance_worst", worst_scale);
  rep.check("ratios finite and nonnegative", finite);
  rep.check("scale invariance within 1e-10", worst_scale <= 1e-10);
  rep.check("max/median < 10", s.median > 0.0 && s.max / s.median < 10.0);
}

}  // namespace

AuditReport interpolation_audit(ProbeCase c, const InterpolationAuditOptions& opts) {
  const int N = case_dimension(c);
  AuditReport rep("interpolation_audit " + std::string(to_string(c)));
  ModelParams params;
  params.dimension = N;
  params.b = opts.b;
  rep.add("b", opts.b);
  const CutoffSpec spec{ChiProfile::build(opts.cutoff_k, opts.b), opts.cutoff_R};
  const std::array<double, 2> lambdas{0.3, 3.7};
  std::vector<double> ratios;
  double worst_scale = 0.0;

  if (N <= 3) {
    const int M = N == 1 ? 256 : N == 2 ? 128 : 64;
    const double L = N == 1 ? 12.0 : N == 2 ? 10.0 : 8.0;
    const auto grid = Grid::build({N, M, L});
    std::vector<double> psi(grid->size());
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = Phi2(spec, N, opts.b, grid->radius()[i]);
    for (const auto& u : gaussian_corpus(grid, opts.count, opts.seed)) {
      const double base = interpolation_probe(u, psi, params, c).ratio;
      for (double lam : lambdas) {
        ComplexField v = u;
        v *= lam;
        const double r = interpolation_probe(v, psi, params, c).ratio;
        worst_scale = std::max(worst_scale, std::abs(r - base) / base);
      }
      ratios.push_back(base);
    }
    scale_checks(rep, ratios, worst_scale);
    return rep;
  }

  const auto rgrid = RadialGrid::make(N, opts.radial_extent, opts.radial_count);
  auto psi_on = [&](const RadialGrid& g) {
    return sample_radial(g, [&](double r) { return Phi2(spec, N, opts.b, r); });
  };
  const auto psi = psi_on(rgrid);
  for (const auto& u : radial_corpus(rgrid, opts.count, opts.seed)) {
    const double base = interpolation_probe(u, psi, params, c).ratio;
    for (double lam : lambdas) {
      const double r = interpolation_probe(u.scaled(lam), psi, params, c).ratio;
      worst_scale = std::max(worst_scale, std::abs(r - base) / base);
    }
    ratios.push_back(base);
  }
  scale_checks(rep, ratios, worst_scale);

  // Resolution check on a Gaussian profile against a refined radial grid.
  auto gauss = [](double r) { return cplx(std::exp(-0.5 * r * r / 2.25)); };
  const auto fine = RadialGrid::make(N, opts.radial_extent, opts.radial_count * opts.refine);
  const double coarse_ratio =
      interpolation_probe(RadialField::sample(rgrid, gauss), psi, params, c).ratio;
  const double fine_ratio =
      interpolation_probe(RadialField::sample(fine, gauss), psi_on(fine), params, c).ratio;
  const double rel = std::abs(coarse_ratio - fine_ratio) / fine_ratio;
  rep.add("refined_ratio", fine_ratio);
  rep.add("refinement_rel_diff", rel);
  rep.check("agrees with the refined grid to 1e-4", rel <= 1e-4);
  return rep;
}

RiccatiResult riccati_blowup_time(double c, double y0, double escape) {
  if (!(c > 0.0) || !(y0 > 0.0) || !(escape > y0))
    throw Error(ErrorKind::NonPositiveInput, "Riccati oracle needs c > 0, y0 > 0, escape > y0");
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 1>;
  RiccatiResult res;
  res.closed_form = 1.0 / (c * y0);

  auto rhs = [c](const State& y, State& dy, double) { dy[0] = c * y[0] * y[0]; };
  auto stepper = odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
  State y{y0};
  double t = 0.0;
  double dt = 1e-3 * res.closed_form;
  for (long iter = 0; y[0] < escape; ++iter) {
    if (iter > 50'000'000)
      throw Error(ErrorKind::NonFiniteField, "Riccati integration did not escape");
    stepper.try_step(rhs, y, t, dt);
    if (!std::isfinite(y[0])) throw Error(ErrorKind::NonFiniteField, "Riccati state overflow");
  }
  res.numeric = t;
  res.rel_error = std::abs(res.numeric - res.closed_form) / res.closed_form;
  return res;
}

PowerFit fit_power_law(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size())
    throw Error(ErrorKind::InsufficientData, "times and values differ in length");
  const std::size_t n = times.size();
  if (n < 10) throw Error(ErrorKind::InsufficientData, "power fit needs at least 10 samples");
  for (std::size_t i = 0; i < n; ++i)
    if (!(values[i] > 0.0) || !(times[i] > -1.0))
      throw Error(ErrorKind::NonPositiveInput, "power fit needs positive values and 1 + t > 0");

  const double cut = (1.0 + times[n - 1]) / 10.0;
  std::size_t first = n;
  while (first > 0 && 1.0 + times[first - 1] >= cut) --first;
  if (n - first < 10) first = n - 10;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n - first);
  for (std::size_t i = first; i < n; ++i) {
    const double x = std::log1p(times[i]);
    const double y = std::log(values[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  if (!(std::abs(den) > 1e-300 * m * m))
    throw Error(ErrorKind::InsufficientData, "power fit window has no time spread");
  PowerFit fit;
  fit.beta = (m * sxy - sx * sy) / den;
  const double a = (sy - fit.beta * sx) / m;
  double ss = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const double d = std::log(values[i]) - (a + fit.beta * std::log1p(times[i]));
    ss += d * d;
  }
  fit.residual = std::sqrt(ss / m);
  fit.samples = n - first;
  return fit;
}

BlowupVerdict classify_blowup(const SimSeries& series, const VerdictThresholds& th) {
  BlowupVerdict v;
  if (series.records.empty()) return v;
  const auto& recs = series.records;
  double peak = 0.0;
  for (const auto& r : recs) peak = std::max(peak, r.lap_norm);
  const double first = recs.front().lap_norm;
  v.growth = first > 0.0 ? peak / first : (peak > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  v.final_dt = series.final_dt > 0.0 ? series.final_dt : recs.back().dt;
  v.dt_hit_floor = series.halt == HaltReason::DtFloorReached || v.final_dt <= th.dt_floor;

  std::vector<double> ts, ls;
  for (const auto& r : recs)
    if (r.lap_norm > 0.0) ts.push_back(r.t), ls.push_back(r.lap_norm);
  try {
    const auto fit = fit_power_law(ts, ls);
    v.beta = fit.beta;
    v.fit_residual = fit.residual;
  } catch (const Error&) {
  }

  const bool window_complete =
      series.halt == HaltReason::TEnd || series.halt == HaltReason::StepLimit;
  if (v.dt_hit_floor && v.growth >= th.growth) {
    v.kind = VerdictKind::FiniteTime;
  } else if (window_complete && std::isfinite(v.beta) && v.beta >= 2.0 - th.delta_fit &&
             v.fit_residual <= th.fit_residual) {
    v.kind = VerdictKind::InfiniteTimeGrowth;
  } else if (!window_complete || v.dt_hit_floor) {
    v.kind = VerdictKind::Inconclusive;
  } else {
    v.kind = v.growth < th.growth ? VerdictKind::NoBlowupDetected : VerdictKind::Inconclusive;
  }
  return v;
}

}  // namespace ibnls

#include "ibnls/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "ibnls/checkpoint.hpp"
#include "ibnls/cutoff.hpp"
#include "ibnls/error.hpp"

namespace ibnls {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) { return format_double(v); }

std::string radius_label(double R) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "Z_R%g", R);
  return buf;
}

}  // namespace

int thread_budget() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("IBNLS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = n > 0 ? std::min(n, cap) : cap;
  }
  return std::max(n, 1);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorKind::IoError, "cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
    os << '\n';
  }
  if (!os) throw Error(ErrorKind::IoError, "write failed for " + path);
}

namespace {

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorKind::IoError, "cannot write " + path);
  for (const auto& l : lines) os << l << '\n';
  if (!os) throw Error(ErrorKind::IoError, "write failed for " + path);
}

void write_meta(const std::string& csv, const std::map<std::string, std::string>& meta) {
  if (csv.empty()) return;
  std::vector<std::string> lines;
  for (const auto& [k, v] : meta) lines.push_back(k + " = " + v);
  write_lines(csv + ".meta", lines);
}

std::vector<std::string> report_lines(const std::vector<AuditReport>& reports) {
  std::vector<std::string> lines{"report,key,value"};
  for (const auto& r : reports)
    for (const auto& [k, v] : r.entries()) lines.push_back(r.name() + "," + k + "," + v);
  return lines;
}

}  // namespace

ComplexField initial_field(const RunConfig& cfg, GridPtr grid) {
  const int N = grid->dimension();
  const auto& in = cfg.init;
  ComplexField u(grid);
  if (in.type == "checkpoint") {
    const auto ck = read_checkpoint(in.checkpoint);
    if (ck.grid.dimension != N || ck.grid.points != grid->points() ||
        ck.grid.half_width != grid->half_width())
      throw Error(ErrorKind::ConfigInvalid, "checkpoint grid does not match the configured grid");
    u = ComplexField(grid, ck.values);
    u *= in.amplitude;
    return u;
  }
  std::array<double, 3> c{}, k{};
  for (int d = 0; d < N && d < static_cast<int>(in.center.size()); ++d) c[d] = in.center[d];
  for (int d = 0; d < N && d < static_cast<int>(in.momentum.size()); ++d) k[d] = in.momentum[d];
  const double w2 = in.width * in.width;
  const bool ring = in.type == "ring";
  for (std::size_t i = 0; i < u.size(); ++i) {
    double r2 = 0.0, phase = 0.0;
    for (int d = 0; d < N; ++d) {
      const double x = grid->coordinate(i, d);
      r2 += (x - c[d]) * (x - c[d]);
      phase += k[d] * x;
    }
    const double s = ring ? std::sqrt(r2) - in.radius : 0.0;
    const double arg = ring ? s * s : r2;
    u[i] = in.amplitude * std::exp(-0.5 * arg / w2) * std::polar(1.0, phase);
  }
  return u;
}

AmplitudeFit amplitude_for_energy(const ComplexField& u0, const ModelParams& params,
                                  double target, EnergyForm form) {
  const auto parts = energy_parts(u0, params, form);
  const auto term = potential_term(params, form);
  const double Q = parts.lap_sq + params.nu * parts.grad_sq;
  const double P = (params.focusing ? 1.0 : -1.0) * params.coupling * term.coefficient * parts.potential;
  const double p = term.power;
  const double goal = -std::abs(target);
  if (!(P > 0.0) || !(p > 2.0))
    throw Error(ErrorKind::ConfigInvalid, "no amplitude gives negative energy for this profile");
  auto E = [&](double l) { return l * l * Q - std::pow(l, p) * P; };
  const double peak = std::pow(2.0 * Q / (p * P), 1.0 / (p - 2.0));
  double lo = peak, hi = 2.0 * peak;
  while (E(hi) > goal) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw Error(ErrorKind::ConfigInvalid, "amplitude search diverged");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (E(mid) > goal ? lo : hi) = mid;
  }
  AmplitudeFit fit;
  fit.lambda = 0.5 * (lo + hi);
  ComplexField u = u0;
  u *= fit.lambda;
  fit.energy = energy(u, params, form);
  return fit;
}

namespace {

EvolveOptions evolve_options(const RunConfig& cfg) {
  EvolveOptions o;
  o.dt0 = cfg.time.dt0;
  o.t_end = cfg.time.t_end;
  o.dt_floor = cfg.time.dt_floor;
  o.cfl = cfg.time.cfl;
  o.adaptive = cfg.time.adaptive;
  o.cadence = cfg.output.cadence;
  o.checkpoint_every = cfg.output.checkpoint_every;
  o.checkpoint_path = cfg.output.checkpoint;
  o.dealias_limit = cfg.time.dealias_limit;
  o.max_steps = cfg.time.max_steps;
  o.energy_form = cfg.energy_form;
  return o;
}

std::vector<std::string> series_columns(const RunConfig& cfg) {
  std::vector<std::string> cols{"t", "dt", "mass", "energy", "grad_norm", "lap_norm", "sup_norm"};
  for (double R : cfg.cutoff.R) cols.push_back(radius_label(R));
  for (const char* c : {"rhs_sum", "residual", "R1nu", "R2", "decay_test"}) cols.push_back(c);
  return cols;
}

std::vector<CartesianCutoff> build_cutoffs(const RunConfig& cfg, const GridPtr& grid) {
  std::vector<CartesianCutoff> cuts;
  for (double R : cfg.cutoff.R)
    cuts.push_back(CartesianCutoff::build(
        grid, CutoffSpec{ChiProfile::build(cfg.cutoff.k, cfg.model.b), R}, cfg.model,
        cfg.cutoff.oversample));
  return cuts;
}

// extra layout: Z per radius, then rhs_sum, residual, R1nu, R2, decay_test.
struct VirialObserver {
  const std::vector<CartesianCutoff>* cuts;
  ModelParams params;
  VirialVariant variant;
  double E0;

  void operator()(const SimState& s, SimRecord& rec) const {
    for (const auto& cut : *cuts) rec.extra.push_back(virial_Z(s.u, cut, variant.factor));
    if (cuts->empty()) {
      rec.extra.insert(rec.extra.end(), {kNaN, kNaN, kNaN, kNaN, kNaN});
      return;
    }
    const auto rep = virial_rhs(s.u, cuts->front(), params, variant);
    const double decay = rep.sum - 16.0 * E0 + 8.0 * params.nu * rec.grad_norm * rec.grad_norm;
    rec.extra.insert(rec.extra.end(), {rep.sum, kNaN, rep.R1nu, rep.R2, decay});
  }
};

std::vector<double> row_of(const SimRecord& r) {
  std::vector<double> row{r.t, r.dt, r.mass, r.energy, r.grad_norm, r.lap_norm, r.sup_norm};
  row.insert(row.end(), r.extra.begin(), r.extra.end());
  return row;
}

void store_rows(ScenarioResult& res, const RunConfig& cfg) {
  res.columns = series_columns(cfg);
  res.rows.clear();
  for (const auto& r : res.series.records) res.rows.push_back(row_of(r));
}

int halt_exit(HaltReason h) { return h == HaltReason::NonFiniteField ? kExitNonFinite : kExitPass; }

struct Prepared {
  GridPtr grid;
  ComplexField u0;
  ModelParams params;
};

Prepared prepare(const RunConfig& cfg, ScenarioResult& res, std::ostream& log) {
  auto grid = Grid::build(cfg.grid);
  ModelParams params = cfg.model;
  params.dimension = cfg.grid.dimension;
  params.validate();
  ComplexField u0 = initial_field(cfg, grid);
  if (cfg.init.target_energy) {
    const auto fit = amplitude_for_energy(u0, params, *cfg.init.target_energy, cfg.energy_form);
    u0 *= fit.lambda;
    res.metadata["amplitude_lambda"] = fmt(fit.lambda);
    res.metadata["amplitude_target_energy"] = fmt(-std::abs(*cfg.init.target_energy));
    log << "amplitude bisection: lambda = " << fmt(fit.lambda) << ", E = " << fmt(fit.energy) << '\n';
  }
  res.metadata["epsilon"] = fmt(params.epsilon);
  return {grid, std::move(u0), params};
}

// ---- conserve ----

struct Drift {
  double mass = 0.0;
  double energy = 0.0;
  double energy_final = 0.0;
};

Drift drifts(const SimSeries& s) {
  Drift d;
  const double m0 = s.records.front().mass;
  const double e0 = s.records.front().energy;
  const double escale = std::max(std::abs(e0), 1e-300);
  for (const auto& r : s.records) {
    d.mass = std::max(d.mass, std::abs(r.mass - m0) / m0);
    d.energy = std::max(d.energy, std::abs(r.energy - e0) / escale);
  }
  d.energy_final = std::abs(s.records.back().energy - e0) / escale;
  return d;
}

void run_conserve(const RunConfig& cfg, ScenarioResult& res, std::ostream& log) {
  auto prep = prepare(cfg, res, log);
  const auto cuts = build_cutoffs(cfg, prep.grid);
  const double E0 = energy(prep.u0, prep.params, cfg.energy_form);
  SimState state{0.0, prep.u0, 0.0, 0, prep.params};
  res.series = evolve(state, evolve_options(cfg), VirialObserver{&cuts, prep.params, {}, E0});
  store_rows(res, cfg);

  AuditReport rep("conserve");
  const auto d = drifts(res.series);
  rep.add("halt", std::string(to_string(res.series.halt)));
  rep.add("steps", static_cast<double>(res.series.steps));
  rep.add("E0", E0);
  rep.add("mass_drift_max", d.mass);
  rep.add("energy_drift_max", d.energy);
  rep.add("energy_drift_final", d.energy_final);
  rep.check("halt == TEnd", res.series.halt == HaltReason::TEnd);
  rep.check("mass drift below threshold", d.mass < cfg.thresholds.mass_drift);
  rep.check("energy drift below threshold", d.energy < cfg.thresholds.energy_drift);

  if (cfg.conserve.order_check) {
    EvolveOptions half = evolve_options(cfg);
    half.dt0 *= 0.5;
    half.cadence = 1 << 30;
    SimState s2{0.0, prep.u0, 0.0, 0, prep.params};
    const auto fine = evolve(s2, half);
    const auto d2 = drifts(fine);
    const double ratio = d.energy_final / d2.energy_final;
    rep.add("energy_drift_final_half_dt", d2.energy_final);
    rep.add("drift_ratio", ratio);
    rep.check("drift ratio within order-2 band",
              ratio >= cfg.thresholds.order_low && ratio <= cfg.thresholds.order_high);
  }
  log << rep.to_text();
  res.exit_code = halt_exit(res.series.halt);
  if (res.exit_code == kExitPass && !rep.pass()) res.exit_code = kExitFail;
  res.reports.push_back(std::move(rep));
}

// ---- virial-check ----

void run_virial(const RunConfig& cfg, ScenarioResult& res, std::ostream& log) {
  auto prep = prepare(cfg, res, log);
  const auto cuts = build_cutoffs(cfg, prep.grid);
  const double E0 = energy(prep.u0, prep.params, cfg.energy_form);
  std::vector<std::pair<double, ComplexField>> states;
  SimState state{0.0, prep.u0, 0.0, 0, prep.params};
  res.series = evolve(state, evolve_options(cfg), [&](const SimState& s, SimRecord&) {
    states.emplace_back(s.t, s.u);
  });

  AuditReport rep("virial_check");
  VirialVariant variant;
  if (cfg.virial.calibrate) {
    const auto cal = calibrate_virial(states, cfg.virial.delta, cuts.front(), prep.params);
    variant = cal.best;
    for (const auto& [v, worst] : cal.scores) rep.add("candidate " + v.label(), worst);
  }
  rep.add("variant", variant.label());
  rep.add("factor", variant.factor);
  rep.add("nu_term_sign", variant.nu_term_sign);
  rep.add("printed_last_exponent", variant.printed_last_exponent ? 1.0 : 0.0);

  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& [t, u] = states[i];
    auto& rec = res.series.records[i];
    const auto vr = virial_residual_at(u, t, cfg.virial.delta, cuts.front(), prep.params, variant);
    rec.extra.clear();
    rec.extra.push_back(vr.Z);
    for (std::size_t j = 1; j < cuts.size(); ++j)
      rec.extra.push_back(virial_Z(u, cuts[j], variant.factor));
    const double decay = vr.sum - 16.0 * E0 + 8.0 * prep.params.nu * rec.grad_norm * rec.grad_norm;
    rec.extra.insert(rec.extra.end(), {vr.sum, vr.residual, vr.R1nu, vr.R2, decay});
    worst = std::max(worst, vr.residual);
  }
  store_rows(res, cfg);
  res.metadata["virial_variant"] = variant.label();
  rep.add("R", cuts.front().R);
  rep.add("delta", cfg.virial.delta);
  rep.add("residual_max", worst);
  rep.check("residual below threshold", worst < cfg.thresholds.virial_residual);
  log << rep.to_text();
  res.exit_code = halt_exit(res.series.halt);
  if (res.exit_code == kExitPass && !rep.pass()) res.exit_code = kExitFail;
  res.reports.push_back(std::move(rep));
}

// ---- blowup ----

void run_blowup(const RunConfig& cfg, ScenarioResult& res, std::ostream& log) {
  auto prep = prepare(cfg, res, log);
  const auto cuts = build_cutoffs(cfg, prep.grid);
  const double E0 = energy(prep.u0, prep.params, cfg.energy_form);
  res.metadata["E0"] = fmt(E0);
  SimState state{0.0, prep.u0, 0.0, 0, prep.params};
  res.series = evolve(state, evolve_options(cfg), VirialObserver{&cuts, prep.params, {}, E0});
  store_rows(res, cfg);

  const auto verdict = classify_blowup(res.series, cfg.thresholds.verdict);
  res.verdict = verdict;

  // Samples after the energy has drifted are under-resolved.
  const double escale = std::max(std::abs(E0), 1e-300);
  std::vector<MorawetzSample> samples;
  std::vector<double> ts, laps;
  double t_resolved = 0.0;
  const std::size_t nR = cuts.size();
  for (const auto& r : res.series.records) {
    if (std::abs(r.energy - E0) / escale > cfg.thresholds.resolved_energy_drift) break;
    t_resolved = r.t;
    ts.push_back(r.t);
    laps.push_back(r.lap_norm);
    if (nR == 0) continue;
    MorawetzSample m;
    m.t = r.t;
    m.Z = r.extra[0];
    m.dZdt = r.extra[nR];
    m.grad_sq = r.grad_norm * r.grad_norm;
    m.R1nu = r.extra[nR + 2];
    m.R2 = r.extra[nR + 3];
    m.decay_test = r.extra[nR + 4];
    samples.push_back(m);
  }

  AuditReport rep("blowup");
  rep.add("E0", E0);
  rep.add("halt", std::string(to_string(res.series.halt)));
  rep.add("steps", static_cast<double>(res.series.steps));
  rep.add("t_final", res.series.records.back().t);
  rep.add("max_dealias_fraction", res.series.max_dealias_fraction);
  rep.add("verdict", std::string(to_string(verdict.kind)));
  rep.add("growth", verdict.growth);
  rep.add("final_dt", verdict.final_dt);
  rep.add("dt_hit_floor", verdict.dt_hit_floor ? 1.0 : 0.0);
  rep.add("beta", verdict.beta);
  rep.add("fit_residual", verdict.fit_residual);
  rep.add("resolved_samples", static_cast<double>(ts.size()));
  rep.add("resolved_until_t", t_resolved);

  bool monotone = true;
  for (std::size_t i = 1; i < laps.size(); ++i) monotone = monotone && laps[i] >= laps[i - 1];
  rep.add("resolved_lap_growth", laps.empty() ? kNaN : laps.back() / laps.front());
  try {
    const auto fit = fit_power_law(ts, laps);
    rep.add("resolved_beta", fit.beta);
    rep.add("resolved_fit_residual", fit.residual);
  } catch (const Error&) {
    rep.add("resolved_beta", kNaN);
  }

  const bool claim = E0 < 0.0;
  if (claim) {
    std::optional<AuditReport> mor;
    if (!samples.empty()) {
      mor = morawetz_decay_report(samples, E0, prep.params.nu, cfg.thresholds.morawetz_tol);
      log << mor->to_text();
      for (const auto& [k, v] : mor->entries()) rep.add("morawetz." + k, v);
    }
    rep.check("morawetz report", mor && mor->pass());
    if (prep.params.nu > 0.0)
      rep.check("verdict == FiniteTime", verdict.kind == VerdictKind::FiniteTime);
    else
      rep.check("lap norm non-decreasing while resolved", monotone);
  } else {
    rep.add("note", std::string("E0 >= 0, no blow-up claim applies"));
  }

  res.metadata["verdict"] = std::string(to_string(verdict.kind));
  res.metadata["growth"] = fmt(verdict.growth);
  res.metadata["final_dt"] = fmt(verdict.final_dt);
  res.metadata["beta"] = fmt(verdict.beta);
  res.metadata["fit_residual"] = fmt(verdict.fit_residual);
  res.metadata["halt"] = std::string(to_string(res.series.halt));
  log << rep.to_text();
  log << "verdict = " << to_string(verdict.kind) << " growth=" << fmt(verdict.growth)
      << " final_dt=" << fmt(verdict.final_dt) << " beta=" << fmt(verdict.beta)
      << " fit_residual=" << fmt(verdict.fit_residual) << '\n';
  res.exit_code = halt_exit(res.series.halt);
  if (res.exit_code == kExitPass && !rep.pass()) res.exit_code = kExitFail;
  res.reports.push_back(std::move(rep));
}

// ---- audits ----

void run_cutoff_audit(const RunConfig& cfg, ScenarioResult& res, std::ostream& log) {
  for (double b : cfg.audit.b) {
    const int k_cmp = std::max(cfg.cutoff.k, static_cast<int>(std::ceil(4.0 / b)));
    const auto profile = ChiProfile::build(cfg.cutoff.k, b);
    const auto profile_cmp = ChiProfile::build(k_cmp, b);
    auto props = verify_cutoff_properties(profile, cfg.cutoff.R);
    res.reports.push_back(std::move(props));
    for (int N : cfg.audit.dimensions) {
      res.reports.push_back(verify_Phi2_scaling(profile, N, b, 2.0 / (4.0 - b), cfg.audit.phi2_R));
      res.reports.push_back(phi_comparison_audit(profile_cmp, N, b, cfg.audit.phi2_R));
    }
  }
  bool pass = true;
  for (const auto& r : res.reports) {
    log << r.to_text() << '\n';
    pass = pass && r.pass();
  }
  if (!cfg.output.csv.empty()) write_lines(cfg.output.csv, report_lines(res.reports));
  res.exit_code = pass ? kExitPass : kExitFail;
}

void run_inequality_audit(const RunConfig& cfg, ScenarioResult& res, std::ostream& log) {
  std::vector<std::string> lines{"case,min,median,max,PASS"};
  auto row = [&](const std::string& name, const RatioSummary& s, bool ok) {
    lines.push_back(name + "," + fmt(s.min) + "," + fmt(s.median) + "," + fmt(s.max) + "," +
                    (ok ? "PASS" : "FAIL"));
  };
  for (int N : {1, 2}) {
    auto rep = gn_audit(N, cfg.audit.gn_count, cfg.audit.exterior_R, cfg.audit.seed);
    const double mx = std::stod(*rep.find("gn_max_ratio"));
    row("GN N=" + std::to_string(N), {kNaN, kNaN, mx}, rep.pass());
    res.reports.push_back(std::move(rep));
  }
  for (auto c : {ProbeCase::N1, ProbeCase::N2, ProbeCase::N3, ProbeCase::N4, ProbeCase::N5}) {
    InterpolationAuditOptions o;
    o.count = cfg.audit.count;
    o.seed = cfg.audit.seed;
    o.b = (c == ProbeCase::N1 || c == ProbeCase::N2) ? cfg.audit.b_low : cfg.audit.b_high;
    o.cutoff_k = cfg.cutoff.k;
    auto rep = interpolation_audit(c, o);
    row(std::string(to_string(c)),
        {std::stod(*rep.find("ratio_min")), std::stod(*rep.find("ratio_median")),
         std::stod(*rep.find("ratio_max"))},
        rep.pass());
    res.reports.push_back(std::move(rep));
  }
  for (const auto& path : cfg.audit.corpus) {
    const auto ck = read_checkpoint(path);
    const auto grid = Grid::build(ck.grid);
    const ComplexField u(grid, ck.values);
    const double g = gn_ratio(u);
    row("GN " + path, {g, g, g}, g <= std::sqrt(2.0) + 1e-6);
    if (ck.grid.dimension <= 3) {
      const double b = ck.grid.dimension <= 2 ? cfg.audit.b_low : cfg.audit.b_high;
      const CutoffSpec spec{ChiProfile::build(cfg.cutoff.k, b), 1.0};
      std::vector<double> psi(grid->size());
      for (std::size_t i = 0; i < psi.size(); ++i)
        psi[i] = Phi2(spec, ck.grid.dimension, b, grid->radius()[i]);
      ModelParams p;
      p.dimension = ck.grid.dimension;
      p.b = b;
      const auto c = ck.grid.dimension == 1 ? ProbeCase::N1
                     : ck.grid.dimension == 2 ? ProbeCase::N2
                                              : ProbeCase::N3;
      const double r = interpolation_probe(u, psi, p, c).ratio;
      row(std::string(to_string(c)) + " " + path, {r, r, r}, std::isfinite(r) && r >= 0.0);
    }
  }
  bool pass = true;
  for (const auto& r : res.reports) {
    log << r.to_text() << '\n';
    pass = pass && r.pass();
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    log << lines[i] << '\n';
    pass = pass && lines[i].ends_with("PASS");
  }
  if (!cfg.output.csv.empty()) write_lines(cfg.output.csv, lines);
  res.exit_code = pass ? kExitPass : kExitFail;
}

void run_riccati(const RunConfig& cfg, ScenarioResult& res, std::ostream& log) {
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < cfg.riccati.c.size(); ++i)
    pairs.emplace_back(cfg.riccati.c[i], cfg.riccati.y0[i]);
  if (pairs.empty()) {
    std::mt19937_64 rng(cfg.riccati.seed);
    std::uniform_real_distribution<double> u(std::log(0.1), std::log(10.0));
    for (int i = 0; i < cfg.riccati.count; ++i) {
      const double c = std::exp(u(rng));
      const double y0 = std::exp(u(rng));
      pairs.emplace_back(c, y0);
    }
  }
  AuditReport rep("riccati");
  res.columns = {"c", "y0", "closed_form", "numeric", "rel_error"};
  double worst = 0.0;
  for (const auto& [c, y0] : pairs) {
    const auto r = riccati_blowup_time(c, y0, cfg.riccati.escape);
    res.rows.push_back({c, y0, r.closed_form, r.numeric, r.rel_error});
    worst = std::max(worst, r.rel_error);
  }
  rep.add("pairs", static_cast<double>(pairs.size()));
  rep.add("rel_error_max", worst);
  rep.check("escape time within tolerance", worst <= cfg.riccati.tolerance);
  log << rep.to_text();
  if (!cfg.output.csv.empty()) write_csv(cfg.output.csv, res.columns, res.rows);
  res.exit_code = rep.pass() ? kExitPass : kExitFail;
  res.reports.push_back(std::move(rep));
}

void run_sweep_scenario(const RunConfig& cfg, ScenarioResult& res, std::ostream& log) {
  const auto cells = run_sweep(cfg);
  std::vector<std::string> lines{"amplitude,b,nu,E0,verdict,growth,final_dt"};
  for (const auto& c : cells)
    lines.push_back(fmt(c.amplitude) + "," + fmt(c.b) + "," + fmt(c.nu) + "," + fmt(c.E0) + "," +
                    c.verdict + "," + fmt(c.growth) + "," + fmt(c.final_dt));
  for (const auto& l : lines) log << l << '\n';
  if (!cfg.output.csv.empty()) write_lines(cfg.output.csv, lines);
  res.exit_code = kExitPass;
}

}  // namespace

std::vector<SweepCell> run_sweep(const RunConfig& cfg) {
  std::vector<SweepCell> cells;
  for (double a : cfg.sweep.amplitudes)
    for (double b : cfg.sweep.b)
      for (double nu : cfg.sweep.nu) cells.push_back({a, b, nu, kNaN, "", kNaN, kNaN});

  auto run_cell = [&cfg](SweepCell& cell) {
    RunConfig c = cfg;
    c.model.b = cell.b;
    c.model.nu = cell.nu;
    c.model.dimension = c.grid.dimension;
    c.init.amplitude = cell.amplitude;
    c.init.target_energy.reset();
    if (!model_violations(c.grid, c.model).empty()) {
      cell.verdict = "ConfigInvalid";
      return;
    }
    try {
      const auto grid = Grid::build(c.grid);
      const ComplexField u0 = initial_field(c, grid);
      cell.E0 = energy(u0, c.model, c.energy_form);
      EvolveOptions o = evolve_options(c);
      o.checkpoint_every = 0;
      SimState s{0.0, u0, 0.0, 0, c.model};
      const auto series = evolve(s, o);
      const auto v = classify_blowup(series, c.thresholds.verdict);
      cell.verdict = std::string(to_string(v.kind));
      cell.growth = v.growth;
      cell.final_dt = v.final_dt;
    } catch (const Error& e) {
      cell.verdict = std::string(to_string(e.kind()));
    }
  };

  const int threads = std::min<int>(thread_budget(), static_cast<int>(cells.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

ScenarioResult run_scenario(const RunConfig& cfg, std::ostream& log) {
  ScenarioResult res;
  res.metadata["scenario"] = std::string(to_string(cfg.scenario));
  switch (cfg.scenario) {
    case Scenario::Conserve: run_conserve(cfg, res, log); break;
    case Scenario::VirialCheck: run_virial(cfg, res, log); break;
    case Scenario::Blowup: run_blowup(cfg, res, log); break;
    case Scenario::CutoffAudit: run_cutoff_audit(cfg, res, log); break;
    case Scenario::InequalityAudit: run_inequality_audit(cfg, res, log); break;
    case Scenario::Riccati: run_riccati(cfg, res, log); break;
    case Scenario::Sweep: run_sweep_scenario(cfg, res, log); break;
  }
  const bool evolving = cfg.scenario == Scenario::Conserve ||
                        cfg.scenario == Scenario::VirialCheck || cfg.scenario == Scenario::Blowup;
  if (evolving) {
    res.metadata["halt"] = std::string(to_string(res.series.halt));
    res.metadata["steps"] = std::to_string(res.series.steps);
    res.metadata["exit_code"] = std::to_string(res.exit_code);
    if (!cfg.output.csv.empty()) {
      write_csv(cfg.output.csv, res.columns, res.rows);
      write_meta(cfg.output.csv, res.metadata);
    }
  }
  return res;
}

}  // namespace ibnls

#include "ibnls/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "ibnls/checkpoint.hpp"
#include "ibnls/error.hpp"

namespace ibnls {

PotentialTerm potential_term(const ModelParams& params, EnergyForm form) {
  const double N = params.dimension;
  const double q = params.exponent();
  if (form == EnergyForm::Printed)
    return {2.0 * N / (2.0 * N + 8.0 - params.b), 1.0 + q};
  return {2.0 * N / (2.0 * N + 8.0 - 2.0 * params.b), 2.0 + q};
}

double mass(const ComplexField& u) { return l2_norm_sq(u); }

EnergyParts energy_parts(const ComplexField& u, const ModelParams& params, EnergyForm form) {
  EnergyParts e;
  e.lap_sq = lap_norm_sq(u);
  e.grad_sq = params.nu != 0.0 ? grad_norm_sq(u) : 0.0;
  const auto term = potential_term(params, form);
  e.potential = potential_integral(u, params, term.power);
  const double sign = params.focusing ? 1.0 : -1.0;
  e.total = e.lap_sq + params.nu * e.grad_sq - sign * params.coupling * term.coefficient * e.potential;
  return e;
}

double energy(const ComplexField& u, const ModelParams& params, EnergyForm form) {
  return energy_parts(u, params, form).total;
}

Integrator::Integrator(GridPtr grid, ModelParams params)
    : grid_(std::move(grid)), params_(params), weight_(singular_weight(*grid_, params_)) {}

void Integrator::ensure_multiplier(double dt) const {
  if (!multiplier_.empty() && dt == cached_dt_) return;
  const auto xi2 = grid_->xi_sq();
  const auto xi4 = grid_->xi_quad();
  multiplier_.resize(grid_->size());
  for (std::size_t i = 0; i < multiplier_.size(); ++i)
    multiplier_[i] = std::polar(1.0, -dt * (xi4[i] + params_.nu * xi2[i]));
  cached_dt_ = dt;
}

void Integrator::linear_step(ComplexField& u, double dt) const {
  if (dt == 0.0) return;
  const bool physical = u.space() == Space::Physical;
  u.to_spectral();
  ensure_multiplier(dt);
  auto v = u.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= multiplier_[i];
  if (physical) u.to_physical();
}

void Integrator::nonlinear_step(ComplexField& u, double dt) const {
  if (u.space() != Space::Physical)
    throw Error(ErrorKind::ConfigInvalid, "nonlinear_step needs a physical field");
  if (dt == 0.0 || params_.coupling == 0.0) return;
  const double q = params_.exponent();
  const double scale = (params_.focusing ? 1.0 : -1.0) * params_.coupling * dt;
  auto v = u.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a == 0.0) continue;
    const double phase = scale * weight_[i] * std::pow(a, q);
    if (!std::isfinite(phase))
      throw Error(ErrorKind::NonFiniteField, "w|u|^q overflow in the nonlinear step");
    v[i] *= std::polar(1.0, phase);
  }
}

double Integrator::strang_step(ComplexField& u, double dt) const {
  u.to_spectral();
  linear_step(u, 0.5 * dt);
  u.to_physical();
  nonlinear_step(u, dt);
  u.to_spectral();
  const double removed = dealias_in_place(u);
  linear_step(u, 0.5 * dt);
  u.to_physical();
  return removed;
}

double Integrator::stable_dt(const ComplexField& u, double dt0, double cfl) const {
  const double xm = grid_->xi_max();
  const double q = params_.exponent();
  double nl = 0.0;
  if (params_.coupling != 0.0) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double a = std::abs(u[i]);
      if (a > 0.0) nl = std::max(nl, weight_[i] * std::pow(a, q));
    }
    nl *= std::abs(params_.coupling);
  }
  const double bound = xm * xm * xm * xm + params_.nu * xm * xm + nl;
  return std::min(dt0, cfl / bound);
}

double strang_step(SimState& state, const Integrator& integ, double dt) {
  const double removed = integ.strang_step(state.u, dt);
  state.t += dt;
  state.dt = dt;
  ++state.step;
  return removed;
}

std::string_view to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::TEnd: return "TEnd";
    case HaltReason::DtFloorReached: return "DtFloorReached";
    case HaltReason::NonFiniteField: return "NonFiniteField";
    case HaltReason::ResolutionInsufficient: return "ResolutionInsufficient";
    case HaltReason::StepLimit: return "StepLimit";
  }
  return "Unknown";
}

namespace {

SimRecord make_record(const SimState& s, const EvolveOptions& opts) {
  SimRecord r;
  r.t = s.t;
  r.dt = s.dt;
  r.mass = mass(s.u);
  const auto e = energy_parts(s.u, s.params, opts.energy_form);
  r.energy = e.total;
  r.grad_norm = std::sqrt(s.params.nu != 0.0 ? e.grad_sq : grad_norm_sq(s.u));
  r.lap_norm = std::sqrt(e.lap_sq);
  r.sup_norm = sup_norm(s.u);
  return r;
}

}  // namespace

SimSeries evolve(SimState& state, const EvolveOptions& opts, const Observer& observer) {
  if (!(opts.dt0 > 0.0) || !(opts.t_end > state.t) || opts.cadence < 1)
    throw Error(ErrorKind::ConfigInvalid, "evolve needs dt0 > 0, t_end > t and cadence >= 1");
  state.params.validate();
  const Integrator integ(state.u.grid_ptr(), state.params);
  SimSeries series;

  auto record = [&] {
    SimRecord rec = make_record(state, opts);
    if (observer) observer(state, rec);
    series.records.push_back(std::move(rec));
  };

  if (state.dt <= 0.0) state.dt = opts.adaptive ? integ.stable_dt(state.u, opts.dt0, opts.cfl) : opts.dt0;
  record();
  std::size_t last_recorded = state.step;
  const double t_tol = 1e-12 * std::max(1.0, std::abs(opts.t_end));

  while (opts.t_end - state.t > t_tol) {
    if (opts.max_steps > 0 && series.steps >= opts.max_steps) {
      series.halt = HaltReason::StepLimit;
      break;
    }
    double dt = opts.adaptive ? integ.stable_dt(state.u, opts.dt0, opts.cfl) : opts.dt0;
    if (dt < opts.dt_floor) {
      state.dt = dt;
      series.halt = HaltReason::DtFloorReached;
      break;
    }
    const double dt_full = dt;
    if (state.t + dt > opts.t_end - t_tol) dt = opts.t_end - state.t;

    ComplexField backup = state.u;
    double removed = 0.0;
    try {
      removed = integ.strang_step(state.u, dt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFiniteField) throw;
      state.u = std::move(backup);
      series.halt = HaltReason::NonFiniteField;
      break;
    }
    if (!state.u.all_finite()) {
      state.u = std::move(backup);
      series.halt = HaltReason::NonFiniteField;
      break;
    }
    state.t += dt;
    // a step shortened to land on t_end does not count as a step-size drop
    state.dt = dt_full;
    ++state.step;
    ++series.steps;
    series.max_dealias_fraction = std::max(series.max_dealias_fraction, removed);

    if (removed > opts.dealias_limit) {
      record();
      last_recorded = state.step;
      series.halt = HaltReason::ResolutionInsufficient;
      break;
    }
    if (state.step % static_cast<std::size_t>(opts.cadence) == 0) {
      record();
      last_recorded = state.step;
    }
    if (opts.checkpoint_every > 0 && !opts.checkpoint_path.empty() &&
        state.step % static_cast<std::size_t>(opts.checkpoint_every) == 0)
      write_checkpoint(opts.checkpoint_path, state.u, state.t, state.dt);
  }
  if (last_recorded != state.step) record();
  series.final_dt = state.dt;
  return series;
}

}  // namespace ibnls

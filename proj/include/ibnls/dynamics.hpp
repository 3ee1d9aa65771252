#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ibnls/field_ops.hpp"

namespace ibnls {

/// Which potential term the energy uses.
///   Standard: coefficient 2N/(2N+8-2b), power 2+q (conserved by the flow)
///   Printed:  coefficient 2N/(2N+8-b),  power 1+q
enum class EnergyForm { Standard, Printed };

struct PotentialTerm {
  double coefficient;
  double power;
};
PotentialTerm potential_term(const ModelParams& params, EnergyForm form);

struct EnergyParts {
  double lap_sq = 0.0;
  double grad_sq = 0.0;
  double potential = 0.0;  ///< int w |u|^power, before the coefficient
  double total = 0.0;
};

double mass(const ComplexField& u);
EnergyParts energy_parts(const ComplexField& u, const ModelParams& params,
                         EnergyForm form = EnergyForm::Standard);
double energy(const ComplexField& u, const ModelParams& params,
              EnergyForm form = EnergyForm::Standard);

struct SimState {
  double t = 0.0;
  ComplexField u;
  double dt = 0.0;
  std::size_t step = 0;
  ModelParams params;
};

/// Exact sub-flows and their Strang composition for one grid and model.
/// Caches w(x) and the last linear multiplier.
class Integrator {
 public:
  Integrator(GridPtr grid, ModelParams params);

  const ModelParams& params() const { return params_; }
  const Grid& grid() const { return *grid_; }
  std::span<const double> weight() const { return weight_; }

  /// u <- F^-1 exp(-i dt (|xi|^4 + nu |xi|^2)) F u. Works in either space.
  void linear_step(ComplexField& u, double dt) const;
  /// u <- u exp(+i dt w |u|^q) in physical space (sign flipped when
  /// defocusing). Throws NonFiniteField if w |u|^q overflows.
  void nonlinear_step(ComplexField& u, double dt) const;
  /// L(dt/2) NL(dt) dealias L(dt/2) on a physical field. Returns the L2
  /// fraction removed by the dealias.
  double strang_step(ComplexField& u, double dt) const;

  /// min(dt0, cfl / (xi_max^4 + nu xi_max^2 + sup w |u|^q)).
  double stable_dt(const ComplexField& u, double dt0, double cfl) const;

 private:
  void ensure_multiplier(double dt) const;

  GridPtr grid_;
  ModelParams params_;
  std::vector<double> weight_;
  mutable double cached_dt_ = 0.0;
  mutable std::vector<cplx> multiplier_;
};

/// Advances the state by one Strang step of size dt.
double strang_step(SimState& state, const Integrator& integ, double dt);

struct EvolveOptions {
  double dt0 = 1e-4;
  double t_end = 1.0;
  double dt_floor = 1e-10;
  double cfl = 0.5;
  /// false keeps dt = dt0 (the CFL bound is still reported).
  bool adaptive = true;
  /// Record every `cadence` steps (plus the initial and final states).
  int cadence = 1;
  /// Write a checkpoint every this many steps when > 0.
  int checkpoint_every = 0;
  std::string checkpoint_path;
  /// Halt with ResolutionInsufficient when a dealias removes more than this.
  double dealias_limit = 1e-4;
  /// Hard cap on steps, 0 for none.
  std::size_t max_steps = 0;
  EnergyForm energy_form = EnergyForm::Standard;
};

enum class HaltReason { TEnd, DtFloorReached, NonFiniteField, ResolutionInsufficient, StepLimit };
std::string_view to_string(HaltReason reason);

struct SimRecord {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double lap_norm = 0.0;
  double sup_norm = 0.0;
  /// Observer-supplied columns (Z_R, virial terms, ...).
  std::vector<double> extra;
};

struct SimSeries {
  std::vector<SimRecord> records;
  HaltReason halt = HaltReason::TEnd;
  double max_dealias_fraction = 0.0;
  std::size_t steps = 0;
  /// Last step size tried, including one rejected by the floor.
  double final_dt = 0.0;
};

/// Called at every recorded state; may append to rec.extra.
using Observer = std::function<void(const SimState&, SimRecord& rec)>;

/// Runs the state to t_end or until a halt condition. The state is left at
/// the last finite time reached.
SimSeries evolve(SimState& state, const EvolveOptions& opts, const Observer& observer = {});

}  // namespace ibnls

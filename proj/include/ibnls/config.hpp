#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ibnls/analysis.hpp"
#include "ibnls/dynamics.hpp"

namespace ibnls {

enum class Scenario { Conserve, VirialCheck, CutoffAudit, InequalityAudit, Blowup, Riccati, Sweep };
std::string_view to_string(Scenario s);
std::optional<Scenario> scenario_from_string(std::string_view s);

struct InitConfig {
  /// gaussian | ring | checkpoint
  std::string type = "gaussian";
  double amplitude = 1.0;
  double width = 1.0;
  double radius = 3.0;  ///< ring radius
  std::vector<double> center;
  std::vector<double> momentum;
  std::string checkpoint;
  /// When set, the amplitude is bisected so that E = -|target|.
  std::optional<double> target_energy;
};

struct TimeConfig {
  double dt0 = 1e-4;
  double t_end = 0.0;
  double dt_floor = 1e-10;
  double cfl = 0.5;
  bool adaptive = true;
  std::size_t max_steps = 0;
  double dealias_limit = 1e-4;
};

struct CutoffConfig {
  std::vector<double> R{4.0, 8.0, 16.0, 32.0};
  int k = 8;
  int oversample = 4;
};

struct OutputConfig {
  std::string csv;
  std::string checkpoint;
  int cadence = 1;
  int checkpoint_every = 0;
};

struct ThresholdConfig {
  VerdictThresholds verdict;
  double mass_drift = 1e-9;
  double energy_drift = 1e-6;
  double virial_residual = 1e-3;
  /// Blow-up runs: samples whose relative energy drift exceeds this are
  /// treated as under-resolved and left out of the Morawetz checks.
  double resolved_energy_drift = 1e-2;
  double morawetz_tol = 1e-6;
  double order_low = 3.5;
  double order_high = 4.5;
};

struct VirialConfig {
  double delta = 1e-5;
  bool calibrate = true;
};

struct ConserveConfig {
  /// Repeat the run at dt0/2 and check the energy drift ratio.
  bool order_check = false;
};

struct AuditConfig {
  std::vector<double> b{0.3, 1.0, 2.0};
  std::vector<int> dimensions{1, 3, 5};
  std::vector<double> phi2_R{10.0, 20.0, 40.0, 80.0};
  int count = 50;     ///< interpolation corpus size
  int gn_count = 100;  ///< GN corpus size
  std::vector<double> exterior_R{1.0, 2.0, 4.0};
  std::uint64_t seed = 7;
  double b_low = 0.3;   ///< b for the N = 1, 2 probes
  double b_high = 1.0;  ///< b for the N = 3, 4, 5 probes
  std::vector<std::string> corpus;  ///< checkpoint files probed in addition
};

struct RiccatiConfig {
  std::vector<double> c;
  std::vector<double> y0;
  int count = 10;  ///< random pairs drawn when c/y0 are not given
  std::uint64_t seed = 3;
  double escape = 1e12;
  double tolerance = 0.01;
};

struct SweepConfig {
  std::vector<double> amplitudes;
  std::vector<double> b;
  std::vector<double> nu;
};

struct RunConfig {
  Scenario scenario = Scenario::Conserve;
  GridSpec grid;
  ModelParams model;
  EnergyForm energy_form = EnergyForm::Standard;
  InitConfig init;
  TimeConfig time;
  CutoffConfig cutoff;
  OutputConfig output;
  ThresholdConfig thresholds;
  VirialConfig virial;
  ConserveConfig conserve;
  AuditConfig audit;
  RiccatiConfig riccati;
  SweepConfig sweep;
  /// Key/value pairs as read, for run metadata.
  std::map<std::string, std::string> raw;
};

/// Parses "key = value" lines ('#' starts a comment, lists are comma
/// separated). Every violation is collected; throws ConfigInvalid with all
/// of them. `scenario` overrides the file's scenario key.
RunConfig parse_config_text(const std::string& text,
                            std::optional<Scenario> scenario = std::nullopt);
RunConfig parse_config(const std::string& path, std::optional<Scenario> scenario = std::nullopt);

/// Model and grid checks that a sweep cell repeats after overriding b, nu.
std::vector<std::string> model_violations(const GridSpec& grid, const ModelParams& model);

}  // namespace ibnls

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ibnls/analysis.hpp"
#include "ibnls/config.hpp"
#include "ibnls/virial.hpp"

namespace ibnls {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonFinite = 3;

/// u0 from the init section (Gaussian, ring or checkpoint), before any
/// amplitude search.
ComplexField initial_field(const RunConfig& cfg, GridPtr grid);

struct AmplitudeFit {
  double lambda = 0.0;
  double energy = 0.0;  ///< E(lambda u0), evaluated directly
};

/// Bisects lambda on the decreasing branch of
///   E(lambda u0) = lambda^2 (||Lap u0||^2 + nu ||grad u0||^2) - lambda^(2+q) P
/// so that E = -|target|. Throws ConfigInvalid when no lambda reaches it.
AmplitudeFit amplitude_for_energy(const ComplexField& u0, const ModelParams& params,
                                  double target, EnergyForm form = EnergyForm::Standard);

struct ScenarioResult {
  int exit_code = kExitPass;
  std::vector<AuditReport> reports;
  std::optional<BlowupVerdict> verdict;
  SimSeries series;
  std::vector<std::string> columns;  ///< CSV header of series rows
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> metadata;
};

/// Runs the configured scenario, writes output.csv (and output.csv + ".meta"
/// for evolving runs) when set, and logs a summary to `log`.
ScenarioResult run_scenario(const RunConfig& cfg, std::ostream& log);

struct SweepCell {
  double amplitude = 0.0;
  double b = 0.0;
  double nu = 0.0;
  double E0 = 0.0;
  std::string verdict;  ///< VerdictKind name or the error class of a failed cell
  double growth = 0.0;
  double final_dt = 0.0;
};

/// Every amplitude x b x nu cell, run concurrently on up to
/// IBNLS_THREADS threads (default: hardware concurrency). Results keep the
/// cell order.
std::vector<SweepCell> run_sweep(const RunConfig& cfg);

/// Thread cap from IBNLS_THREADS, at least 1.
int thread_budget();

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace ibnls

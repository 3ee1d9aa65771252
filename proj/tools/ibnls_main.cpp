#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ibnls/error.hpp"
#include "ibnls/runner.hpp"

namespace {

int run(const std::string& path, std::optional<ibnls::Scenario> force) {
  try {
    const auto cfg = ibnls::parse_config(path, force);
    const auto res = ibnls::run_scenario(cfg, std::cout);
    std::cout << "exit = " << res.exit_code << '\n';
    return res.exit_code;
  } catch (const ibnls::Error& e) {
    std::cerr << e.what() << '\n';
    switch (e.kind()) {
      case ibnls::ErrorKind::ConfigInvalid: return ibnls::kExitConfig;
      case ibnls::ErrorKind::NonFiniteField: return ibnls::kExitNonFinite;
      default: return ibnls::kExitFail;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ibnls::kExitFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted biharmonic NLS simulator and audits"};
  app.require_subcommand(1);

  std::string run_cfg;
  auto* run_cmd = app.add_subcommand("run", "run the scenario named in the config");
  run_cmd->add_option("config", run_cfg, "config file")->required();

  std::string audit_kind, audit_cfg;
  auto* audit_cmd = app.add_subcommand("audit", "cutoff or inequality audit");
  audit_cmd->add_option("kind", audit_kind, "cutoff | inequality")
      ->required()
      ->check(CLI::IsMember({"cutoff", "inequality"}));
  audit_cmd->add_option("config", audit_cfg, "config file")->required();

  std::string sweep_cfg;
  auto* sweep_cmd = app.add_subcommand("sweep", "amplitude x b x nu verdict table");
  sweep_cmd->add_option("config", sweep_cfg, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ibnls::kExitConfig;
  }

  if (*run_cmd) return run(run_cfg, std::nullopt);
  if (*audit_cmd)
    return run(audit_cfg, audit_kind == "cutoff" ? ibnls::Scenario::CutoffAudit
                                                 : ibnls::Scenario::InequalityAudit);
  return run(sweep_cfg, ibnls::Scenario::Sweep);
}

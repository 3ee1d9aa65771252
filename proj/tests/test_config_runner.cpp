#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ibnls/error.hpp"
#include "ibnls/runner.hpp"

using namespace ibnls;
namespace fs = std::filesystem;

namespace {

const std::string kSmallRun = R"(
scenario = conserve
grid.dimension = 1
grid.points = 128
grid.half_width = 20
model.b = 0.3
model.nu = 1
init.amplitude = 0.5
init.center = 2
time.dt0 = 1e-4
time.t_end = 0.01
time.adaptive = false
output.cadence = 10
)";

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
    return e.what();
  }
  ADD_FAILURE() << "config accepted";
  return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos);
  return s.replace(pos, from.size(), to);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ibnls_runner_tests";
  fs::create_directories(dir);
  return dir / name;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(IBNLS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsFilled) {
  const auto c = parse_config_text(kSmallRun);
  EXPECT_EQ(c.scenario, Scenario::Conserve);
  EXPECT_EQ(c.cutoff.k, 8);
  EXPECT_EQ(c.time.cfl, 0.5);
  EXPECT_EQ(c.time.dt_floor, 1e-10);
  EXPECT_DOUBLE_EQ(c.model.epsilon, 0.5 * 40.0 / 128.0);
  EXPECT_EQ(c.model.dimension, 1);
  EXPECT_EQ(c.init.type, "gaussian");
}

TEST(Config, BOutsideRange) {
  const auto msg = message_of(replace(kSmallRun, "model.b = 0.3", "model.b = 0.6"));
  EXPECT_NE(msg.find("model.b"), std::string::npos) << msg;
}

TEST(Config, MissingEndTimeNamesKey) {
  const auto msg = message_of(replace(kSmallRun, "time.t_end = 0.01", ""));
  EXPECT_NE(msg.find("time.t_end"), std::string::npos) << msg;
}

TEST(Config, AllViolationsReported) {
  auto text = replace(kSmallRun, "grid.points = 128", "grid.points = 100");
  text = replace(text, "model.nu = 1", "model.nu = -1");
  text += "bogus.key = 3\n";
  const auto msg = message_of(text);
  EXPECT_NE(msg.find("grid"), std::string::npos) << msg;
  EXPECT_NE(msg.find("nu"), std::string::npos) << msg;
  EXPECT_NE(msg.find("bogus.key"), std::string::npos) << msg;
}

TEST(Config, ScenarioOverride) {
  const auto c = parse_config_text(kSmallRun + "cutoff.R = 3\n", Scenario::VirialCheck);
  EXPECT_EQ(c.scenario, Scenario::VirialCheck);
  EXPECT_EQ(to_string(Scenario::InequalityAudit), "inequality-audit");
  EXPECT_EQ(scenario_from_string("blowup"), Scenario::Blowup);
  EXPECT_FALSE(scenario_from_string("nope").has_value());
}

TEST(Amplitude, BisectionHitsTargetEnergy) {
  auto c = parse_config_text(kSmallRun);
  c.init.amplitude = 1.0;
  const auto grid = Grid::build(c.grid);
  const auto u0 = initial_field(c, grid);
  const auto fit = amplitude_for_energy(u0, c.model, -0.5);
  ComplexField u = u0;
  u *= fit.lambda;
  EXPECT_NEAR(energy(u, c.model), -0.5, 1e-8);
  EXPECT_NEAR(fit.energy, energy(u, c.model), 1e-12);
  EXPECT_GT(fit.lambda, 0.0);
}

TEST(Runner, ConserveRunPasses) {
  auto c = parse_config_text(kSmallRun);
  c.output.csv = scratch("conserve_small.csv").string();
  std::ostringstream log;
  const auto r = run_scenario(c, log);
  EXPECT_EQ(r.exit_code, kExitPass) << log.str();
  EXPECT_TRUE(fs::exists(c.output.csv));
  EXPECT_TRUE(fs::exists(c.output.csv + ".meta"));
  EXPECT_EQ(r.columns.front(), "t");
}

TEST(Runner, CsvIsDeterministic) {
  auto c = parse_config_text(kSmallRun);
  std::ostringstream log;
  c.output.csv = scratch("det_a.csv").string();
  run_scenario(c, log);
  c.output.csv = scratch("det_b.csv").string();
  run_scenario(c, log);
  const auto a = slurp(scratch("det_a.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(scratch("det_b.csv")));
}

TEST(Runner, PositiveEnergyBlowupRunIsNotAFailure) {
  auto text = replace(kSmallRun, "scenario = conserve", "scenario = blowup");
  auto c = parse_config_text(text);
  std::ostringstream log;
  const auto r = run_scenario(c, log);
  EXPECT_EQ(r.exit_code, kExitPass) << log.str();
  ASSERT_TRUE(r.verdict.has_value());
  EXPECT_EQ(r.verdict->kind, VerdictKind::NoBlowupDetected);
}

TEST(Runner, NonFiniteRunExitsThree) {
  auto text = replace(kSmallRun, "init.amplitude = 0.5", "init.amplitude = 1e300");
  auto c = parse_config_text(text);
  std::ostringstream log;
  EXPECT_EQ(run_scenario(c, log).exit_code, kExitNonFinite) << log.str();
}

TEST(Sweep, InvalidCellsAndRepeatability) {
  auto c = parse_config_text(R"(
scenario = sweep
grid.dimension = 1
grid.points = 64
grid.half_width = 20
time.dt0 = 1e-4
time.t_end = 0.002
sweep.amplitudes = 0.5, 0.5
sweep.b = 0.3, 0.6
sweep.nu = 1
)");
  const auto cells = run_sweep(c);
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[1].verdict, "ConfigInvalid");
  EXPECT_EQ(cells[3].verdict, "ConfigInvalid");
  EXPECT_EQ(cells[0].verdict, cells[2].verdict);
  EXPECT_EQ(cells[0].E0, cells[2].E0);
  EXPECT_EQ(cells[0].growth, cells[2].growth);
  EXPECT_EQ(cells[0].final_dt, cells[2].final_dt);
}

TEST(Cli, ExitCodes) {
  const auto bad = scratch("bad.cfg");
  {
    std::ofstream out(bad);
    out << replace(kSmallRun, "model.b = 0.3", "model.b = 0.6");
  }
  EXPECT_EQ(cli("run " + bad.string()), kExitConfig);
  EXPECT_EQ(cli("run " + scratch("missing.cfg").string()), kExitConfig);
  EXPECT_EQ(cli("frobnicate"), kExitConfig);
  const auto good = scratch("riccati.cfg");
  {
    std::ofstream out(good);
    out << "scenario = riccati\nriccati.count = 3\noutput.csv = " << scratch("riccati.csv").string()
        << "\n";
  }
  EXPECT_EQ(cli("run " + good.string()), kExitPass);
}

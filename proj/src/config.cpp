#include "ibnls/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ibnls/error.hpp"

namespace ibnls {

namespace {

constexpr std::pair<Scenario, std::string_view> kScenarioNames[] = {
    {Scenario::Conserve, "conserve"},
    {Scenario::VirialCheck, "virial-check"},
    {Scenario::CutoffAudit, "cutoff-audit"},
    {Scenario::InequalityAudit, "inequality-audit"},
    {Scenario::Blowup, "blowup"},
    {Scenario::Riccati, "riccati"},
    {Scenario::Sweep, "sweep"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

bool parse_long(const std::string& s, long long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoll(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

class Reader {
 public:
  Reader(const std::map<std::string, std::string>& kv, std::vector<std::string>& errs)
      : kv_(kv), errs_(errs) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return kv_.count(key) > 0;
  }

  void require(const std::string& key) {
    if (!has(key)) errs_.push_back("missing required key " + key);
  }

  void str(const std::string& key, std::string& out) {
    if (has(key)) out = kv_.at(key);
  }

  void num(const std::string& key, double& out) {
    if (!has(key)) return;
    if (!parse_double(kv_.at(key), out)) errs_.push_back(key + " is not a number");
  }

  template <typename I>
  void integer(const std::string& key, I& out) {
    if (!has(key)) return;
    long long v = 0;
    if (!parse_long(kv_.at(key), v) || v < 0)
      errs_.push_back(key + " is not a nonnegative integer");
    else
      out = static_cast<I>(v);
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const auto& v = kv_.at(key);
    if (v == "true" || v == "1" || v == "yes")
      out = true;
    else if (v == "false" || v == "0" || v == "no")
      out = false;
    else
      errs_.push_back(key + " is not a boolean");
  }

  void nums(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    std::vector<double> vals;
    for (const auto& item : split_list(kv_.at(key))) {
      double d = 0;
      if (!parse_double(item, d)) {
        errs_.push_back(key + " has a non-numeric entry '" + item + "'");
        return;
      }
      vals.push_back(d);
    }
    out = std::move(vals);
  }

  void ints(const std::string& key, std::vector<int>& out) {
    std::vector<double> vals;
    nums(key, vals);
    if (vals.empty()) return;
    out.clear();
    for (double v : vals) {
      if (v != static_cast<int>(v)) {
        errs_.push_back(key + " has a non-integer entry");
        return;
      }
      out.push_back(static_cast<int>(v));
    }
  }

  void strs(const std::string& key, std::vector<std::string>& out) {
    if (has(key)) out = split_list(kv_.at(key));
  }

  void unknown_keys() {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) errs_.push_back("unknown key " + k);
  }

 private:
  const std::map<std::string, std::string>& kv_;
  std::vector<std::string>& errs_;
  std::set<std::string> used_;
};

bool is_power_of_two(int m) { return m >= 8 && (m & (m - 1)) == 0; }

void check_writable(const std::string& key, const std::string& path,
                    std::vector<std::string>& errs) {
  if (path.empty()) return;
  namespace fs = std::filesystem;
  const fs::path p(path);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) errs.push_back(key + " directory " + dir.string() + " does not exist");
  if (fs::is_directory(p, ec)) errs.push_back(key + " = " + path + " is a directory");
}

bool evolves(Scenario s) {
  return s == Scenario::Conserve || s == Scenario::VirialCheck || s == Scenario::Blowup ||
         s == Scenario::Sweep;
}

}  // namespace

std::string_view to_string(Scenario s) {
  for (const auto& [v, name] : kScenarioNames)
    if (v == s) return name;
  return "unknown";
}

std::optional<Scenario> scenario_from_string(std::string_view s) {
  for (const auto& [v, name] : kScenarioNames)
    if (name == s) return v;
  return std::nullopt;
}

namespace {

std::vector<std::string> grid_violations(const GridSpec& grid) {
  std::vector<std::string> errs;
  if (grid.dimension < 1 || grid.dimension > 3) errs.push_back("grid.dimension must be 1, 2 or 3");
  if (!is_power_of_two(grid.points)) errs.push_back("grid.points must be a power of two >= 8");
  if (!(grid.half_width > 0.0)) errs.push_back("grid.half_width must be positive");
  return errs;
}

}  // namespace

std::vector<std::string> model_violations(const GridSpec& grid, const ModelParams& model) {
  auto errs = grid_violations(grid);
  const double bmax = std::min(grid.dimension / 2.0, 4.0);
  if (!(model.b > 0.0 && model.b < bmax)) {
    std::ostringstream os;
    os << "model.b = " << model.b << " violates 0 < b < min{N/2,4} with N = " << grid.dimension;
    errs.push_back(os.str());
  }
  if (!(model.nu >= 0.0)) errs.push_back("model.nu must be >= 0");
  if (!(model.epsilon > 0.0)) errs.push_back("model.epsilon must be positive");
  return errs;
}

RunConfig parse_config_text(const std::string& text, std::optional<Scenario> scenario) {
  std::vector<std::string> errs;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      errs.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (!kv.emplace(key, value).second) errs.push_back("duplicate key " + key);
  }

  RunConfig c;
  c.raw = kv;
  Reader r(kv, errs);

  std::string scen;
  r.str("scenario", scen);
  if (scenario) {
    c.scenario = *scenario;
  } else if (scen.empty()) {
    errs.push_back("missing required key scenario");
  } else if (auto s = scenario_from_string(scen)) {
    c.scenario = *s;
  } else {
    errs.push_back("unknown scenario '" + scen + "'");
  }
  const bool dynamic = evolves(c.scenario);
  const bool sweep = c.scenario == Scenario::Sweep;

  if (dynamic) {
    for (const char* k : {"grid.dimension", "grid.points", "grid.half_width", "time.t_end"})
      r.require(k);
    if (!sweep) {
      r.require("model.b");
      r.require("model.nu");
    } else {
      for (const char* k : {"sweep.amplitudes", "sweep.b", "sweep.nu"}) r.require(k);
    }
  }

  r.integer("grid.dimension", c.grid.dimension);
  r.integer("grid.points", c.grid.points);
  r.num("grid.half_width", c.grid.half_width);

  r.num("model.b", c.model.b);
  r.num("model.nu", c.model.nu);
  bool eps_given = r.has("model.epsilon");
  r.num("model.epsilon", c.model.epsilon);
  r.boolean("model.focusing", c.model.focusing);
  r.num("model.coupling", c.model.coupling);
  std::string form = "standard";
  r.str("model.energy_form", form);
  if (form == "printed")
    c.energy_form = EnergyForm::Printed;
  else if (form != "standard")
    errs.push_back("model.energy_form must be standard or printed");
  c.model.dimension = c.grid.dimension;
  if (!eps_given && c.grid.points > 0 && c.grid.half_width > 0.0)
    c.model.epsilon = 0.5 * c.grid.spacing();

  r.str("init.type", c.init.type);
  r.num("init.amplitude", c.init.amplitude);
  r.num("init.width", c.init.width);
  r.num("init.radius", c.init.radius);
  r.nums("init.center", c.init.center);
  r.nums("init.momentum", c.init.momentum);
  r.str("init.checkpoint", c.init.checkpoint);
  if (r.has("init.target_energy")) {
    double e = 0.0;
    r.num("init.target_energy", e);
    c.init.target_energy = e;
  }

  r.num("time.dt0", c.time.dt0);
  r.num("time.t_end", c.time.t_end);
  r.num("time.dt_floor", c.time.dt_floor);
  r.num("time.cfl", c.time.cfl);
  r.boolean("time.adaptive", c.time.adaptive);
  r.integer("time.max_steps", c.time.max_steps);
  r.num("time.dealias_limit", c.time.dealias_limit);

  // Evolving runs only get virial columns for radii the config names.
  if (dynamic && !r.has("cutoff.R")) c.cutoff.R.clear();
  r.nums("cutoff.R", c.cutoff.R);
  r.integer("cutoff.k", c.cutoff.k);
  r.integer("cutoff.oversample", c.cutoff.oversample);

  r.str("output.csv", c.output.csv);
  r.str("output.checkpoint", c.output.checkpoint);
  r.integer("output.cadence", c.output.cadence);
  r.integer("output.checkpoint_every", c.output.checkpoint_every);

  r.num("thresholds.growth", c.thresholds.verdict.growth);
  r.num("thresholds.delta_fit", c.thresholds.verdict.delta_fit);
  r.num("thresholds.fit_residual", c.thresholds.verdict.fit_residual);
  r.num("thresholds.mass_drift", c.thresholds.mass_drift);
  r.num("thresholds.energy_drift", c.thresholds.energy_drift);
  r.num("thresholds.virial_residual", c.thresholds.virial_residual);
  r.num("thresholds.resolved_energy_drift", c.thresholds.resolved_energy_drift);
  r.num("thresholds.morawetz_tol", c.thresholds.morawetz_tol);
  r.num("thresholds.order_low", c.thresholds.order_low);
  r.num("thresholds.order_high", c.thresholds.order_high);
  c.thresholds.verdict.dt_floor = c.time.dt_floor;

  r.num("virial.delta", c.virial.delta);
  r.boolean("virial.calibrate", c.virial.calibrate);
  r.boolean("conserve.order_check", c.conserve.order_check);

  r.nums("audit.b", c.audit.b);
  r.ints("audit.dimensions", c.audit.dimensions);
  r.nums("audit.phi2_R", c.audit.phi2_R);
  r.integer("audit.count", c.audit.count);
  r.integer("audit.gn_count", c.audit.gn_count);
  r.nums("audit.exterior_R", c.audit.exterior_R);
  r.integer("audit.seed", c.audit.seed);
  r.num("audit.b_low", c.audit.b_low);
  r.num("audit.b_high", c.audit.b_high);
  r.strs("audit.corpus", c.audit.corpus);

  r.nums("riccati.c", c.riccati.c);
  r.nums("riccati.y0", c.riccati.y0);
  r.integer("riccati.count", c.riccati.count);
  r.integer("riccati.seed", c.riccati.seed);
  r.num("riccati.escape", c.riccati.escape);
  r.num("riccati.tolerance", c.riccati.tolerance);

  r.nums("sweep.amplitudes", c.sweep.amplitudes);
  r.nums("sweep.b", c.sweep.b);
  r.nums("sweep.nu", c.sweep.nu);

  r.unknown_keys();

  if (dynamic) {
    if (sweep) {
      // b and nu are checked per cell.
      for (const auto& e : grid_violations(c.grid)) errs.push_back(e);
    } else {
      for (const auto& e : model_violations(c.grid, c.model)) errs.push_back(e);
    }
    if (!(c.time.dt0 > 0.0)) errs.push_back("time.dt0 must be positive");
    if (kv.count("time.t_end") && !(c.time.t_end > 0.0)) errs.push_back("time.t_end must be positive");
    if (!(c.time.dt_floor > 0.0)) errs.push_back("time.dt_floor must be positive");
    if (!(c.time.cfl > 0.0)) errs.push_back("time.cfl must be positive");
    if (!(c.time.dealias_limit > 0.0)) errs.push_back("time.dealias_limit must be positive");
    if (c.init.type != "gaussian" && c.init.type != "ring" && c.init.type != "checkpoint")
      errs.push_back("init.type must be gaussian, ring or checkpoint");
    if (!(c.init.width > 0.0)) errs.push_back("init.width must be positive");
    const auto n = static_cast<std::size_t>(c.grid.dimension);
    if (!c.init.center.empty() && c.init.center.size() != n)
      errs.push_back("init.center needs grid.dimension entries");
    if (!c.init.momentum.empty() && c.init.momentum.size() != n)
      errs.push_back("init.momentum needs grid.dimension entries");
    if (c.init.type == "checkpoint" && !std::filesystem::exists(c.init.checkpoint))
      errs.push_back("init.checkpoint file '" + c.init.checkpoint + "' does not exist");
    if (!(c.virial.delta > 0.0)) errs.push_back("virial.delta must be positive");
    for (double R : c.cutoff.R)
      if (!(2.0 * R < c.grid.half_width))
        errs.push_back("cutoff.R entries need 2R < grid.half_width so phi_R is flat at the box edge");
  }
  if (c.output.cadence < 1) errs.push_back("output.cadence must be >= 1");
  if (c.cutoff.k < 4) errs.push_back("cutoff.k must be >= 4");
  if (c.cutoff.oversample < 1) errs.push_back("cutoff.oversample must be >= 1");
  for (double R : c.cutoff.R)
    if (!(R > 0.0)) errs.push_back("cutoff.R entries must be positive");
  if ((c.scenario == Scenario::VirialCheck || c.scenario == Scenario::CutoffAudit) &&
      c.cutoff.R.empty())
    errs.push_back("cutoff.R must list at least one radius");
  if (c.riccati.c.size() != c.riccati.y0.size())
    errs.push_back("riccati.c and riccati.y0 must have the same length");
  if (c.audit.count < 1 || c.audit.gn_count < 1) errs.push_back("audit counts must be >= 1");
  for (const auto& p : c.audit.corpus)
    if (!std::filesystem::exists(p)) errs.push_back("audit.corpus file '" + p + "' does not exist");
  check_writable("output.csv", c.output.csv, errs);
  check_writable("output.checkpoint", c.output.checkpoint, errs);

  if (!errs.empty()) {
    std::string msg;
    for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + e;
    throw Error(ErrorKind::ConfigInvalid, msg);
  }
  return c;
}

RunConfig parse_config(const std::string& path, std::optional<Scenario> scenario) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), scenario);
}

}  // namespace ibnls

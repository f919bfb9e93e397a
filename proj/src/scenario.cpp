#include "mosqopt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mosqopt/errors.hpp"
#include "mosqopt/io.hpp"
#include "mosqopt/stability.hpp"
#include "mosqopt/version.hpp"

namespace mosqopt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

double require_number(const json& obj, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing required key '" + key + "'");
  if (!obj[key].is_number()) throw ConfigError("'" + key + "' must be a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("'" + key + "' must be a number");
  return obj[key].get<double>();
}

// Applies key=value with dotted paths; the value is parsed as JSON when it
// parses, kept as a string otherwise.
void apply_override(json& doc, const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override must look like key=value: " + spec);
  }
  std::string path = spec.substr(0, eq);
  std::string raw = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json* node = &doc;
  std::istringstream is(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(is, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("empty override path");
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    node = &(*node)[parts[i]];
  }
  (*node)[parts.back()] = value;
}

template <typename Params>
void read_param_fields(const json& block, Params& p);

template <>
void read_param_fields<SitParams>(const json& block, SitParams& p) {
  reject_unknown_keys(block,
                      {"beta_E", "gamma", "tau_E", "delta_E", "beta_F",
                       "delta_F", "delta_s", "nu"},
                      "params");
  p.beta_E = number_or(block, "beta_E", p.beta_E);
  p.gamma = number_or(block, "gamma", p.gamma);
  p.tau_E = number_or(block, "tau_E", p.tau_E);
  p.delta_E = number_or(block, "delta_E", p.delta_E);
  p.beta_F = number_or(block, "beta_F", p.beta_F);
  p.delta_F = number_or(block, "delta_F", p.delta_F);
  p.delta_s = number_or(block, "delta_s", p.delta_s);
  p.nu = number_or(block, "nu", p.nu);
}

template <>
void read_param_fields<WolParams>(const json& block, WolParams& p) {
  reject_unknown_keys(block,
                      {"beta_E", "tau_E", "delta_E", "beta_F", "delta_F", "nu",
                       "s_h", "eta", "delta"},
                      "params");
  p.beta_E = number_or(block, "beta_E", p.beta_E);
  p.tau_E = number_or(block, "tau_E", p.tau_E);
  p.delta_E = number_or(block, "delta_E", p.delta_E);
  p.beta_F = number_or(block, "beta_F", p.beta_F);
  p.delta_F = number_or(block, "delta_F", p.delta_F);
  p.nu = number_or(block, "nu", p.nu);
  p.s_h = number_or(block, "s_h", p.s_h);
  p.eta = number_or(block, "eta", p.eta);
  p.delta = number_or(block, "delta", p.delta);
}

json params_to_json(const SitParams& p) {
  return json{{"beta_E", p.beta_E}, {"gamma", p.gamma},     {"tau_E", p.tau_E},
              {"delta_E", p.delta_E}, {"beta_F", p.beta_F}, {"delta_F", p.delta_F},
              {"delta_s", p.delta_s}, {"nu", p.nu}};
}

json params_to_json(const WolParams& p) {
  return json{{"beta_E", p.beta_E}, {"tau_E", p.tau_E}, {"delta_E", p.delta_E},
              {"beta_F", p.beta_F}, {"delta_F", p.delta_F}, {"nu", p.nu},
              {"s_h", p.s_h},       {"eta", p.eta},       {"delta", p.delta}};
}

std::vector<double> read_control_csv(const std::string& path, int n_intervals) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open control CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty control CSV: " + path);
  // locate the u column in the header
  int u_col = -1, col = 0;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
      if (cell == "u" || cell == "u\r") u_col = col;
      ++col;
    }
  }
  if (u_col < 0) throw ConfigError("control CSV has no 'u' column: " + path);
  std::vector<double> values;
  while (std::getline(in, line) && static_cast<int>(values.size()) < n_intervals) {
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c <= u_col; ++c) {
      if (!std::getline(ls, cell, ',')) {
        throw ConfigError("short row in control CSV: " + path);
      }
    }
    values.push_back(std::stod(cell));
  }
  if (static_cast<int>(values.size()) < n_intervals) {
    throw ConfigError("control CSV has fewer rows than mesh intervals");
  }
  return values;
}

}  // namespace

ControlProblem ScenarioConfig::problem() const {
  return model == Model::kSit
             ? ControlProblem::sit(sit, grid(), Ubar, C)
             : ControlProblem::wolbachia(wol, grid(), Ubar, C);
}

AssumptionReport ScenarioConfig::assumptions() const {
  ReleaseBounds rb{T, C, Ubar};
  return model == Model::kSit ? check_assumptions(sit, rb)
                              : check_assumptions(wol, rb);
}

ScenarioConfig scenario_from_json(json doc,
                                  const std::vector<std::string>& overrides) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  // A summary document embeds the config it was produced from.
  if (doc.contains("config") && doc["config"].is_object()) {
    doc = doc["config"];
  }
  for (const auto& ov : overrides) apply_override(doc, ov);

  reject_unknown_keys(doc,
                      {"model", "params", "calibration", "T", "N", "C", "Ubar",
                       "optimizer", "output_dir", "control"},
                      "config");

  ScenarioConfig cfg;
  if (!doc.contains("model") || !doc["model"].is_string()) {
    throw ConfigError("missing required key 'model' (\"sit\" or \"wolbachia\")");
  }
  const std::string model_name = doc["model"].get<std::string>();
  if (model_name == "sit") {
    cfg.model = Model::kSit;
  } else if (model_name == "wolbachia") {
    cfg.model = Model::kWolbachia;
  } else {
    throw ConfigError("model must be \"sit\" or \"wolbachia\"");
  }

  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw ConfigError("'params' must be an object");
    if (cfg.model == Model::kSit) {
      read_param_fields(doc["params"], cfg.sit);
    } else {
      read_param_fields(doc["params"], cfg.wol);
    }
  }

  // Capacity: derived from a target female density unless given outright.
  double k_resolved = 0.0;
  json calibration_out;
  {
    json cal = doc.contains("calibration") ? doc["calibration"] : json::object();
    if (!cal.is_object()) throw ConfigError("'calibration' must be an object");
    // resolved_K is informational (emitted into summaries), accepted back in.
    reject_unknown_keys(cal, {"F_target", "K", "resolved_K"}, "calibration");
    if (cal.contains("K") && cal.contains("F_target")) {
      throw ConfigError("calibration: give either F_target or K, not both");
    }
    if (cal.contains("K")) {
      k_resolved = require_number(cal, "K");
      calibration_out["K"] = k_resolved;
    } else {
      const double f_target = number_or(cal, "F_target", 5106.0);
      k_resolved = cfg.model == Model::kSit
                       ? derive_carrying_capacity(f_target, cfg.sit)
                       : derive_carrying_capacity(f_target, cfg.wol);
      calibration_out["F_target"] = f_target;
    }
  }
  cfg.sit.K = k_resolved;
  cfg.wol.K = k_resolved;

  cfg.T = require_number(doc, "T");
  if (!(cfg.T > 0.0)) throw ConfigError("'T' must be > 0");
  cfg.C = require_number(doc, "C");
  if (!(cfg.C >= 0.0)) throw ConfigError("'C' must be >= 0");
  cfg.Ubar = require_number(doc, "Ubar");
  if (!(cfg.Ubar >= 0.0)) throw ConfigError("'Ubar' must be >= 0");
  cfg.N = doc.contains("N") ? doc["N"].get<int>() : default_intervals(cfg.T);
  if (cfg.N < 1) throw ConfigError("'N' must be >= 1");

  if (doc.contains("optimizer")) {
    const json& opt = doc["optimizer"];
    if (!opt.is_object()) throw ConfigError("'optimizer' must be an object");
    reject_unknown_keys(opt, {"max_iter", "tol", "starts", "seed"}, "optimizer");
    cfg.optimizer.max_iter =
        static_cast<int>(number_or(opt, "max_iter", cfg.optimizer.max_iter));
    cfg.optimizer.tol = number_or(opt, "tol", cfg.optimizer.tol);
    cfg.optimizer.starts =
        static_cast<int>(number_or(opt, "starts", cfg.optimizer.starts));
    cfg.optimizer.seed = static_cast<std::uint64_t>(
        number_or(opt, "seed", static_cast<double>(cfg.optimizer.seed)));
    if (cfg.optimizer.max_iter < 0) throw ConfigError("max_iter must be >= 0");
    if (cfg.optimizer.starts < 1) throw ConfigError("starts must be >= 1");
    if (!(cfg.optimizer.tol > 0)) throw ConfigError("tol must be > 0");
  }

  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ConfigError("'output_dir' must be a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }

  json control_out;
  if (doc.contains("control")) {
    const json& ctl = doc["control"];
    if (!ctl.is_object()) throw ConfigError("'control' must be an object");
    reject_unknown_keys(ctl, {"type", "value", "values", "path"}, "control");
    const std::string type = ctl.value("type", std::string("constant"));
    if (type == "constant") {
      cfg.control_kind = ScenarioConfig::ControlKind::kConstant;
      cfg.control_value = require_number(ctl, "value");
      control_out = {{"type", "constant"}, {"value", cfg.control_value}};
    } else if (type == "schedule") {
      cfg.control_kind = ScenarioConfig::ControlKind::kSchedule;
      if (!ctl.contains("values") || !ctl["values"].is_array()) {
        throw ConfigError("control schedule needs a 'values' array");
      }
      cfg.control_values = ctl["values"].get<std::vector<double>>();
      control_out = {{"type", "schedule"}, {"values", cfg.control_values}};
    } else if (type == "csv") {
      cfg.control_kind = ScenarioConfig::ControlKind::kCsv;
      if (!ctl.contains("path") || !ctl["path"].is_string()) {
        throw ConfigError("control csv needs a 'path' string");
      }
      cfg.control_csv = ctl["path"].get<std::string>();
      control_out = {{"type", "csv"}, {"path", cfg.control_csv}};
    } else {
      throw ConfigError("control type must be constant, schedule or csv");
    }
  }

  cfg.warnings = cfg.model == Model::kSit ? cfg.sit.validate() : cfg.wol.validate();

  cfg.resolved = json{
      {"model", model_name},
      {"params", cfg.model == Model::kSit ? params_to_json(cfg.sit)
                                          : params_to_json(cfg.wol)},
      {"calibration", calibration_out},
      {"T", cfg.T},
      {"N", cfg.N},
      {"C", cfg.C},
      {"Ubar", cfg.Ubar},
      {"optimizer",
       {{"max_iter", cfg.optimizer.max_iter},
        {"tol", cfg.optimizer.tol},
        {"starts", cfg.optimizer.starts},
        {"seed", cfg.optimizer.seed}}},
      {"output_dir", cfg.output_dir},
  };
  cfg.resolved["calibration"]["resolved_K"] = k_resolved;
  if (!control_out.is_null()) cfg.resolved["control"] = control_out;
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return scenario_from_json(std::move(doc), overrides);
}

namespace {

json bounds_to_json(const BoundsReport& r) {
  json out{{"pass", r.pass()},
           {"nodes_checked", r.nodes_checked},
           {"max_excess", r.max_excess}};
  json v = json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"node", x.node},
                 {"bound", x.bound},
                 {"value", x.value},
                 {"limit", x.limit}});
  }
  out["violations"] = v;
  return out;
}

json base_summary(const ScenarioConfig& cfg) {
  json s;
  s["config"] = cfg.resolved;
  s["version"] = kVersion;
  s["seed"] = cfg.optimizer.seed;
  s["assumption_report"] = assumption_report_json(cfg.assumptions());
  s["parameter_warnings"] = cfg.warnings;
  return s;
}

ControlGrid simulate_control(const ScenarioConfig& cfg) {
  TimeGrid grid = cfg.grid();
  std::vector<double> values;
  switch (cfg.control_kind) {
    case ScenarioConfig::ControlKind::kZero:
      values.assign(grid.N(), 0.0);
      break;
    case ScenarioConfig::ControlKind::kConstant:
      values.assign(grid.N(), cfg.control_value);
      break;
    case ScenarioConfig::ControlKind::kSchedule:
      values = cfg.control_values;
      if (static_cast<int>(values.size()) != grid.N()) {
        throw ConfigError("control schedule length must equal N");
      }
      break;
    case ScenarioConfig::ControlKind::kCsv:
      values = read_control_csv(cfg.control_csv, grid.N());
      break;
  }
  // simulate explores arbitrary schedules; the rate cap stays physical but
  // the budget is informational here (flagged in the summary if exceeded).
  double sum = 0.0;
  for (double v : values) {
    if (v < 0.0 || v > cfg.Ubar) {
      throw ConfigError("control values must lie in [0, Ubar]");
    }
    sum += v * grid.dt();
  }
  const double effective_budget = std::fmax(cfg.C, sum * (1.0 + 1e-12));
  return ControlGrid(grid, std::move(values), cfg.Ubar, effective_budget);
}

}  // namespace

SimulateResult run_simulate(const ScenarioConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  ControlGrid u = simulate_control(cfg);

  SimulateResult res{
      cfg.model == Model::kSit
          ? integrate_sit(cfg.sit, cfg.problem().initial_state(), u)
          : integrate_wol(cfg.wol, cfg.problem().initial_state(), u),
      {}, {}, {}};
  res.bounds = cfg.model == Model::kSit ? verify_bounds(res.trajectory, cfg.sit)
                                        : verify_bounds(res.trajectory, cfg.wol);

  const fs::path dir(cfg.output_dir);
  write_trajectory_csv((dir / "trajectory.csv").string(), res.trajectory);
  write_trajectory_dat((dir / "trajectory.dat").string(), res.trajectory);
  write_simulation_svg((dir / "simulation.svg").string(), res.trajectory);

  res.summary = base_summary(cfg);
  res.summary["total_release"] = total_release(u);
  res.summary["budget_exceeded"] = total_release(u) > cfg.C * (1.0 + 1e-9);
  res.summary["bounds"] = bounds_to_json(res.bounds);
  {
    std::ofstream bf(dir / "bounds.json", std::ios::binary);
    bf << res.summary["bounds"].dump(2) << '\n';
  }
  {
    std::ofstream sf(dir / "summary.json", std::ios::binary);
    sf << res.summary.dump(2) << '\n';
  }
  for (const char* f : {"trajectory.csv", "trajectory.dat", "simulation.svg",
                        "bounds.json", "summary.json"}) {
    res.files_written.push_back((dir / f).string());
  }
  return res;
}

OptimizeResult run_optimize(const ScenarioConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  ControlProblem pb = cfg.problem();
  OptimalSolution sol = solve(pb, cfg.optimizer);

  const fs::path dir(cfg.output_dir);
  write_control_csv((dir / "control.csv").string(), sol.control);
  write_control_dat((dir / "control.dat").string(), sol.control);
  write_trajectory_csv((dir / "trajectory.csv").string(), sol.trajectory);
  write_trajectory_dat((dir / "trajectory.dat").string(), sol.trajectory);
  write_solution_svg((dir / "solution.svg").string(), sol.trajectory);

  json summary = base_summary(cfg);
  summary["cost"] = sol.cost;
  summary["budget_used"] = sol.diagnostics.budget_used;
  summary["budget_ratio"] = sol.diagnostics.budget_ratio;
  summary["tail_zero_time"] = sol.diagnostics.tail_zero_time;
  summary["bang_bang_fraction"] = sol.diagnostics.bang_bang_fraction;
  summary["iterations"] = sol.iterations;
  summary["converged"] = sol.converged;
  summary["projected_gradient_norm"] = sol.projected_gradient_norm;
  summary["best_start"] = sol.best_start;
  json per_start = json::array();
  for (const auto& s : sol.starts) per_start.push_back(s.cost);
  summary["per_start_costs"] = per_start;
  json start_logs = json::array();
  for (const auto& s : sol.starts) {
    start_logs.push_back({{"index", s.index},
                          {"init", s.init},
                          {"cost", s.cost},
                          {"iterations", s.iterations},
                          {"stationarity", s.stationarity},
                          {"converged", s.converged},
                          {"diverged", s.diverged}});
  }
  summary["start_logs"] = start_logs;
  summary["diagnostics"] = {
      {"lambda_hat", sol.diagnostics.lambda_hat},
      {"xi", sol.diagnostics.xi},
      {"complementarity", sol.diagnostics.complementarity},
      {"transversality_residual", sol.diagnostics.transversality_residual},
      {"switch_violations_plus", sol.diagnostics.switch_violations_plus},
      {"switch_violations_minus", sol.diagnostics.switch_violations_minus},
      {"release_time_centroid", release_time_centroid(sol.control)},
  };
  {
    std::ofstream sf(dir / "summary.json", std::ios::binary);
    sf << summary.dump(2) << '\n';
  }

  OptimizeResult res{std::move(sol), std::move(summary), {}};
  for (const char* f : {"control.csv", "control.dat", "trajectory.csv",
                        "trajectory.dat", "solution.svg", "summary.json"}) {
    res.files_written.push_back((dir / f).string());
  }
  return res;
}

json assumption_report_json(const AssumptionReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back(
        {{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}});
  }
  return json{{"all_pass", report.all_pass()}, {"checks", checks}};
}

json equilibria_report(const ScenarioConfig& cfg) {
  std::vector<Equilibrium> eqs;
  if (cfg.model == Model::kSit) {
    for (auto& e : sit_equilibria(cfg.sit)) eqs.push_back(classify(e, cfg.sit));
  } else {
    for (auto& e : wol_equilibria(cfg.wol)) eqs.push_back(classify(e, cfg.wol));
  }
  const auto cols = trajectory_columns(cfg.model == Model::kSit
                                           ? Model::kSit
                                           : Model::kWolbachia);
  json list = json::array();
  for (const auto& e : eqs) {
    json state;
    for (int i = 0; i < e.state.dim(); ++i) state[cols[i + 1]] = e.state[i];
    json eig = json::array();
    for (const auto& l : e.eigenvalues) eig.push_back({l.real(), l.imag()});
    list.push_back({{"label", to_string(e.kind)},
                    {"state", state},
                    {"residual", e.residual},
                    {"residual_ok", e.residual_ok},
                    {"stability", to_string(e.stability)},
                    {"eigenvalues", eig},
                    {"closed_form_mismatch", e.closed_form_mismatch},
                    {"classified_by_surrogate", e.classified_by_surrogate},
                    {"flags", e.flags}});
  }
  return json{{"model", cfg.model == Model::kSit ? "sit" : "wolbachia"},
              {"equilibria", list},
              {"assumption_report", assumption_report_json(cfg.assumptions())}};
}

std::string render_equilibria_text(const json& report) {
  std::ostringstream os;
  const std::string model_name = report["model"].get<std::string>();
  const auto cols =
      trajectory_columns(model_name == "sit" ? Model::kSit : Model::kWolbachia);
  os << "model: " << model_name << "\n";
  for (const auto& e : report["equilibria"]) {
    os << "\n" << e["label"].get<std::string>() << "  ["
       << e["stability"].get<std::string>() << "]\n";
    os << "  state:";
    for (size_t i = 1; i + 1 < cols.size(); ++i) {
      os << "  " << cols[i] << " = " << e["state"][cols[i]].get<double>();
    }
    os << "\n  residual: " << e["residual"].get<double>()
       << (e["residual_ok"].get<bool>() ? " (ok)" : " (FAILED)") << "\n";
    os << "  eigenvalues:";
    for (const auto& l : e["eigenvalues"]) {
      os << "  " << l[0].get<double>();
      if (l[1].get<double>() != 0.0) os << (l[1].get<double>() > 0 ? "+" : "") << l[1].get<double>() << "i";
    }
    os << "\n";
    for (const auto& f : e["flags"]) os << "  note: " << f.get<std::string>() << "\n";
  }
  os << "\n" << render_assumptions_text(report["assumption_report"]);
  return os.str();
}

std::string render_assumptions_text(const json& report) {
  std::ostringstream os;
  os << "assumptions: " << (report["all_pass"].get<bool>() ? "all hold" : "FAILURES")
     << "\n";
  for (const auto& c : report["checks"]) {
    os << (c["pass"].get<bool>() ? "  [ok]   " : "  [FAIL] ")
       << c["name"].get<std::string>() << "   (" << c["lhs"].get<double>()
       << " vs " << c["rhs"].get<double>() << ")\n";
  }
  return os.str();
}

}  // namespace mosqopt

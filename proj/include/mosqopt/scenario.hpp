#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mosqopt/integrate.hpp"
#include "mosqopt/model.hpp"
#include "mosqopt/optimizer.hpp"

namespace mosqopt {

// A fully resolved run description: model, parameters, mesh, admissible
// set, optimizer options and output location. Built from a JSON config
// (strict: unknown keys are rejected) plus dotted-path overrides; every
// default is materialized into `resolved` so the emitted record reproduces
// the run exactly.
struct ScenarioConfig {
  Model model = Model::kSit;
  SitParams sit;
  WolParams wol;
  double T = 0.0;
  int N = 0;
  double C = 0.0;
  double Ubar = 0.0;
  SolveOptions optimizer;
  std::string output_dir = "out";

  enum class ControlKind { kZero, kConstant, kSchedule, kCsv };
  ControlKind control_kind = ControlKind::kZero;
  double control_value = 0.0;
  std::vector<double> control_values;
  std::string control_csv;

  std::vector<std::string> warnings;  // parameter interval notes
  nlohmann::json resolved;

  TimeGrid grid() const { return TimeGrid(T, N); }
  ControlProblem problem() const;
  AssumptionReport assumptions() const;
};

// Parses a config object. `overrides` are key=value pairs with dotted
// paths (params.gamma=0.5); values are parsed as JSON with a string
// fallback. Accepts a previously emitted summary document (its "config"
// block is used). Throws ConfigError on malformed input or unknown keys.
ScenarioConfig scenario_from_json(nlohmann::json doc,
                                  const std::vector<std::string>& overrides = {});
ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::string>& overrides = {});

struct SimulateResult {
  Trajectory trajectory;
  BoundsReport bounds;
  nlohmann::json summary;
  std::vector<std::string> files_written;
};

struct OptimizeResult {
  OptimalSolution solution;
  nlohmann::json summary;
  std::vector<std::string> files_written;
};

// Runners behind the CLI subcommands; they write the documented artifact
// files into output_dir and return the in-memory results.
SimulateResult run_simulate(const ScenarioConfig& cfg);
OptimizeResult run_optimize(const ScenarioConfig& cfg);

// Reports for the `equilibria` and `check` subcommands.
nlohmann::json equilibria_report(const ScenarioConfig& cfg);
nlohmann::json assumption_report_json(const AssumptionReport& report);
std::string render_equilibria_text(const nlohmann::json& report);
std::string render_assumptions_text(const nlohmann::json& report);

}  // namespace mosqopt

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mosqopt/errors.hpp"
#include "mosqopt/scenario.hpp"
#include "mosqopt/version.hpp"

namespace {

// Exit codes (stable): 0 success, 1 runtime error, 2 config error,
// 3 integration divergence, 4 optimization failure, 5 bound violations
// under --strict.
enum ExitCode {
  kOk = 0,
  kRuntime = 1,
  kConfig = 2,
  kDivergence = 3,
  kOptimizationFailed = 4,
  kBoundsViolated = 5,
};

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "scenario config (JSON)")
      ->required();
  cmd->add_option("--set", args.overrides,
                  "override a config key (dotted path, e.g. params.gamma=0.5)");
  cmd->add_option("--out", args.output_dir, "override output_dir");
}

mosqopt::ScenarioConfig load(const CommonArgs& args) {
  auto overrides = args.overrides;
  if (!args.output_dir.empty()) {
    overrides.push_back("output_dir=\"" + args.output_dir + "\"");
  }
  mosqopt::ScenarioConfig cfg = mosqopt::load_scenario(args.config_path, overrides);
  for (const auto& w : cfg.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  return cfg;
}

}  // namespace

namespace {

int run(int argc, char** argv) {
  CLI::App app{"release-schedule simulation and optimization for reduced "
               "mosquito-population models"};
  app.set_version_flag("--version", mosqopt::kVersion);
  app.require_subcommand(1);

  CommonArgs sim_args, opt_args, eq_args, chk_args;
  bool strict = false, eq_json = false, chk_json = false;

  CLI::App* sim = app.add_subcommand("simulate", "integrate a given release schedule");
  add_common(sim, sim_args);
  sim->add_flag("--strict", strict, "exit nonzero on trajectory bound violations");

  CLI::App* opt = app.add_subcommand("optimize", "solve for the optimal release schedule");
  add_common(opt, opt_args);
  int starts = 0;
  opt->add_option("--starts", starts, "number of optimizer starts (overrides config)");

  CLI::App* eq = app.add_subcommand("equilibria", "list equilibria, stability and assumptions");
  add_common(eq, eq_args);
  eq->add_flag("--json", eq_json, "machine-readable output");

  CLI::App* chk = app.add_subcommand("check", "evaluate the model assumptions only");
  add_common(chk, chk_args);
  chk->add_flag("--json", chk_json, "machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      auto cfg = load(sim_args);
      auto res = mosqopt::run_simulate(cfg);
      for (const auto& f : res.files_written) std::cout << "wrote " << f << "\n";
      if (!res.bounds.pass()) {
        std::cerr << "bound violations: " << res.bounds.violations.size()
                  << " (max excess " << res.bounds.max_excess << ")\n";
        if (strict) return kBoundsViolated;
      }
      return kOk;
    }
    if (opt->parsed()) {
      if (starts > 0) {
        opt_args.overrides.push_back("optimizer.starts=" + std::to_string(starts));
      }
      auto cfg = load(opt_args);
      auto res = mosqopt::run_optimize(cfg);
      for (const auto& f : res.files_written) std::cout << "wrote " << f << "\n";
      std::cout << "cost " << res.solution.cost << ", budget ratio "
                << res.solution.diagnostics.budget_ratio << ", iterations "
                << res.solution.iterations << "\n";
      return kOk;
    }
    if (eq->parsed()) {
      auto cfg = load(eq_args);
      auto report = mosqopt::equilibria_report(cfg);
      if (eq_json) {
        std::cout << report.dump(2) << "\n";
      } else {
        std::cout << mosqopt::render_equilibria_text(report);
      }
      return kOk;
    }
    if (chk->parsed()) {
      auto cfg = load(chk_args);
      auto report = mosqopt::assumption_report_json(cfg.assumptions());
      if (chk_json) {
        std::cout << report.dump(2) << "\n";
      } else {
        std::cout << mosqopt::render_assumptions_text(report);
      }
      return kOk;
    }
  } catch (const mosqopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const mosqopt::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const mosqopt::OptimizationFailureError& e) {
    std::cerr << "optimization failed: " << e.what() << "\n";
    for (const auto& log : e.start_logs()) std::cerr << "  start: " << log << "\n";
    return kOptimizationFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  } catch (...) {
    std::cerr << "error: unknown failure\n";
    return kRuntime;
  }
}

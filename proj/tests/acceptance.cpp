// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// required criterion fails. Qualitative reproductions (bang-bang share,
// threshold timing) print WARN instead of FAIL where the underlying claim
// is observational.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mosqopt/control.hpp"
#include "mosqopt/integrate.hpp"
#include "mosqopt/model.hpp"
#include "mosqopt/optimizer.hpp"
#include "mosqopt/scenario.hpp"
#include "mosqopt/stability.hpp"

#include "qp_oracle.hpp"

using namespace mosqopt;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

struct Outcome {
  bool pass = false;
  bool warn_only = false;  // report WARN instead of FAIL
  std::string detail;
};

void run_criterion(int number, const std::string& name, double time_limit_s,
                   const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0.0 && secs > time_limit_s) {
    out.pass = false;
    out.warn_only = false;
    out.detail += (out.detail.empty() ? "" : "; ") + std::string("over the ") +
                  fmt(time_limit_s) + "s budget";
  }
  const char* tag = out.pass ? "PASS" : (out.warn_only ? "WARN" : "FAIL");
  if (!out.pass && !out.warn_only) ++g_failures;
  std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", tag, number, name.c_str(),
              secs, out.detail.empty() ? "" : " -- ", out.detail.c_str());
  std::fflush(stdout);
}

const Equilibrium& pick(const std::vector<Equilibrium>& eqs, EquilibriumKind k) {
  for (const auto& e : eqs)
    if (e.kind == k) return e;
  throw Error("equilibrium kind not found");
}

// Shared scenario results so bounds (criterion 9) can audit every run.
struct SolvedScenario {
  std::string name;
  Model model;
  OptimalSolution sol;
};
std::vector<SolvedScenario> g_scenarios;

SitParams calibrated_sit() {
  SitParams p;
  p.K = derive_carrying_capacity(5106.0, p);
  return p;
}

WolParams calibrated_wol() {
  WolParams p;
  p.K = derive_carrying_capacity(5106.0, p);
  return p;
}

Outcome criterion_sit_equilibrium() {
  SitParams p = calibrated_sit();
  auto eqs = sit_equilibria(p);
  const Equilibrium& pos = classify(pick(eqs, EquilibriumKind::kNonExtinction), p);
  Outcome o;
  const bool values_ok = std::fabs(pos.state[0] - 40848.0) < 1e-6 &&
                         std::fabs(pos.state[1] - 5106.0) < 1e-6 &&
                         pos.state[2] == 0.0;
  const bool residual_ok =
      pos.residual < 1e-9 * std::fmax(1.0, pos.state.max_abs());
  const bool stable = pos.stability == Stability::kStable;
  o.pass = values_ok && residual_ok && stable;
  o.detail = "state (" + fmt(pos.state[0]) + ", " + fmt(pos.state[1]) +
             ", 0), residual " + fmt(pos.residual) + ", " + to_string(pos.stability);
  return o;
}

Outcome criterion_instability_certificate() {
  SitParams p = calibrated_sit();
  AssumptionReport ar = check_assumptions(p);
  SmallMatrix m = sit_extinction_jacobian(p, 0.0);
  auto eigs = eigenvalues(m);
  Outcome o;
  const double lead = eigs[0].real();
  o.pass = ar.checks[0].pass && ar.checks[1].pass &&
           std::fabs(lead - 0.16450) < 1e-4 && lead > 0.0;
  o.detail = "leading eigenvalue " + fmt(lead);
  return o;
}

Outcome criterion_wol_equilibria() {
  WolParams p = calibrated_wol();
  auto eqs = wol_equilibria(p);
  const Equilibrium inv = classify(pick(eqs, EquilibriumKind::kWolbachiaInvasion), p);
  const Equilibrium ext = classify(pick(eqs, EquilibriumKind::kWolbachiaExtinction), p);
  const Equilibrium origin = classify(pick(eqs, EquilibriumKind::kExtinction), p);
  const Equilibrium& co = pick(eqs, EquilibriumKind::kCoexistence);
  Outcome o;
  const bool closed_ok = inv.residual < 1e-9 * p.K && ext.residual < 1e-9 * p.K;
  const bool stab_ok = inv.stability == Stability::kStable &&
                       ext.stability == Stability::kStable &&
                       origin.stability == Stability::kUnstable;
  // the printed coexistence form must have been residual-checked and the
  // mismatch flagged, not silently accepted
  const bool flagged = co.closed_form_mismatch;
  o.pass = closed_ok && stab_ok && flagged;
  o.detail = "invasion residual " + fmt(inv.residual) + ", extinction residual " +
             fmt(ext.residual) + ", coexistence mismatch flagged " +
             (flagged ? "yes" : "no");
  return o;
}

Outcome criterion_gradient_oracle() {
  Outcome o;
  double worst = 0.0;
  auto check_problem = [&](const ControlProblem& pb, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, pb.ubar());
    std::uniform_int_distribution<int> coord(0, pb.grid().N() - 1);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> v(pb.grid().N());
      for (double& x : v) x = unif(rng);
      ControlGrid u = project_admissible(v, pb.grid(), pb.ubar(), pb.budget());
      std::vector<double> g = gradient(pb, u);
      double gmax = 0.0;
      for (double x : g) gmax = std::fmax(gmax, std::fabs(x));
      int probes = 0;
      while (probes < 5) {
        const int k = coord(rng);
        const double step = 1e-4 * pb.ubar();
        if (u.value(k) < step) continue;  // keep the FD stencil in [0, Ubar]
        ++probes;
        std::vector<double> vp = u.values(), vm = u.values();
        vp[k] += step;
        vm[k] -= step;
        ControlGrid up(pb.grid(), vp, pb.ubar() + step, 1e18);
        ControlGrid um(pb.grid(), vm, pb.ubar() + step, 1e18);
        const double fd =
            (pb.cost(pb.simulate(up)) - pb.cost(pb.simulate(um))) / (2.0 * step);
        const double rel =
            std::fabs(g[k] - fd) / std::fmax(std::fabs(fd), 1e-12 * gmax);
        worst = std::fmax(worst, rel);
      }
    }
  };
  check_problem(ControlProblem::sit(calibrated_sit(), TimeGrid(7.0, 200),
                                    1000.0, 3000.0),
                11);
  check_problem(ControlProblem::wolbachia(calibrated_wol(), TimeGrid(90.0, 900),
                                          500.0, 10000.0),
                12);
  o.pass = worst < 1e-5;
  o.detail = "worst relative error " + fmt(worst);
  return o;
}

Outcome criterion_projection_oracle() {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_real_distribution<double> val(-2.0, 6.0);
  std::uniform_real_distribution<double> caps(0.5, 4.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = len(rng);
    const double ubar = caps(rng), budget = caps(rng);
    const double dt = 0.5;
    std::vector<double> v(n);
    for (double& x : v) x = val(rng);
    auto u = project_admissible(v, TimeGrid(dt * n, n), ubar, budget);
    auto oracle = mosqopt_test::qp_project_oracle(v, ubar, budget, dt);
    if (!oracle) return {false, false, "oracle produced no candidate"};
    for (int k = 0; k < n; ++k) {
      worst = std::fmax(worst, std::fabs(u.value(k) - (*oracle)[k]));
    }
  }
  Outcome o;
  o.pass = worst < 1e-9;
  o.detail = "worst coordinate gap " + fmt(worst);
  return o;
}

Outcome criterion_sit_structure() {
  Outcome o;
  o.pass = true;
  SitParams p = calibrated_sit();
  for (double ubar : {500.0, 1000.0, 1500.0}) {
    ControlProblem pb = ControlProblem::sit(p, TimeGrid(7.0, 200), ubar, 3000.0);
    OptimalSolution sol = solve(pb, SolveOptions{});
    const double ratio = sol.diagnostics.budget_ratio;
    const double t0 = sol.diagnostics.tail_zero_time;
    if (!(ratio >= 0.99 && ratio <= 1.0 + 1e-9 && t0 < 7.0)) o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("Ubar=") +
                fmt(ubar) + ": ratio " + fmt(ratio) + ", T0 " + fmt(t0);
    g_scenarios.push_back({"sit-Ubar" + fmt(ubar), Model::kSit, std::move(sol)});
  }
  return o;
}

Outcome criterion_bang_bang() {
  Outcome o;
  o.pass = true;
  o.warn_only = true;  // observational claim: report, never fail
  for (const auto& sc : g_scenarios) {
    if (sc.model != Model::kSit) continue;
    const double f = sc.sol.diagnostics.bang_bang_fraction;
    if (f < 0.9) o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + sc.name + ": " + fmt(f);
  }
  if (o.detail.empty()) {
    o.pass = false;
    o.warn_only = false;
    o.detail = "no SIT scenarios were solved";
  }
  return o;
}

Outcome criterion_threshold() {
  WolParams p = calibrated_wol();
  SolveOptions opts;
  ControlProblem rich =
      ControlProblem::wolbachia(p, TimeGrid(90.0, 900), 500.0, 10000.0);
  OptimalSolution rich_sol = solve(rich, opts);
  ControlProblem poor =
      ControlProblem::wolbachia(p, TimeGrid(90.0, 900), 50.0, 1000.0);
  OptimalSolution poor_sol = solve(poor, opts);
  const double rich_centroid = release_time_centroid(rich_sol.control);
  const double poor_centroid = release_time_centroid(poor_sol.control);
  Outcome o;
  o.pass = rich_centroid < poor_centroid;
  o.detail = "centroid(C=10000) " + fmt(rich_centroid) + " vs centroid(C=1000) " +
             fmt(poor_centroid);
  g_scenarios.push_back({"wol-C10000", Model::kWolbachia, std::move(rich_sol)});
  g_scenarios.push_back({"wol-C1000", Model::kWolbachia, std::move(poor_sol)});
  return o;
}

Outcome criterion_bounds() {
  SitParams sp = calibrated_sit();
  WolParams wp = calibrated_wol();
  Outcome o;
  o.pass = true;
  int audited = 0;
  for (const auto& sc : g_scenarios) {
    BoundsReport r = sc.model == Model::kSit
                         ? verify_bounds(sc.sol.trajectory, sp)
                         : verify_bounds(sc.sol.trajectory, wp);
    double floor = 0.0;
    for (const auto& x : sc.sol.trajectory.states) {
      floor = std::fmin(floor, x.min());
    }
    const double k_cap = sc.model == Model::kSit ? sp.K : wp.K;
    if (!r.pass() || floor < -1e-9 * k_cap) {
      o.pass = false;
      o.detail += sc.name + " violated; ";
    }
    ++audited;
  }
  if (audited == 0) {
    o.pass = false;
    o.detail = "no scenarios to audit";
  } else if (o.pass) {
    o.detail = "all " + std::to_string(audited) + " scenario trajectories in bounds";
  }
  return o;
}

Outcome criterion_integrator_order() {
  SitParams p = calibrated_sit();
  StateVec init = ControlProblem::sit(p, TimeGrid(7.0, 1), 0.0, 0.0).initial_state();
  init[0] *= 0.5;
  init[1] *= 0.7;
  init[2] = 500.0;
  auto terminal = [&](int n) {
    TimeGrid grid(7.0, n);
    return integrate_sit(p, init, ControlGrid::constant(grid, 120.0, 1500.0, 1e9))
        .terminal();
  };
  StateVec ref = terminal(6400);
  const double e100 = max_abs_diff(terminal(100), ref);
  const double e200 = max_abs_diff(terminal(200), ref);
  const double e400 = max_abs_diff(terminal(400), ref);
  const double o1 = std::log2(e100 / e200);
  const double o2 = std::log2(e200 / e400);
  Outcome o;
  o.pass = o1 > 3.7 && o1 < 4.3 && o2 > 3.7 && o2 < 4.3;
  o.detail = "orders " + fmt(o1) + ", " + fmt(o2);
  return o;
}

Outcome criterion_determinism() {
  nlohmann::json cfg{{"model", "sit"},
                     {"T", 7.0},
                     {"N", 200},
                     {"C", 3000.0},
                     {"Ubar", 1000.0},
                     {"optimizer", {{"max_iter", 120}, {"seed", 42}}},
                     {"output_dir", "acceptance_out/determinism"}};
  fs::remove_all("acceptance_out/determinism");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  const std::vector<std::string> names = {"control.csv", "trajectory.csv",
                                          "summary.json"};
  run_optimize(scenario_from_json(cfg));
  std::vector<std::string> first;
  for (const auto& n : names) {
    first.push_back(slurp(fs::path("acceptance_out/determinism") / n));
  }
  run_optimize(scenario_from_json(cfg));
  Outcome o;
  o.pass = true;
  for (size_t i = 0; i < names.size(); ++i) {
    if (slurp(fs::path("acceptance_out/determinism") / names[i]) != first[i]) {
      o.pass = false;
      o.detail += names[i] + " differs; ";
    }
  }
  if (o.pass) o.detail = "byte-identical outputs across reruns";
  return o;
}

}  // namespace

int main() {
  run_criterion(1, "SIT equilibrium values, residual and stability", 1.0,
                criterion_sit_equilibrium);
  run_criterion(2, "instability certificate eigenvalue 0.16450", 1.0,
                criterion_instability_certificate);
  run_criterion(3, "Wolbachia equilibria: residuals, stability, mismatch flag", 1.0,
                criterion_wol_equilibria);
  run_criterion(4, "adjoint gradient vs central finite differences", 30.0,
                criterion_gradient_oracle);
  run_criterion(5, "projection vs exhaustive active-set QP oracle", 5.0,
                criterion_projection_oracle);
  run_criterion(6, "SIT structure: budget saturation and quiet tail", 360.0,
                criterion_sit_structure);
  run_criterion(7, "bang-bang fraction >= 0.9 (observational)", 0.0,
                criterion_bang_bang);
  run_criterion(8, "Wolbachia threshold: rich budget releases earlier", 600.0,
                criterion_threshold);
  run_criterion(9, "trajectory bounds on every acceptance scenario", 0.0,
                criterion_bounds);
  run_criterion(10, "integrator empirical order in [3.7, 4.3]", 10.0,
                criterion_integrator_order);
  run_criterion(11, "byte-identical reruns with a fixed seed", 0.0,
                criterion_determinism);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

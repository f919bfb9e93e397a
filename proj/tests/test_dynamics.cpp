#include <cmath>
#include <vector>

#include <doctest.h>

#include "mosqopt/errors.hpp"
#include "mosqopt/integrate.hpp"
#include "mosqopt/model.hpp"
#include "mosqopt/optimizer.hpp"

using namespace mosqopt;

namespace {

StateVec sit_start(const SitParams& p) {
  return ControlProblem::sit(p, TimeGrid(1.0, 1), 0.0, 0.0).initial_state();
}

}  // namespace

TEST_CASE("pure decay channel matches the closed-form exponential") {
  SitParams p;
  TimeGrid grid(1.0, 100);
  ControlGrid u = ControlGrid::zeros(grid, 0.0, 0.0);
  Trajectory traj = integrate_sit(p, {0.0, 0.0, 1.0}, u);
  // Oracle: Ms' = -delta_s Ms alone, Ms(1) = exp(-0.12).
  const double expected = std::exp(-0.12);
  CHECK(expected == doctest::Approx(0.8869204367171575).epsilon(1e-15));
  CHECK(traj.terminal()[2] == doctest::Approx(expected).epsilon(1e-8));
  CHECK(traj.terminal()[0] == 0.0);
  CHECK(traj.terminal()[1] == 0.0);
}

TEST_CASE("equilibrium is a fixed point of the discrete flow") {
  SitParams p;
  TimeGrid grid(7.0, 200);
  Trajectory traj =
      integrate_sit(p, sit_start(p), ControlGrid::zeros(grid, 500.0, 3000.0));
  for (const auto& x : traj.states) {
    CHECK(max_abs_diff(x, traj.initial()) < 1e-8 * traj.initial().max_abs());
  }
}

TEST_CASE("integrate is deterministic") {
  SitParams p;
  TimeGrid grid(7.0, 140);
  std::vector<double> vals(grid.N());
  for (int k = 0; k < grid.N(); ++k) vals[k] = 250.0 + 200.0 * std::sin(0.1 * k);
  ControlGrid u = project_admissible(vals, grid, 500.0, 3000.0);
  Trajectory a = integrate_sit(p, sit_start(p), u);
  Trajectory b = integrate_sit(p, sit_start(p), u);
  for (size_t k = 0; k < a.states.size(); ++k) {
    for (int i = 0; i < 3; ++i) {
      CHECK(a.states[k][i] == b.states[k][i]);  // bit identical
    }
  }
}

TEST_CASE("empirical convergence order of the integrator is ~4") {
  SitParams p;
  StateVec init = sit_start(p);
  init[0] *= 0.5;
  init[1] *= 0.7;
  init[2] = 500.0;
  auto terminal = [&](int n) {
    TimeGrid grid(7.0, n);
    ControlGrid u = ControlGrid::constant(grid, 120.0, 1500.0, 1e9);
    return integrate_sit(p, init, u).terminal();
  };
  StateVec ref = terminal(6400);
  double e100 = max_abs_diff(terminal(100), ref);
  double e200 = max_abs_diff(terminal(200), ref);
  double e400 = max_abs_diff(terminal(400), ref);
  double order1 = std::log2(e100 / e200);
  double order2 = std::log2(e200 / e400);
  CHECK(order1 > 3.7);
  CHECK(order1 < 4.3);
  CHECK(order2 > 3.7);
  CHECK(order2 < 4.3);
}

TEST_CASE("integrate rejects bad initial data and reports divergence nodes") {
  SitParams p;
  TimeGrid grid(1.0, 10);
  ControlGrid u = ControlGrid::zeros(grid, 0.0, 0.0);
  CHECK_THROWS_AS(integrate_sit(p, {-1.0, 0.0, 0.0}, u), InvalidStateError);
  CHECK_THROWS_AS(integrate_sit(p, {std::nan(""), 0.0, 0.0}, u), InvalidStateError);

  // An unstable quadratic test system overflows quickly; the error carries
  // the node index.
  auto blowup = [](const StateVec& x, double) {
    StateVec d = StateVec::zeros(3);
    d[0] = 400.0 * x[0] * x[0];
    return d;
  };
  TimeGrid tight(50.0, 50);
  StateVec one{1.0, 0.0, 0.0};
  try {
    integrate(blowup, Model::kSit, one, ControlGrid::zeros(tight, 0.0, 0.0));
    CHECK(false);
  } catch (const DivergenceError& e) {
    CHECK(e.node() >= 1);
  }
}

TEST_CASE("SIT trajectory bounds hold for admissible controls") {
  SitParams p;
  TimeGrid grid(7.0, 200);

  // u == 0 keeps the system at equilibrium: bounds hold with equality at t=0.
  Trajectory still =
      integrate_sit(p, sit_start(p), ControlGrid::zeros(grid, 1000.0, 3000.0));
  BoundsReport r0 = verify_bounds(still, p);
  CHECK(r0.pass());
  CHECK(r0.nodes_checked == 201);

  // Saturating admissible schedule.
  std::vector<double> vals(grid.N(), 1000.0);
  ControlGrid u = project_admissible(vals, grid, 1000.0, 3000.0);
  Trajectory traj = integrate_sit(p, sit_start(p), u);
  CHECK(verify_bounds(traj, p).pass());
}

TEST_CASE("Wolbachia invariants: positivity and shared egg capacity") {
  WolParams p;
  TimeGrid grid(90.0, 900);
  ControlGrid u = ControlGrid::constant(grid, 500.0, 500.0, 500.0 * 90.0);
  ControlProblem pb = ControlProblem::wolbachia(p, grid, 500.0, 45000.0);
  Trajectory traj = integrate_wol(p, pb.initial_state(), u);
  BoundsReport r = verify_bounds(traj, p);
  CHECK(r.pass());
  for (const auto& x : traj.states) {
    CHECK(x[0] + x[2] < p.K);
    CHECK(x.min() >= -1e-9 * p.K);
  }
}

TEST_CASE("bounds report lists violations instead of throwing") {
  SitParams p;
  TimeGrid grid(1.0, 10);
  ControlGrid u = ControlGrid::zeros(grid, 0.0, 0.0);
  // Start far above the equilibrium: the lower-bound anchor at t=0 fails.
  StateVec high = sit_start(p);
  high[0] = p.K * 0.99;
  high[1] *= 3.0;
  Trajectory traj = integrate_sit(p, high, u);
  BoundsReport r = verify_bounds(traj, p);
  CHECK_FALSE(r.pass());
  CHECK(r.violations.size() > 0);
  CHECK(r.max_excess > 0.0);
}

TEST_CASE("budget integral of the stored control is exact") {
  TimeGrid grid(2.0, 4);
  ControlGrid u(grid, {1.0, 2.0, 3.0, 0.0}, 3.0, 10.0);
  CHECK(total_release(u) == doctest::Approx(3.0).epsilon(1e-15));
  SitParams p;
  Trajectory traj = integrate_sit(p, sit_start(p), u);
  CHECK(total_release(traj.control) == total_release(u));
}

#pragma once

#include <span>
#include <vector>

#include "mosqopt/grid.hpp"
#include "mosqopt/params.hpp"
#include "mosqopt/state.hpp"

namespace mosqopt {

struct Trajectory;

// Piecewise-constant release rate on a uniform mesh: value k applies on
// [t_k, t_{k+1}). Admissibility (box and budget) is checked at
// construction and the object is immutable afterwards.
class ControlGrid {
 public:
  ControlGrid(TimeGrid grid, std::vector<double> values, double ubar, double budget);

  static ControlGrid zeros(TimeGrid grid, double ubar, double budget);
  static ControlGrid constant(TimeGrid grid, double value, double ubar, double budget);

  const TimeGrid& grid() const { return grid_; }
  double ubar() const { return ubar_; }
  double budget() const { return budget_; }
  double value(int k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

 private:
  TimeGrid grid_;
  std::vector<double> values_;
  double ubar_ = 0.0;
  double budget_ = 0.0;
};

// Total number of mosquitoes released: sum of u_k * dt (exact integral of
// the piecewise-constant rate).
double total_release(const ControlGrid& u);

// Euclidean projection onto {0 <= u <= ubar, sum(u_k)*dt <= budget}.
// Clips to the box; if the budget is then violated, bisects for the unique
// shift lam >= 0 with sum(clip(v_k - lam, 0, ubar))*dt = budget.
// Throws InvalidConstraintError when budget < 0 or ubar < 0.
ControlGrid project_admissible(std::span<const double> raw, TimeGrid grid,
                               double ubar, double budget);

// The bisection shift of the projection of `raw` (0 when the box clip
// already satisfies the budget). Exposed for the PMP multiplier estimate.
double projection_shift(std::span<const double> raw, double ubar,
                        double budget, double dt);

// Terminal-distance cost functionals. cost_sit measures the squared
// distance to extinction; cost_wol the squared shortfall from the
// Wolbachia-invasion equilibrium (positive parts: overshooting the
// infected targets costs nothing).
double cost_sit(const Trajectory& traj);
double cost_wol(const Trajectory& traj, const WolParams& p);

// Gradients of the costs with respect to the terminal state; these seed
// the adjoint sweeps.
StateVec cost_sit_terminal_gradient(const StateVec& terminal);
StateVec cost_wol_terminal_gradient(const StateVec& terminal, const WolParams& p);

}  // namespace mosqopt

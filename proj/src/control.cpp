#include "mosqopt/control.hpp"

#include <algorithm>
#include <cmath>

#include "mosqopt/errors.hpp"
#include "mosqopt/integrate.hpp"
#include "mosqopt/model.hpp"

namespace mosqopt {

ControlGrid::ControlGrid(TimeGrid grid, std::vector<double> values, double ubar,
                         double budget)
    : grid_(grid), values_(std::move(values)), ubar_(ubar), budget_(budget) {
  if (!(ubar_ >= 0.0) || !(budget_ >= 0.0)) {
    throw InvalidConstraintError("ControlGrid: Ubar and C must be >= 0");
  }
  if (static_cast<int>(values_.size()) != grid_.N()) {
    throw InvalidConstraintError("ControlGrid: one value per mesh interval required");
  }
  double sum = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0 || v > ubar_) {
      throw InvalidConstraintError("ControlGrid: values must lie in [0, Ubar]");
    }
    sum += v * grid_.dt();
  }
  if (sum > budget_ + 1e-9 * budget_) {
    throw InvalidConstraintError("ControlGrid: total release exceeds the budget");
  }
}

ControlGrid ControlGrid::zeros(TimeGrid grid, double ubar, double budget) {
  return ControlGrid(grid, std::vector<double>(grid.N(), 0.0), ubar, budget);
}

ControlGrid ControlGrid::constant(TimeGrid grid, double value, double ubar,
                                  double budget) {
  return ControlGrid(grid, std::vector<double>(grid.N(), value), ubar, budget);
}

double total_release(const ControlGrid& u) {
  double sum = 0.0;
  for (double v : u.values()) sum += v * u.grid().dt();
  return sum;
}

namespace {

double clipped_sum(std::span<const double> v, double shift, double ubar,
                   double dt) {
  double s = 0.0;
  for (double x : v) s += std::clamp(x - shift, 0.0, ubar) * dt;
  return s;
}

}  // namespace

double projection_shift(std::span<const double> raw, double ubar, double budget,
                        double dt) {
  if (!(ubar >= 0.0) || !(budget >= 0.0)) {
    throw InvalidConstraintError("projection: Ubar and C must be >= 0");
  }
  if (clipped_sum(raw, 0.0, ubar, dt) <= budget) return 0.0;

  // The clipped sum is continuous and nonincreasing in the shift; bracket
  // [0, max(raw)] pins it (all values clip to zero at the top end).
  double hi = 0.0;
  for (double x : raw) hi = std::fmax(hi, x);
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double s = clipped_sum(raw, mid, ubar, dt);
    if (std::fabs(s - budget) <= 1e-12 * budget) return mid;
    (s > budget ? lo : hi) = mid;
    if (hi - lo <= 1e-16 * std::fmax(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

ControlGrid project_admissible(std::span<const double> raw, TimeGrid grid,
                               double ubar, double budget) {
  for (double x : raw) {
    if (!std::isfinite(x)) {
      throw InvalidStateError("projection: non-finite input");
    }
  }
  const double dt = grid.dt();
  double shift = projection_shift(raw, ubar, budget, dt);
  std::vector<double> u(raw.size());
  for (size_t k = 0; k < raw.size(); ++k) {
    u[k] = std::clamp(raw[k] - shift, 0.0, ubar);
  }
  // Bisection leaves at most a 1e-12-relative budget excess; shave it off
  // the largest entries so the ControlGrid invariant holds exactly.
  double sum = 0.0;
  for (double v : u) sum += v * dt;
  if (sum > budget) {
    double excess = sum - budget;
    for (size_t k = 0; k < u.size() && excess > 0.0; ++k) {
      double give = std::fmin(u[k] * dt, excess);
      u[k] -= give / dt;
      excess -= give;
    }
  }
  return ControlGrid(grid, std::move(u), ubar, budget);
}

double cost_sit(const Trajectory& traj) {
  const StateVec& xT = traj.terminal();
  return 0.5 * (xT[0] * xT[0] + xT[1] * xT[1]);
}

double cost_wol(const Trajectory& traj, const WolParams& p) {
  const StateVec& xT = traj.terminal();
  const double b = p.b();
  const double dd = p.delta * p.delta_F;
  const double ei_target = p.K * (1.0 - dd / (b * p.eta));
  const double fi_target =
      p.K * (p.nu * p.beta_F / dd - p.nu * p.beta_F / (b * p.eta));
  const double ei_gap = std::fmax(ei_target - xT[2], 0.0);
  const double fi_gap = std::fmax(fi_target - xT[3], 0.0);
  return 0.5 * (xT[0] * xT[0] + xT[1] * xT[1] + ei_gap * ei_gap + fi_gap * fi_gap);
}

StateVec cost_sit_terminal_gradient(const StateVec& terminal) {
  StateVec g = StateVec::zeros(3);
  g[0] = terminal[0];
  g[1] = terminal[1];
  return g;
}

StateVec cost_wol_terminal_gradient(const StateVec& terminal, const WolParams& p) {
  const double b = p.b();
  const double dd = p.delta * p.delta_F;
  const double ei_target = p.K * (1.0 - dd / (b * p.eta));
  const double fi_target =
      p.K * (p.nu * p.beta_F / dd - p.nu * p.beta_F / (b * p.eta));
  StateVec g = StateVec::zeros(4);
  g[0] = terminal[0];
  g[1] = terminal[1];
  g[2] = -std::fmax(ei_target - terminal[2], 0.0);
  g[3] = -std::fmax(fi_target - terminal[3], 0.0);
  return g;
}

}  // namespace mosqopt

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mosqopt/control.hpp"
#include "mosqopt/integrate.hpp"
#include "mosqopt/model.hpp"
#include "mosqopt/smallmatrix.hpp"

namespace mosqopt {

// A release-scheduling problem: model + parameters + mesh + admissible set.
// The initial state is always the uncontrolled equilibrium the experiment
// starts from (persistent wild population / Wolbachia-free).
class ControlProblem {
 public:
  static ControlProblem sit(const SitParams& p, TimeGrid grid, double ubar, double budget);
  static ControlProblem wolbachia(const WolParams& p, TimeGrid grid, double ubar, double budget);

  Model model() const { return model_; }
  const TimeGrid& grid() const { return grid_; }
  double ubar() const { return ubar_; }
  double budget() const { return budget_; }
  const StateVec& initial_state() const { return init_; }
  int control_index() const { return state_dim(model_) - 1; }

  const SitParams& sit_params() const { return std::get<SitParams>(params_); }
  const WolParams& wol_params() const { return std::get<WolParams>(params_); }

  StateVec rhs(const StateVec& x, double u) const;
  SmallMatrix state_jacobian(const StateVec& x) const;
  Trajectory simulate(const ControlGrid& u) const;
  double cost(const Trajectory& traj) const;
  StateVec terminal_cost_gradient(const StateVec& terminal) const;

 private:
  ControlProblem() = default;
  Model model_ = Model::kSit;
  std::variant<SitParams, WolParams> params_;
  TimeGrid grid_;
  double ubar_ = 0.0;
  double budget_ = 0.0;
  StateVec init_;
};

// Exact gradient of the discretized cost with respect to each interval
// value u_k: reverse-mode transposition of the RK4 steps (discrete
// adjoint). The overload taking a trajectory skips the forward solve.
std::vector<double> gradient(const ControlProblem& pb, const ControlGrid& u);
std::vector<double> gradient(const ControlProblem& pb, const Trajectory& traj);

// Backward costate sweep along a stored trajectory.
struct AdjointSweep {
  std::vector<StateVec> costate;     // p at the grid nodes, size N+1
  std::vector<double> release_csum;  // y(t_k) = integral of u up to t_k
};

// Continuous-adjoint path: RK4 backward on -p' = J^T p with terminal data
// p(T) = grad cost(x(T)), states cubic-Hermite interpolated inside each
// interval. Second route for the gradient (dJ/du_k ~ integral of the
// release costate over the interval) and the engine behind the PMP
// diagnostics; agrees with the discrete adjoint to O(dt).
AdjointSweep continuous_adjoint(const ControlProblem& pb, const Trajectory& traj);
std::vector<double> gradient_continuous(const ControlProblem& pb, const Trajectory& traj);

struct SolveOptions {
  int max_iter = 500;
  double tol = 1e-6;   // stationarity: ||u - proj(u - grad)||_inf < tol * ubar
  int starts = 4;      // u=0, front-loaded, back-loaded, then seeded random
  std::uint64_t seed = 1;
};

struct StartLog {
  int index = 0;
  std::string init;    // "zero", "front", "back", "random"
  double cost = 0.0;
  int iterations = 0;
  double stationarity = 0.0;
  bool converged = false;
  bool diverged = false;
  std::vector<double> cost_history;  // accepted-step costs, non-increasing
};

// Structure diagnostics of a candidate optimum.
struct PmpReport {
  double budget_used = 0.0;
  double budget_ratio = 0.0;        // budget_used / C
  double tail_zero_time = 0.0;      // T0: u < 1e-6*ubar on (T0, T]
  double bang_bang_fraction = 0.0;  // mesh share with u in {0, ubar} (tol 1e-3*ubar)
  double lambda_hat = 0.0;          // budget multiplier from the projection shift
  double xi = 0.0;                  // terminal multiplier (= lambda_hat here)
  double complementarity = 0.0;     // xi * (y(T) - C)
  double transversality_residual = 0.0;
  // Switching-function sign violations, counted under both sign
  // conventions of the constant multiplier; reported, never asserted.
  int switch_violations_plus = 0;   // sigma = p_u + lambda_hat
  int switch_violations_minus = 0;  // sigma = p_u - lambda_hat
};

struct OptimalSolution {
  ControlGrid control;
  Trajectory trajectory;
  double cost = 0.0;
  double projected_gradient_norm = 0.0;  // stationarity at the returned point
  int iterations = 0;                    // of the winning start
  bool converged = false;
  int best_start = 0;
  std::vector<StartLog> starts;
  PmpReport diagnostics;
};

// Projected gradient with Armijo backtracking (c1 = 1e-4, alpha0 =
// ubar/max(1, ||grad||_inf), halved on failure), multi-start, deterministic
// given opts.seed. Budget saturation is whatever the optimizer finds, never
// imposed. Throws OptimizationFailureError only if every start diverges.
OptimalSolution solve(const ControlProblem& pb, const SolveOptions& opts = {});

PmpReport pmp_diagnostics(const ControlProblem& pb, const ControlGrid& u,
                          const Trajectory& traj);

// Mean release time weighted by released mass; the early-vs-late summary
// statistic for threshold comparisons.
double release_time_centroid(const ControlGrid& u);

}  // namespace mosqopt

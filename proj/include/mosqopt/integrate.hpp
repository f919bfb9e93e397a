#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mosqopt/control.hpp"
#include "mosqopt/grid.hpp"
#include "mosqopt/params.hpp"
#include "mosqopt/state.hpp"

namespace mosqopt {

// f(x, u) with u the release rate held constant over the current interval.
using RhsFn = std::function<StateVec(const StateVec&, double)>;

struct Trajectory {
  TimeGrid grid;
  Model model = Model::kSit;
  std::vector<StateVec> states;  // N+1 nodes
  ControlGrid control;

  const StateVec& initial() const { return states.front(); }
  const StateVec& terminal() const { return states.back(); }
};

// Classical RK4 with one step per control interval. Deterministic:
// identical inputs give bit-identical trajectories. Throws
// InvalidStateError for negative/non-finite initial data and
// DivergenceError (with the node index) if the state leaves the finite
// range.
Trajectory integrate(const RhsFn& rhs, Model model, const StateVec& init,
                     const ControlGrid& u);

// Convenience wrappers binding the model right-hand sides.
Trajectory integrate_sit(const SitParams& p, const StateVec& init, const ControlGrid& u);
Trajectory integrate_wol(const WolParams& p, const StateVec& init, const ControlGrid& u);

struct BoundViolation {
  int node = 0;
  std::string bound;      // which inequality failed
  double value = 0.0;     // observed value
  double limit = 0.0;     // bound it crossed
};

struct BoundsReport {
  std::vector<BoundViolation> violations;
  int nodes_checked = 0;
  double max_excess = 0.0;  // worst crossing beyond tolerance
  bool pass() const { return violations.empty(); }
};

// A-priori trajectory bounds, checked at every node with tolerance
// 1e-7*K of discretization slack.
//
// SIT (trajectories started at the non-extinction equilibrium):
//   E2*exp(-(tau_E+delta_E) t) <= E(t) < K
//   F2*exp(-delta_F t) <= F(t) <= K(nu beta_F/delta_F
//                                   - (tau_E+delta_E)/beta_E * exp(-delta_F t))
//
// Wolbachia: all four compartments nonnegative and Eu + Ei < K.
BoundsReport verify_bounds(const Trajectory& traj, const SitParams& p);
BoundsReport verify_bounds(const Trajectory& traj, const WolParams& p);

}  // namespace mosqopt

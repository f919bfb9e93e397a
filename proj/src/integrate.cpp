#include "mosqopt/integrate.hpp"

#include <cmath>
#include <sstream>

#include "mosqopt/errors.hpp"
#include "mosqopt/model.hpp"

namespace mosqopt {

Trajectory integrate(const RhsFn& rhs, Model model, const StateVec& init,
                     const ControlGrid& u) {
  if (init.dim() != state_dim(model)) {
    throw InvalidStateError("integrate: initial state has wrong dimension");
  }
  if (!init.all_finite() || init.min() < 0.0) {
    throw InvalidStateError("integrate: initial state must be finite and >= 0");
  }

  const TimeGrid& grid = u.grid();
  const double h = grid.dt();
  Trajectory traj{grid, model, {}, u};
  traj.states.reserve(grid.N() + 1);
  traj.states.push_back(init);

  StateVec x = init;
  for (int k = 0; k < grid.N(); ++k) {
    const double uk = u.value(k);
    StateVec k1 = rhs(x, uk);
    StateVec k2 = rhs(axpy(x, 0.5 * h, k1), uk);
    StateVec k3 = rhs(axpy(x, 0.5 * h, k2), uk);
    StateVec k4 = rhs(axpy(x, h, k3), uk);
    StateVec incr = k1 + 2.0 * k2 + 2.0 * k3 + k4;
    x = axpy(x, h / 6.0, incr);
    if (!x.all_finite()) {
      std::ostringstream os;
      os << "integration diverged at node " << (k + 1);
      throw DivergenceError(os.str(), k + 1);
    }
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory integrate_sit(const SitParams& p, const StateVec& init,
                         const ControlGrid& u) {
  return integrate([&p](const StateVec& x, double v) { return sit_rhs(x, v, p); },
                   Model::kSit, init, u);
}

Trajectory integrate_wol(const WolParams& p, const StateVec& init,
                         const ControlGrid& u) {
  return integrate([&p](const StateVec& x, double v) { return wol_rhs(x, v, p); },
                   Model::kWolbachia, init, u);
}

namespace {

void record(BoundsReport& r, int node, const char* bound, double value,
            double limit, double excess) {
  r.violations.push_back({node, bound, value, limit});
  r.max_excess = std::fmax(r.max_excess, excess);
}

}  // namespace

BoundsReport verify_bounds(const Trajectory& traj, const SitParams& p) {
  BoundsReport r;
  const double tol = 1e-7 * p.K;
  const double decay_E = p.tau_E + p.delta_E;
  const double egg_eq =
      p.K * (1.0 - decay_E * p.delta_F / (p.nu * p.beta_E * p.beta_F));
  const double female_eq = p.nu * p.beta_F / p.delta_F * egg_eq;

  for (size_t k = 0; k < traj.states.size(); ++k) {
    const double t = traj.grid.node(static_cast<int>(k));
    const StateVec& x = traj.states[k];
    const double e_lo = egg_eq * std::exp(-decay_E * t);
    const double f_lo = female_eq * std::exp(-p.delta_F * t);
    const double f_hi = p.K * (p.nu * p.beta_F / p.delta_F -
                               decay_E / p.beta_E * std::exp(-p.delta_F * t));
    if (x[0] < e_lo - tol)
      record(r, k, "E >= E2*exp(-(tau_E+delta_E)t)", x[0], e_lo, e_lo - x[0] - tol);
    if (x[0] > p.K + tol)
      record(r, k, "E < K", x[0], p.K, x[0] - p.K - tol);
    if (x[1] < f_lo - tol)
      record(r, k, "F >= F2*exp(-delta_F t)", x[1], f_lo, f_lo - x[1] - tol);
    if (x[1] > f_hi + tol)
      record(r, k, "F <= K(nu beta_F/delta_F - (tau_E+delta_E)/beta_E e^-delta_F t)",
             x[1], f_hi, x[1] - f_hi - tol);
  }
  r.nodes_checked = static_cast<int>(traj.states.size());
  return r;
}

BoundsReport verify_bounds(const Trajectory& traj, const WolParams& p) {
  BoundsReport r;
  const double tol = 1e-7 * p.K;
  const char* names[4] = {"Eu >= 0", "Fu >= 0", "Ei >= 0", "Fi >= 0"};
  for (size_t k = 0; k < traj.states.size(); ++k) {
    const StateVec& x = traj.states[k];
    for (int i = 0; i < 4; ++i) {
      if (x[i] < -tol) record(r, k, names[i], x[i], 0.0, -x[i] - tol);
    }
    if (x[0] + x[2] > p.K + tol)
      record(r, k, "Eu + Ei < K", x[0] + x[2], p.K, x[0] + x[2] - p.K - tol);
  }
  r.nodes_checked = static_cast<int>(traj.states.size());
  return r;
}

}  // namespace mosqopt

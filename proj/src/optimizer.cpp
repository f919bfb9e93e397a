#include "mosqopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "mosqopt/errors.hpp"

namespace mosqopt {

ControlProblem ControlProblem::sit(const SitParams& p, TimeGrid grid,
                                   double ubar, double budget) {
  ControlProblem pb;
  pb.model_ = Model::kSit;
  pb.params_ = p;
  pb.grid_ = grid;
  pb.ubar_ = ubar;
  pb.budget_ = budget;
  const double persistence =
      1.0 - (p.tau_E + p.delta_E) * p.delta_F / (p.nu * p.beta_E * p.beta_F);
  StateVec init = StateVec::zeros(3);
  init[0] = p.K * persistence;
  init[1] = p.nu * p.beta_F / p.delta_F * init[0];
  pb.init_ = init;
  return pb;
}

ControlProblem ControlProblem::wolbachia(const WolParams& p, TimeGrid grid,
                                         double ubar, double budget) {
  ControlProblem pb;
  pb.model_ = Model::kWolbachia;
  pb.params_ = p;
  pb.grid_ = grid;
  pb.ubar_ = ubar;
  pb.budget_ = budget;
  StateVec init = StateVec::zeros(4);
  init[0] = p.K * (1.0 - p.delta_F / p.b());
  init[1] = p.K * (p.nu * p.beta_F / p.delta_F - p.nu * p.beta_F / p.b());
  pb.init_ = init;
  return pb;
}

StateVec ControlProblem::rhs(const StateVec& x, double u) const {
  return model_ == Model::kSit ? sit_rhs(x, u, std::get<SitParams>(params_))
                               : wol_rhs(x, u, std::get<WolParams>(params_));
}

SmallMatrix ControlProblem::state_jacobian(const StateVec& x) const {
  return model_ == Model::kSit
             ? sit_state_jacobian(x, std::get<SitParams>(params_))
             : wol_state_jacobian(x, std::get<WolParams>(params_));
}

Trajectory ControlProblem::simulate(const ControlGrid& u) const {
  return integrate([this](const StateVec& x, double v) { return rhs(x, v); },
                   model_, init_, u);
}

double ControlProblem::cost(const Trajectory& traj) const {
  return model_ == Model::kSit ? cost_sit(traj)
                               : cost_wol(traj, std::get<WolParams>(params_));
}

StateVec ControlProblem::terminal_cost_gradient(const StateVec& terminal) const {
  return model_ == Model::kSit
             ? cost_sit_terminal_gradient(terminal)
             : cost_wol_terminal_gradient(terminal, std::get<WolParams>(params_));
}

std::vector<double> gradient(const ControlProblem& pb, const ControlGrid& u) {
  return gradient(pb, pb.simulate(u));
}

std::vector<double> gradient(const ControlProblem& pb, const Trajectory& traj) {
  const TimeGrid& grid = traj.grid;
  const double h = grid.dt();
  const int n = grid.N();
  const int ci = pb.control_index();

  StateVec lam = pb.terminal_cost_gradient(traj.terminal());
  std::vector<double> g(n, 0.0);

  // Reverse-mode transposition of each RK4 step: recompute the stages
  // forward, then push the costate back through them.
  for (int k = n - 1; k >= 0; --k) {
    const double uk = traj.control.value(k);
    const StateVec& x0 = traj.states[k];
    StateVec k1 = pb.rhs(x0, uk);
    StateVec s2 = axpy(x0, 0.5 * h, k1);
    StateVec k2 = pb.rhs(s2, uk);
    StateVec s3 = axpy(x0, 0.5 * h, k2);
    StateVec k3 = pb.rhs(s3, uk);
    StateVec s4 = axpy(x0, h, k3);

    StateVec kb1 = (h / 6.0) * lam;
    StateVec kb2 = (h / 3.0) * lam;
    StateVec kb3 = (h / 3.0) * lam;
    StateVec kb4 = (h / 6.0) * lam;
    StateVec xb = lam;

    StateVec sb4 = pb.state_jacobian(s4).apply_transposed(kb4);
    double ub = kb4[ci];
    xb += sb4;
    kb3 = axpy(kb3, h, sb4);

    StateVec sb3 = pb.state_jacobian(s3).apply_transposed(kb3);
    ub += kb3[ci];
    xb += sb3;
    kb2 = axpy(kb2, 0.5 * h, sb3);

    StateVec sb2 = pb.state_jacobian(s2).apply_transposed(kb2);
    ub += kb2[ci];
    xb += sb2;
    kb1 = axpy(kb1, 0.5 * h, sb2);

    StateVec sb1 = pb.state_jacobian(x0).apply_transposed(kb1);
    ub += kb1[ci];
    xb += sb1;

    lam = xb;
    g[k] = ub;
  }
  return g;
}

namespace {

// Cubic Hermite state interpolation inside interval k (control uk held on
// the whole interval, so both endpoint slopes use it).
StateVec hermite_state(const ControlProblem& pb, const Trajectory& traj, int k,
                       double theta) {
  const double h = traj.grid.dt();
  const double uk = traj.control.value(k);
  const StateVec& a = traj.states[k];
  const StateVec& b = traj.states[k + 1];
  StateVec fa = pb.rhs(a, uk);
  StateVec fb = pb.rhs(b, uk);
  const double t2 = theta * theta, t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  StateVec r = h00 * a;
  r = axpy(r, h10 * h, fa);
  r += h01 * b;
  r = axpy(r, h11 * h, fb);
  return r;
}

}  // namespace

AdjointSweep continuous_adjoint(const ControlProblem& pb, const Trajectory& traj) {
  const TimeGrid& grid = traj.grid;
  const int n = grid.N();
  const double h = grid.dt();

  AdjointSweep sweep;
  sweep.costate.assign(n + 1, StateVec::zeros(state_dim(pb.model())));
  sweep.release_csum.assign(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    sweep.release_csum[k + 1] =
        sweep.release_csum[k] + traj.control.value(k) * h;
  }

  // p' = -J(x(t))^T p, swept from T down to 0 with RK4 (step -h).
  StateVec p = pb.terminal_cost_gradient(traj.terminal());
  sweep.costate[n] = p;
  for (int k = n - 1; k >= 0; --k) {
    auto f = [&](double theta, const StateVec& q) {
      StateVec x = theta >= 1.0   ? traj.states[k + 1]
                   : theta <= 0.0 ? traj.states[k]
                                  : hermite_state(pb, traj, k, theta);
      StateVec r = pb.state_jacobian(x).apply_transposed(q);
      return -1.0 * r;
    };
    StateVec m1 = f(1.0, p);
    StateVec m2 = f(0.5, axpy(p, -0.5 * h, m1));
    StateVec m3 = f(0.5, axpy(p, -0.5 * h, m2));
    StateVec m4 = f(0.0, axpy(p, -h, m3));
    StateVec incr = m1 + 2.0 * m2 + 2.0 * m3 + m4;
    p = axpy(p, -h / 6.0, incr);
    sweep.costate[k] = p;
  }
  return sweep;
}

std::vector<double> gradient_continuous(const ControlProblem& pb,
                                        const Trajectory& traj) {
  AdjointSweep sweep = continuous_adjoint(pb, traj);
  const int n = traj.grid.N();
  const double h = traj.grid.dt();
  const int ci = pb.control_index();
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) {
    g[k] = 0.5 * h * (sweep.costate[k][ci] + sweep.costate[k + 1][ci]);
  }
  return g;
}

namespace {

double stationarity(const ControlGrid& u, const std::vector<double>& g) {
  const int n = u.grid().N();
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = u.value(k) - g[k];
  ControlGrid proj = project_admissible(v, u.grid(), u.ubar(), u.budget());
  double m = 0.0;
  for (int k = 0; k < n; ++k) m = std::fmax(m, std::fabs(u.value(k) - proj.value(k)));
  return m;
}

std::vector<double> front_loaded(const TimeGrid& grid, double ubar, double budget) {
  std::vector<double> v(grid.N(), 0.0);
  double remaining = budget;
  for (int k = 0; k < grid.N() && remaining > 0.0; ++k) {
    double take = std::fmin(ubar, remaining / grid.dt());
    v[k] = take;
    remaining -= take * grid.dt();
  }
  return v;
}

struct StartResult {
  StartLog log;
  std::optional<ControlGrid> control;
  std::optional<Trajectory> trajectory;
};

StartResult run_start(const ControlProblem& pb, const SolveOptions& opts,
                      int index, const std::string& name,
                      std::vector<double> init_values) {
  StartResult res;
  res.log.index = index;
  res.log.init = name;
  try {
    ControlGrid u = project_admissible(init_values, pb.grid(), pb.ubar(), pb.budget());
    Trajectory traj = pb.simulate(u);
    double J = pb.cost(traj);
    res.log.cost_history.push_back(J);

    const int n = pb.grid().N();
    bool converged = false;
    int iter = 0;
    double stat = 0.0;
    for (; iter < opts.max_iter; ++iter) {
      std::vector<double> g = gradient(pb, traj);
      stat = stationarity(u, g);
      if (stat < opts.tol * std::fmax(pb.ubar(), 1e-300)) {
        converged = true;
        break;
      }
      double gmax = 0.0;
      for (double x : g) gmax = std::fmax(gmax, std::fabs(x));
      double alpha = pb.ubar() / std::fmax(1.0, gmax);

      bool accepted = false;
      for (int back = 0; back < 60; ++back) {
        std::vector<double> v(n);
        for (int k = 0; k < n; ++k) v[k] = u.value(k) - alpha * g[k];
        ControlGrid u_try = project_admissible(v, pb.grid(), pb.ubar(), pb.budget());
        Trajectory traj_try = pb.simulate(u_try);
        double J_try = pb.cost(traj_try);
        double dirder = 0.0;
        for (int k = 0; k < n; ++k) dirder += g[k] * (u_try.value(k) - u.value(k));
        if (J_try <= J + 1e-4 * dirder) {
          u = std::move(u_try);
          traj = std::move(traj_try);
          J = J_try;
          res.log.cost_history.push_back(J);
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;  // line search exhausted: stationary to rounding
    }
    if (!converged) {
      stat = stationarity(u, gradient(pb, traj));  // at the returned point
    }

    res.log.cost = J;
    res.log.iterations = iter;
    res.log.stationarity = stat;
    res.log.converged = converged;
    res.control = std::move(u);
    res.trajectory = std::move(traj);
  } catch (const DivergenceError& e) {
    res.log.diverged = true;
    res.log.cost = std::numeric_limits<double>::infinity();
    res.log.init += std::string(" [diverged: ") + e.what() + "]";
  }
  return res;
}

}  // namespace

OptimalSolution solve(const ControlProblem& pb, const SolveOptions& opts) {
  if (opts.starts < 1) throw InvalidConstraintError("solve: starts must be >= 1");
  const TimeGrid& grid = pb.grid();
  const int n = grid.N();

  std::vector<StartResult> results;
  for (int s = 0; s < opts.starts; ++s) {
    std::vector<double> init;
    std::string name;
    switch (s) {
      case 0:
        name = "zero";
        init.assign(n, 0.0);
        break;
      case 1: {
        name = "front";
        init = front_loaded(grid, pb.ubar(), pb.budget());
        break;
      }
      case 2: {
        name = "back";
        init = front_loaded(grid, pb.ubar(), pb.budget());
        std::reverse(init.begin(), init.end());
        break;
      }
      default: {
        name = "random";
        std::mt19937_64 rng(opts.seed ^ (0x9e3779b97f4a7c15ULL * (s + 1)));
        std::uniform_real_distribution<double> unif(0.0, pb.ubar());
        init.resize(n);
        for (double& v : init) v = unif(rng);
        break;
      }
    }
    results.push_back(run_start(pb, opts, s, name, std::move(init)));
  }

  int best = -1;
  for (size_t s = 0; s < results.size(); ++s) {
    if (results[s].log.diverged) continue;
    if (best < 0 || results[s].log.cost < results[best].log.cost) {
      best = static_cast<int>(s);
    }
  }
  if (best < 0) {
    std::vector<std::string> logs;
    logs.reserve(results.size());
    for (const auto& r : results) logs.push_back(r.log.init);
    throw OptimizationFailureError("solve: every start diverged", logs);
  }

  OptimalSolution sol{*results[best].control, *results[best].trajectory,
                      0.0, 0.0, 0, false, 0, {}, {}};
  sol.cost = results[best].log.cost;
  sol.projected_gradient_norm = results[best].log.stationarity;
  sol.iterations = results[best].log.iterations;
  sol.converged = results[best].log.converged;
  sol.best_start = best;
  for (auto& r : results) sol.starts.push_back(std::move(r.log));
  sol.diagnostics = pmp_diagnostics(pb, sol.control, sol.trajectory);
  return sol;
}

double release_time_centroid(const ControlGrid& u) {
  const double dt = u.grid().dt();
  double mass = 0.0, moment = 0.0;
  for (int k = 0; k < u.grid().N(); ++k) {
    const double m = u.value(k) * dt;
    mass += m;
    moment += m * (u.grid().node(k) + 0.5 * dt);
  }
  return mass > 0.0 ? moment / mass : 0.0;
}

PmpReport pmp_diagnostics(const ControlProblem& pb, const ControlGrid& u,
                          const Trajectory& traj) {
  PmpReport rep;
  const TimeGrid& grid = pb.grid();
  const int n = grid.N();
  const int ci = pb.control_index();

  rep.budget_used = total_release(u);
  rep.budget_ratio = pb.budget() > 0.0 ? rep.budget_used / pb.budget() : 0.0;

  const double u_eps = 1e-6 * pb.ubar();
  int last_active = -1;
  for (int k = 0; k < n; ++k) {
    if (u.value(k) >= u_eps) last_active = k;
  }
  rep.tail_zero_time = grid.node(last_active + 1);

  const double band = 1e-3 * pb.ubar();
  int extremes = 0;
  for (int k = 0; k < n; ++k) {
    if (u.value(k) <= band || u.value(k) >= pb.ubar() - band) ++extremes;
  }
  rep.bang_bang_fraction = n > 0 ? static_cast<double>(extremes) / n : 0.0;

  // Budget multiplier: shift of the unit-step projection at the solution,
  // expressed per unit time (the discrete KKT shift is multiplier * dt).
  std::vector<double> g = gradient(pb, traj);
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = u.value(k) - g[k];
  rep.lambda_hat =
      projection_shift(v, pb.ubar(), pb.budget(), grid.dt()) / grid.dt();
  rep.xi = rep.lambda_hat;
  rep.complementarity = rep.xi * (rep.budget_used - pb.budget());

  AdjointSweep sweep = continuous_adjoint(pb, traj);
  StateVec want = pb.terminal_cost_gradient(traj.terminal());
  rep.transversality_residual = max_abs_diff(sweep.costate[n], want);

  // Switching function sigma = p_u +/- lambda: sign pattern on the active
  // sets, counted per interval from the endpoint mean of the costate.
  double p_scale = 0.0;
  for (const auto& pvec : sweep.costate) {
    p_scale = std::fmax(p_scale, std::fabs(pvec[ci]));
  }
  const double sigma_tol = 1e-6 * std::fmax(p_scale, std::fabs(rep.lambda_hat));
  for (int k = 0; k < n; ++k) {
    const double pu = 0.5 * (sweep.costate[k][ci] + sweep.costate[k + 1][ci]);
    const bool at_zero = u.value(k) <= band;
    const bool at_cap = u.value(k) >= pb.ubar() - band;
    for (double sign : {+1.0, -1.0}) {
      const double sigma = pu + sign * rep.lambda_hat;
      int& count = sign > 0 ? rep.switch_violations_plus
                            : rep.switch_violations_minus;
      if (at_zero && sigma < -sigma_tol) ++count;
      if (at_cap && sigma > sigma_tol) ++count;
    }
  }
  return rep;
}

}  // namespace mosqopt

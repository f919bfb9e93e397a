#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mosqopt/control.hpp"
#include "mosqopt/integrate.hpp"
#include "mosqopt/model.hpp"
#include "mosqopt/optimizer.hpp"
#include "mosqopt/scenario.hpp"
#include "mosqopt/stability.hpp"
#include "mosqopt/version.hpp"

namespace py = pybind11;
using namespace mosqopt;

namespace {

StateVec to_state(const std::vector<double>& v) {
  StateVec s = StateVec::zeros(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) s[static_cast<int>(i)] = v[i];
  return s;
}

std::vector<double> from_state(const StateVec& s) {
  std::vector<double> v(s.dim());
  for (int i = 0; i < s.dim(); ++i) v[i] = s[i];
  return v;
}

py::dict equilibrium_dict(const Equilibrium& e) {
  py::dict d;
  d["state"] = from_state(e.state);
  d["label"] = to_string(e.kind);
  d["stability"] = to_string(e.stability);
  d["eigenvalues"] = e.eigenvalues;
  d["residual"] = e.residual;
  d["residual_ok"] = e.residual_ok;
  d["closed_form_mismatch"] = e.closed_form_mismatch;
  d["flags"] = e.flags;
  return d;
}

py::dict trajectory_dict(const Trajectory& traj) {
  py::dict d;
  std::vector<double> t(traj.grid.N() + 1);
  for (int k = 0; k <= traj.grid.N(); ++k) t[k] = traj.grid.node(k);
  std::vector<std::vector<double>> states;
  states.reserve(traj.states.size());
  for (const auto& s : traj.states) states.push_back(from_state(s));
  d["t"] = t;
  d["states"] = states;
  d["control"] = traj.control.values();
  return d;
}

py::dict solution_dict(const OptimalSolution& sol) {
  py::dict d;
  d["control"] = sol.control.values();
  d["trajectory"] = trajectory_dict(sol.trajectory);
  d["cost"] = sol.cost;
  d["iterations"] = sol.iterations;
  d["converged"] = sol.converged;
  d["projected_gradient_norm"] = sol.projected_gradient_norm;
  d["best_start"] = sol.best_start;
  std::vector<double> per_start;
  for (const auto& s : sol.starts) per_start.push_back(s.cost);
  d["per_start_costs"] = per_start;
  py::dict diag;
  diag["budget_used"] = sol.diagnostics.budget_used;
  diag["budget_ratio"] = sol.diagnostics.budget_ratio;
  diag["tail_zero_time"] = sol.diagnostics.tail_zero_time;
  diag["bang_bang_fraction"] = sol.diagnostics.bang_bang_fraction;
  diag["lambda_hat"] = sol.diagnostics.lambda_hat;
  diag["switch_violations_plus"] = sol.diagnostics.switch_violations_plus;
  diag["switch_violations_minus"] = sol.diagnostics.switch_violations_minus;
  diag["release_time_centroid"] = release_time_centroid(sol.control);
  d["diagnostics"] = diag;
  return d;
}

template <typename Params>
py::dict assumptions_dict(const Params& p, std::optional<ReleaseBounds> rb) {
  AssumptionReport r = check_assumptions(p, rb);
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict cd;
    cd["name"] = c.name;
    cd["lhs"] = c.lhs;
    cd["rhs"] = c.rhs;
    cd["pass"] = c.pass;
    checks.append(cd);
  }
  py::dict d;
  d["all_pass"] = r.all_pass();
  d["checks"] = checks;
  return d;
}

SolveOptions options_from_kwargs(int max_iter, double tol, int starts,
                                 std::uint64_t seed) {
  SolveOptions o;
  o.max_iter = max_iter;
  o.tol = tol;
  o.starts = starts;
  o.seed = seed;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Release-schedule simulation and optimization for reduced "
            "mosquito-population models";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "MosqoptError");

  py::class_<SitParams>(m, "SitParams")
      .def(py::init([](double beta_E, double gamma, double tau_E,
                       double delta_E, double beta_F, double delta_F,
                       double delta_s, double nu, double K) {
             SitParams p{beta_E, gamma, tau_E, delta_E, beta_F, delta_F,
                         delta_s, nu, K};
             p.validate();
             return p;
           }),
           py::arg("beta_E") = SitParams{}.beta_E,
           py::arg("gamma") = SitParams{}.gamma,
           py::arg("tau_E") = SitParams{}.tau_E,
           py::arg("delta_E") = SitParams{}.delta_E,
           py::arg("beta_F") = SitParams{}.beta_F,
           py::arg("delta_F") = SitParams{}.delta_F,
           py::arg("delta_s") = SitParams{}.delta_s,
           py::arg("nu") = SitParams{}.nu, py::arg("K") = SitParams{}.K)
      .def_readonly("beta_E", &SitParams::beta_E)
      .def_readonly("gamma", &SitParams::gamma)
      .def_readonly("tau_E", &SitParams::tau_E)
      .def_readonly("delta_E", &SitParams::delta_E)
      .def_readonly("beta_F", &SitParams::beta_F)
      .def_readonly("delta_F", &SitParams::delta_F)
      .def_readonly("delta_s", &SitParams::delta_s)
      .def_readonly("nu", &SitParams::nu)
      .def_readonly("K", &SitParams::K)
      .def("validate", &SitParams::validate)
      .def("with_K", [](const SitParams& p, double K) {
        SitParams q = p;
        q.K = K;
        q.validate();
        return q;
      });

  py::class_<WolParams>(m, "WolParams")
      .def(py::init([](double beta_E, double tau_E, double delta_E,
                       double beta_F, double delta_F, double nu, double K,
                       double s_h, double eta, double delta) {
             WolParams p{beta_E, tau_E, delta_E, beta_F, delta_F, nu, K,
                         s_h, eta, delta};
             p.validate();
             return p;
           }),
           py::arg("beta_E") = WolParams{}.beta_E,
           py::arg("tau_E") = WolParams{}.tau_E,
           py::arg("delta_E") = WolParams{}.delta_E,
           py::arg("beta_F") = WolParams{}.beta_F,
           py::arg("delta_F") = WolParams{}.delta_F,
           py::arg("nu") = WolParams{}.nu, py::arg("K") = WolParams{}.K,
           py::arg("s_h") = WolParams{}.s_h, py::arg("eta") = WolParams{}.eta,
           py::arg("delta") = WolParams{}.delta)
      .def_readonly("beta_E", &WolParams::beta_E)
      .def_readonly("tau_E", &WolParams::tau_E)
      .def_readonly("delta_E", &WolParams::delta_E)
      .def_readonly("beta_F", &WolParams::beta_F)
      .def_readonly("delta_F", &WolParams::delta_F)
      .def_readonly("nu", &WolParams::nu)
      .def_readonly("K", &WolParams::K)
      .def_readonly("s_h", &WolParams::s_h)
      .def_readonly("eta", &WolParams::eta)
      .def_readonly("delta", &WolParams::delta)
      .def_property_readonly("b", &WolParams::b)
      .def("validate", &WolParams::validate)
      .def("with_K", [](const WolParams& p, double K) {
        WolParams q = p;
        q.K = K;
        q.validate();
        return q;
      });

  m.def("sit_rhs",
        [](const std::vector<double>& x, double u, const SitParams& p) {
          return from_state(sit_rhs(to_state(x), u, p));
        },
        py::arg("state"), py::arg("u"), py::arg("params"));
  m.def("wol_rhs",
        [](const std::vector<double>& x, double u, const WolParams& p) {
          return from_state(wol_rhs(to_state(x), u, p));
        },
        py::arg("state"), py::arg("u"), py::arg("params"));

  m.def("derive_carrying_capacity",
        py::overload_cast<double, const SitParams&>(&derive_carrying_capacity),
        py::arg("f_target"), py::arg("params"));
  m.def("derive_carrying_capacity",
        py::overload_cast<double, const WolParams&>(&derive_carrying_capacity),
        py::arg("f_target"), py::arg("params"));

  m.def("sit_equilibria", [](const SitParams& p) {
    py::list out;
    for (auto& e : sit_equilibria(p)) out.append(equilibrium_dict(classify(e, p)));
    return out;
  });
  m.def("wol_equilibria", [](const WolParams& p) {
    py::list out;
    for (auto& e : wol_equilibria(p)) out.append(equilibrium_dict(classify(e, p)));
    return out;
  });

  m.def("check_assumptions",
        [](const SitParams& p, std::optional<double> T, std::optional<double> C,
           std::optional<double> Ubar) {
          std::optional<ReleaseBounds> rb;
          if (T && C && Ubar) rb = ReleaseBounds{*T, *C, *Ubar};
          return assumptions_dict(p, rb);
        },
        py::arg("params"), py::arg("T") = py::none(), py::arg("C") = py::none(),
        py::arg("Ubar") = py::none());
  m.def("check_assumptions",
        [](const WolParams& p, std::optional<double> T, std::optional<double> C,
           std::optional<double> Ubar) {
          std::optional<ReleaseBounds> rb;
          if (T && C && Ubar) rb = ReleaseBounds{*T, *C, *Ubar};
          return assumptions_dict(p, rb);
        },
        py::arg("params"), py::arg("T") = py::none(), py::arg("C") = py::none(),
        py::arg("Ubar") = py::none());

  m.def("project_admissible",
        [](const std::vector<double>& raw, double T, double ubar, double budget) {
          TimeGrid grid(T, static_cast<int>(raw.size()));
          return project_admissible(raw, grid, ubar, budget).values();
        },
        py::arg("raw"), py::arg("T"), py::arg("Ubar"), py::arg("C"));
  m.def("total_release", [](const std::vector<double>& u, double T) {
    double dt = T / static_cast<double>(u.size());
    double s = 0.0;
    for (double v : u) s += v * dt;
    return s;
  });

  m.def("simulate",
        [](const SitParams& p, const std::vector<double>& control, double T,
           double ubar, double budget, std::optional<std::vector<double>> init) {
          TimeGrid grid(T, static_cast<int>(control.size()));
          ControlGrid u(grid, control, ubar, budget);
          ControlProblem pb = ControlProblem::sit(p, grid, ubar, budget);
          StateVec x0 = init ? to_state(*init) : pb.initial_state();
          Trajectory traj = integrate_sit(p, x0, u);
          py::dict d = trajectory_dict(traj);
          d["cost"] = cost_sit(traj);
          return d;
        },
        py::arg("params"), py::arg("control"), py::arg("T"), py::arg("Ubar"),
        py::arg("C"), py::arg("init") = py::none());
  m.def("simulate",
        [](const WolParams& p, const std::vector<double>& control, double T,
           double ubar, double budget, std::optional<std::vector<double>> init) {
          TimeGrid grid(T, static_cast<int>(control.size()));
          ControlGrid u(grid, control, ubar, budget);
          ControlProblem pb = ControlProblem::wolbachia(p, grid, ubar, budget);
          StateVec x0 = init ? to_state(*init) : pb.initial_state();
          Trajectory traj = integrate_wol(p, x0, u);
          py::dict d = trajectory_dict(traj);
          d["cost"] = cost_wol(traj, p);
          return d;
        },
        py::arg("params"), py::arg("control"), py::arg("T"), py::arg("Ubar"),
        py::arg("C"), py::arg("init") = py::none());

  m.def("gradient",
        [](const SitParams& p, const std::vector<double>& control, double T,
           double ubar, double budget) {
          TimeGrid grid(T, static_cast<int>(control.size()));
          ControlProblem pb = ControlProblem::sit(p, grid, ubar, budget);
          return gradient(pb, ControlGrid(grid, control, ubar, budget));
        },
        py::arg("params"), py::arg("control"), py::arg("T"), py::arg("Ubar"),
        py::arg("C"));
  m.def("gradient",
        [](const WolParams& p, const std::vector<double>& control, double T,
           double ubar, double budget) {
          TimeGrid grid(T, static_cast<int>(control.size()));
          ControlProblem pb = ControlProblem::wolbachia(p, grid, ubar, budget);
          return gradient(pb, ControlGrid(grid, control, ubar, budget));
        },
        py::arg("params"), py::arg("control"), py::arg("T"), py::arg("Ubar"),
        py::arg("C"));

  m.def("solve",
        [](const SitParams& p, double T, int N, double ubar, double budget,
           int max_iter, double tol, int starts, std::uint64_t seed) {
          ControlProblem pb = ControlProblem::sit(p, TimeGrid(T, N), ubar, budget);
          return solution_dict(
              solve(pb, options_from_kwargs(max_iter, tol, starts, seed)));
        },
        py::arg("params"), py::arg("T"), py::arg("N"), py::arg("Ubar"),
        py::arg("C"), py::arg("max_iter") = 500, py::arg("tol") = 1e-6,
        py::arg("starts") = 4, py::arg("seed") = 1);
  m.def("solve",
        [](const WolParams& p, double T, int N, double ubar, double budget,
           int max_iter, double tol, int starts, std::uint64_t seed) {
          ControlProblem pb =
              ControlProblem::wolbachia(p, TimeGrid(T, N), ubar, budget);
          return solution_dict(
              solve(pb, options_from_kwargs(max_iter, tol, starts, seed)));
        },
        py::arg("params"), py::arg("T"), py::arg("N"), py::arg("Ubar"),
        py::arg("C"), py::arg("max_iter") = 500, py::arg("tol") = 1e-6,
        py::arg("starts") = 4, py::arg("seed") = 1);

  m.def("eigenvalues", [](const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    SmallMatrix mat(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mat(i, j) = rows[i][j];
    return eigenvalues(mat);
  });

  m.def("run_scenario",
        [](const std::string& config_json, const std::string& command,
           const std::vector<std::string>& overrides) {
          ScenarioConfig cfg =
              scenario_from_json(nlohmann::json::parse(config_json), overrides);
          if (command == "simulate") {
            return run_simulate(cfg).summary.dump(2);
          }
          if (command == "optimize") {
            return run_optimize(cfg).summary.dump(2);
          }
          if (command == "equilibria") {
            return equilibria_report(cfg).dump(2);
          }
          if (command == "check") {
            return assumption_report_json(cfg.assumptions()).dump(2);
          }
          throw Error("unknown command: " + command);
        },
        py::arg("config_json"), py::arg("command"),
        py::arg("overrides") = std::vector<std::string>{});
}

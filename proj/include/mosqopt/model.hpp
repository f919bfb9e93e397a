#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mosqopt/params.hpp"
#include "mosqopt/smallmatrix.hpp"
#include "mosqopt/state.hpp"

namespace mosqopt {

// Right-hand sides of the two controlled systems. u is the release rate
// (sterile males / infected females per day) and enters linearly in the
// last compartment. The fertility ratios F/(F + gamma*Ms) and
// Fi/(Fu + Fi) are defined as 0 when their denominators vanish; along
// trajectories from positive data the denominators stay positive, so the
// convention only matters at the extinction point itself.
StateVec sit_rhs(const StateVec& x, double u, const SitParams& p);
StateVec wol_rhs(const StateVec& x, double u, const WolParams& p);

// Hand-coded partial derivatives of the right-hand sides with respect to
// the state (the control column is the constant unit vector on the last
// compartment). Throws SingularPointError at states where the fertility
// ratio is not differentiable.
SmallMatrix sit_state_jacobian(const StateVec& x, const SitParams& p);
SmallMatrix wol_state_jacobian(const StateVec& x, const WolParams& p);

enum class EquilibriumKind {
  kExtinction,           // every compartment zero
  kNonExtinction,        // persistent wild population (SIT system)
  kWolbachiaInvasion,    // only infected compartments persist
  kWolbachiaExtinction,  // only uninfected compartments persist
  kCoexistence,          // both persist (unstable separator)
};

enum class Stability { kStable, kUnstable, kUndetermined };

std::string to_string(EquilibriumKind k);
std::string to_string(Stability s);

struct Equilibrium {
  StateVec state;
  EquilibriumKind kind;
  Stability stability = Stability::kUndetermined;
  std::vector<std::complex<double>> eigenvalues;
  double residual = 0.0;    // ||rhs(state, u=0)||_inf
  bool residual_ok = true;  // residual < 1e-9 * max(1, ||state||_inf)
  bool closed_form_mismatch = false;
  bool classified_by_surrogate = false;  // Jacobian singular at the point
  std::vector<std::string> flags;
};

// Equilibria of the uncontrolled systems, residual-checked.
//
// sit_equilibria returns {extinction, non-extinction}; if the persistence
// assumptions fail the formal closed forms are still returned, flagged.
//
// wol_equilibria returns {invasion, wolbachia-extinction, coexistence,
// extinction}. The printed coexistence closed form is evaluated verbatim
// and residual-checked; on mismatch a damped-Newton fallback hunts for the
// genuine coexistence root (which is then flagged closed_form_mismatch and
// carries the printed values in its flags). If no valid root is found the
// coexistence entry keeps the seed state with stability undetermined.
std::vector<Equilibrium> sit_equilibria(const SitParams& p);
std::vector<Equilibrium> wol_equilibria(const WolParams& p);

// Capacity K for which the persistent equilibrium carries f_target adult
// females. Throws InvalidParamsError when the persistence condition
// nu*beta_E*beta_F > delta_F*(tau_E + delta_E) fails.
double derive_carrying_capacity(double f_target, const SitParams& p);
double derive_carrying_capacity(double f_target, const WolParams& p);

struct AssumptionCheck {
  std::string name;      // human-readable inequality
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Release-experiment bounds used by the scenario-level feasibility check.
struct ReleaseBounds {
  double T = 0.0;
  double C = 0.0;
  double Ubar = 0.0;
};

// Evaluates every model assumption as a numeric inequality; never throws,
// failures are reported not enforced.
AssumptionReport check_assumptions(const SitParams& p,
                                   std::optional<ReleaseBounds> bounds = {});
AssumptionReport check_assumptions(const WolParams& p,
                                   std::optional<ReleaseBounds> bounds = {});

}  // namespace mosqopt

#include "mosqopt/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mosqopt/errors.hpp"

namespace mosqopt {

namespace {

constexpr double kResidualRelTol = 1e-9;

void check_input(const StateVec& x, double u, int dim, const char* who) {
  if (x.dim() != dim) {
    throw InvalidStateError(std::string(who) + ": wrong state dimension");
  }
  if (!x.all_finite() || !std::isfinite(u)) {
    throw InvalidStateError(std::string(who) + ": non-finite input");
  }
}

double residual_inf(const StateVec& r) { return r.max_abs(); }

Equilibrium make_equilibrium(StateVec state, EquilibriumKind kind, double res) {
  Equilibrium eq;
  eq.state = state;
  eq.kind = kind;
  eq.residual = res;
  eq.residual_ok = res < kResidualRelTol * std::fmax(1.0, state.max_abs());
  if (!eq.residual_ok) eq.flags.push_back("residual-check-failed");
  return eq;
}

}  // namespace

StateVec sit_rhs(const StateVec& x, double u, const SitParams& p) {
  check_input(x, u, 3, "sit_rhs");
  const double E = x[0], F = x[1], Ms = x[2];
  const double mated = F + p.gamma * Ms;
  const double fertile = mated > 0.0 ? F / mated : 0.0;
  StateVec d = StateVec::zeros(3);
  d[0] = p.beta_E * F * (1.0 - E / p.K) * fertile - (p.tau_E + p.delta_E) * E;
  d[1] = p.nu * p.beta_F * E - p.delta_F * F;
  d[2] = u - p.delta_s * Ms;
  return d;
}

StateVec wol_rhs(const StateVec& x, double u, const WolParams& p) {
  check_input(x, u, 4, "wol_rhs");
  const double Eu = x[0], Fu = x[1], Ei = x[2], Fi = x[3];
  const double adults = Fu + Fi;
  const double incompatible = adults > 0.0 ? Fi / adults : 0.0;
  const double room = 1.0 - (Eu + Ei) / p.K;
  StateVec d = StateVec::zeros(4);
  d[0] = p.beta_E * Fu * (1.0 - p.s_h * incompatible) * room -
         (p.tau_E + p.delta_E) * Eu;
  d[1] = p.nu * p.beta_F * Eu - p.delta_F * Fu;
  d[2] = p.eta * p.beta_E * Fi * room - (p.tau_E + p.delta_E) * Ei;
  d[3] = p.nu * p.beta_F * Ei - p.delta * p.delta_F * Fi + u;
  return d;
}

SmallMatrix sit_state_jacobian(const StateVec& x, const SitParams& p) {
  check_input(x, 0.0, 3, "sit_state_jacobian");
  const double E = x[0], F = x[1], Ms = x[2];
  const double mated = F + p.gamma * Ms;
  if (!(mated > 1e-12 * p.K)) {
    throw SingularPointError("sit_state_jacobian: fertility ratio singular");
  }
  const double room = 1.0 - E / p.K;
  SmallMatrix j(3);
  // f_E = beta_E F^2 (1 - E/K) / (F + gamma Ms)
  j(0, 0) = -p.beta_E * F * F / (p.K * mated) - (p.tau_E + p.delta_E);
  j(0, 1) = room * p.beta_E * (F * F + 2.0 * p.gamma * F * Ms) / (mated * mated);
  j(0, 2) = -p.gamma * p.beta_E * F * F * room / (mated * mated);
  j(1, 0) = p.nu * p.beta_F;
  j(1, 1) = -p.delta_F;
  j(2, 2) = -p.delta_s;
  return j;
}

SmallMatrix wol_state_jacobian(const StateVec& x, const WolParams& p) {
  check_input(x, 0.0, 4, "wol_state_jacobian");
  const double Eu = x[0], Fu = x[1], Ei = x[2], Fi = x[3];
  const double adults = Fu + Fi;
  if (!(adults > 1e-12 * p.K)) {
    throw SingularPointError("wol_state_jacobian: fertility ratio singular");
  }
  const double room = 1.0 - (Eu + Ei) / p.K;
  const double hatch = 1.0 - p.s_h * Fi / adults;
  const double a2 = adults * adults;
  SmallMatrix j(4);
  j(0, 0) = -p.beta_E * Fu * hatch / p.K - (p.tau_E + p.delta_E);
  j(0, 1) = p.beta_E * hatch * room + p.beta_E * Fu * room * p.s_h * Fi / a2;
  j(0, 2) = -p.beta_E * Fu * hatch / p.K;
  j(0, 3) = -p.beta_E * Fu * room * p.s_h * Fu / a2;
  j(1, 0) = p.nu * p.beta_F;
  j(1, 1) = -p.delta_F;
  j(2, 0) = -p.eta * p.beta_E * Fi / p.K;
  j(2, 2) = -p.eta * p.beta_E * Fi / p.K - (p.tau_E + p.delta_E);
  j(2, 3) = p.eta * p.beta_E * room;
  j(3, 2) = p.nu * p.beta_F;
  j(3, 3) = -p.delta * p.delta_F;
  return j;
}

std::string to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::kExtinction: return "extinction";
    case EquilibriumKind::kNonExtinction: return "non-extinction";
    case EquilibriumKind::kWolbachiaInvasion: return "wolbachia-invasion";
    case EquilibriumKind::kWolbachiaExtinction: return "wolbachia-extinction";
    case EquilibriumKind::kCoexistence: return "coexistence";
  }
  return "?";
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    case Stability::kUndetermined: return "undetermined";
  }
  return "?";
}

std::vector<Equilibrium> sit_equilibria(const SitParams& p) {
  std::vector<Equilibrium> out;

  StateVec origin = StateVec::zeros(3);
  out.push_back(make_equilibrium(origin, EquilibriumKind::kExtinction,
                                 residual_inf(sit_rhs(origin, 0.0, p))));

  const double persistence =
      1.0 - (p.tau_E + p.delta_E) * p.delta_F / (p.nu * p.beta_E * p.beta_F);
  StateVec eq = StateVec::zeros(3);
  eq[0] = p.K * persistence;
  eq[1] = p.nu * p.beta_F / p.delta_F * eq[0];
  Equilibrium pos = make_equilibrium(
      eq, EquilibriumKind::kNonExtinction,
      eq.all_finite() && eq.min() >= 0.0 ? residual_inf(sit_rhs(eq, 0.0, p))
                                         : std::numeric_limits<double>::quiet_NaN());
  AssumptionReport ar = check_assumptions(p);
  if (!ar.all_pass()) {
    pos.flags.push_back("assumption-failure");
    out.front().flags.push_back("assumption-failure");
  }
  out.push_back(pos);
  return out;
}

namespace {

// Damped Newton on the uncontrolled Wolbachia RHS. Returns true when the
// residual target is met before the iteration budget runs out.
bool newton_root(const WolParams& p, StateVec& x, int max_iter = 80) {
  const double target = kResidualRelTol * std::fmax(1.0, p.K) * 1e-2;
  for (int it = 0; it < max_iter; ++it) {
    StateVec f = wol_rhs(x, 0.0, p);
    double fn = f.max_abs();
    if (fn < target) return true;

    // Finite-difference Jacobian (the analytic one guards the singular set
    // more strictly than the iteration needs).
    SmallMatrix j(4);
    for (int c = 0; c < 4; ++c) {
      double h = 1e-7 * std::fmax(1.0, std::fabs(x[c]));
      StateVec xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      StateVec fp = wol_rhs(xp, 0.0, p), fm = wol_rhs(xm, 0.0, p);
      for (int r = 0; r < 4; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    }

    // Solve j * d = -f by Gaussian elimination with partial pivoting.
    double a[4][5];
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) a[r][c] = j(r, c);
      a[r][4] = -f[r];
    }
    for (int c = 0; c < 4; ++c) {
      int piv = c;
      for (int r = c + 1; r < 4; ++r)
        if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
      if (std::fabs(a[piv][c]) < 1e-14) return false;
      if (piv != c)
        for (int k = 0; k < 5; ++k) std::swap(a[c][k], a[piv][k]);
      for (int r = c + 1; r < 4; ++r) {
        double m = a[r][c] / a[c][c];
        for (int k = c; k < 5; ++k) a[r][k] -= m * a[c][k];
      }
    }
    StateVec d = StateVec::zeros(4);
    for (int r = 3; r >= 0; --r) {
      double s = a[r][4];
      for (int c = r + 1; c < 4; ++c) s -= a[r][c] * d[c];
      d[r] = s / a[r][r];
    }

    // Backtrack on the residual norm.
    double step = 1.0;
    bool moved = false;
    while (step > 1e-12) {
      StateVec xn = axpy(x, step, d);
      bool ok = xn.all_finite();
      if (ok) {
        StateVec fnv = wol_rhs(xn, 0.0, p);
        if (fnv.max_abs() < (1.0 - 1e-4 * step) * fn) {
          x = xn;
          moved = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!moved) return false;
  }
  return wol_rhs(x, 0.0, p).max_abs() < target;
}

bool near(const StateVec& a, const StateVec& b, double tol) {
  return max_abs_diff(a, b) < tol;
}

}  // namespace

std::vector<Equilibrium> wol_equilibria(const WolParams& p) {
  const double b = p.b();
  const double dd = p.delta * p.delta_F;
  const double invasion_room = 1.0 - dd / (b * p.eta);

  StateVec invasion = StateVec::zeros(4);
  invasion[2] = p.K * invasion_room;
  invasion[3] = p.K * (p.nu * p.beta_F / dd - p.nu * p.beta_F / (b * p.eta));

  StateVec wildonly = StateVec::zeros(4);
  wildonly[0] = p.K * (1.0 - p.delta_F / b);
  wildonly[1] = p.K * (p.nu * p.beta_F / p.delta_F - p.nu * p.beta_F / b);

  // Coexistence as printed: the first terms are eta/delta bare, which is
  // dimensionally odd next to the K-scaled terms; it is evaluated verbatim
  // and left to the residual check to accept or reject.
  const double sep = p.s_h + p.delta - 1.0;
  StateVec coex = StateVec::zeros(4);
  coex[0] = (p.eta / p.delta - (1.0 - p.s_h) * p.K * invasion_room) / sep;
  coex[2] = (p.delta * p.K * invasion_room - p.eta / p.delta) / sep;
  coex[1] = p.nu * p.beta_F / p.delta_F * coex[0];
  coex[3] = p.nu * p.beta_F / (p.delta * p.delta_F) * coex[2];

  StateVec origin = StateVec::zeros(4);

  auto safe_residual = [&](const StateVec& s) {
    return s.all_finite() ? residual_inf(wol_rhs(s, 0.0, p))
                          : std::numeric_limits<double>::infinity();
  };

  std::vector<Equilibrium> out;
  out.push_back(make_equilibrium(invasion, EquilibriumKind::kWolbachiaInvasion,
                                 safe_residual(invasion)));
  out.push_back(make_equilibrium(wildonly, EquilibriumKind::kWolbachiaExtinction,
                                 safe_residual(wildonly)));

  Equilibrium co = make_equilibrium(coex, EquilibriumKind::kCoexistence,
                                    safe_residual(coex));
  if (!co.residual_ok) {
    co.closed_form_mismatch = true;
    co.flags.push_back("closed-form-mismatch");
    {
      std::ostringstream os;
      os << "printed-closed-form (" << coex[0] << ", " << coex[1] << ", "
         << coex[2] << ", " << coex[3] << ") residual " << co.residual;
      co.flags.push_back(os.str());
    }

    // Root-finding fallback. The printed seed goes first; if Newton drifts
    // to one of the boundary equilibria, retry from partitions of the total
    // egg mass K*(1 - delta*delta_F/(eta b)) -- that sum is what the
    // infected-egg balance forces at any interior equilibrium, so it is a
    // property of the system, not a guess at the intended formula.
    const double duplicate_tol = 1e-6 * std::fmax(1.0, p.K);
    std::vector<StateVec> seeds = {coex};
    for (double t : {0.75, 0.5, 0.25}) {
      StateVec s = StateVec::zeros(4);
      s[0] = t * p.K * invasion_room;
      s[2] = (1.0 - t) * p.K * invasion_room;
      s[1] = p.nu * p.beta_F / p.delta_F * s[0];
      s[3] = p.nu * p.beta_F / (p.delta * p.delta_F) * s[2];
      seeds.push_back(s);
    }
    bool found = false;
    for (const StateVec& seed : seeds) {
      StateVec x = seed;
      if (!x.all_finite() || !newton_root(p, x)) continue;
      if (x.min() < -1e-9 * p.K) continue;
      if (near(x, invasion, duplicate_tol) || near(x, wildonly, duplicate_tol) ||
          near(x, origin, duplicate_tol)) {
        continue;
      }
      double res = residual_inf(wol_rhs(x, 0.0, p));
      co.state = x;
      co.residual = res;
      co.residual_ok = res < kResidualRelTol * std::fmax(1.0, x.max_abs());
      co.flags.push_back("newton-fallback-converged");
      found = true;
      break;
    }
    if (!found) {
      co.stability = Stability::kUndetermined;
      co.flags.push_back("newton-fallback-failed");
    }
  }
  out.push_back(co);

  out.push_back(make_equilibrium(origin, EquilibriumKind::kExtinction,
                                 safe_residual(origin)));

  AssumptionReport ar = check_assumptions(p);
  if (!ar.all_pass()) {
    for (auto& eq : out) eq.flags.push_back("assumption-failure");
  }
  return out;
}

namespace {

double capacity_for(double f_target, double beta_E, double beta_F, double nu,
                    double tau_E, double delta_E, double delta_F) {
  if (f_target < 0.0) {
    throw InvalidParamsError("derive_carrying_capacity: F_target must be >= 0");
  }
  const double persistence =
      1.0 - (tau_E + delta_E) * delta_F / (nu * beta_E * beta_F);
  if (!(persistence > 0.0)) {
    throw InvalidParamsError(
        "derive_carrying_capacity: persistence condition "
        "nu*beta_E*beta_F > delta_F*(tau_E+delta_E) fails; no positive equilibrium");
  }
  const double egg_eq = delta_F * f_target / (nu * beta_F);
  return egg_eq / persistence;
}

}  // namespace

double derive_carrying_capacity(double f_target, const SitParams& p) {
  return capacity_for(f_target, p.beta_E, p.beta_F, p.nu, p.tau_E, p.delta_E,
                      p.delta_F);
}

double derive_carrying_capacity(double f_target, const WolParams& p) {
  return capacity_for(f_target, p.beta_E, p.beta_F, p.nu, p.tau_E, p.delta_E,
                      p.delta_F);
}

namespace {

AssumptionCheck strict_greater(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs > rhs};
}

AssumptionCheck strict_less(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs < rhs};
}

void append_release_check(AssumptionReport& r,
                          const std::optional<ReleaseBounds>& bounds) {
  if (bounds) {
    r.checks.push_back(
        strict_greater("Ubar*T > C", bounds->Ubar * bounds->T, bounds->C));
  }
}

}  // namespace

AssumptionReport check_assumptions(const SitParams& p,
                                   std::optional<ReleaseBounds> bounds) {
  AssumptionReport r;
  // delta_M = delta_F in the reduced system.
  r.checks.push_back(strict_greater("delta_s > delta_F", p.delta_s, p.delta_F));
  r.checks.push_back(strict_greater("nu*beta_E*beta_F > delta_F*(tau_E+delta_E)",
                                    p.nu * p.beta_E * p.beta_F,
                                    p.delta_F * (p.tau_E + p.delta_E)));
  append_release_check(r, bounds);
  return r;
}

AssumptionReport check_assumptions(const WolParams& p,
                                   std::optional<ReleaseBounds> bounds) {
  AssumptionReport r;
  const double b = p.b();
  r.checks.push_back(
      strict_greater("eta*b > delta*delta_F", p.eta * b, p.delta * p.delta_F));
  const double scaled_room = p.K * (1.0 - p.delta * p.delta_F / (p.eta * b));
  r.checks.push_back(strict_less("eta/delta^2 < K*(1-delta*delta_F/(eta*b))",
                                 p.eta / (p.delta * p.delta), scaled_room));
  const double upper = p.s_h < 1.0
                           ? p.eta / (p.delta * (1.0 - p.s_h))
                           : std::numeric_limits<double>::infinity();
  r.checks.push_back(strict_less(
      "K*(1-delta*delta_F/(eta*b)) < eta/(delta*(1-s_h))", scaled_room, upper));
  append_release_check(r, bounds);
  return r;
}

}  // namespace mosqopt

#include "mosqopt/stability.hpp"

#include <algorithm>
#include <cmath>

#include "mosqopt/errors.hpp"

namespace mosqopt {

SmallMatrix fd_jacobian(const std::function<StateVec(const StateVec&)>& f,
                        const StateVec& x) {
  const int n = x.dim();
  SmallMatrix j(n);
  for (int c = 0; c < n; ++c) {
    const double h = 1e-6 * std::fmax(1.0, std::fabs(x[c]));
    StateVec xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    StateVec fp = f(xp), fm = f(xm);
    for (int r = 0; r < n; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
  }
  return j;
}

SmallMatrix sit_jacobian(const StateVec& x, const SitParams& p) {
  if (!(x[1] + p.gamma * x[2] > 1e-12 * p.K)) {
    throw SingularPointError("sit_jacobian: fertility-ratio denominator vanishes");
  }
  return fd_jacobian(
      [&p](const StateVec& s) { return sit_rhs(s, 0.0, p); }, x);
}

SmallMatrix wol_jacobian(const StateVec& x, const WolParams& p) {
  if (!(x[1] + x[3] > 1e-12 * p.K)) {
    throw SingularPointError("wol_jacobian: fertility-ratio denominator vanishes");
  }
  return fd_jacobian(
      [&p](const StateVec& s) { return wol_rhs(s, 0.0, p); }, x);
}

SmallMatrix sit_extinction_jacobian(const SitParams& p, double eps) {
  if (!(eps >= 0.0)) throw InvalidParamsError("epsilon must be >= 0");
  SmallMatrix m(3);
  m(0, 0) = -(p.tau_E + p.delta_E);
  m(0, 1) = p.beta_E / (1.0 + eps);
  m(1, 0) = p.nu * p.beta_F;
  m(1, 1) = -p.delta_F;
  m(2, 0) = (1.0 - p.nu) * p.beta_F;
  m(2, 2) = -p.delta_F;  // delta_M = delta_F under the reduction
  return m;
}

SmallMatrix wol_extinction_jacobian(const WolParams& p) {
  SmallMatrix m(4);
  // Wild subsystem on the infection-free face (hatching unimpaired).
  m(0, 0) = -(p.tau_E + p.delta_E);
  m(0, 1) = p.beta_E;
  m(1, 0) = p.nu * p.beta_F;
  m(1, 1) = -p.delta_F;
  // Infected subsystem on the wild-free face.
  m(2, 2) = -(p.tau_E + p.delta_E);
  m(2, 3) = p.eta * p.beta_E;
  m(3, 2) = p.nu * p.beta_F;
  m(3, 3) = -p.delta * p.delta_F;
  return m;
}

std::vector<double> characteristic_polynomial(const SmallMatrix& m) {
  const int n = m.size();
  // Faddeev-LeVerrier: M1 = A, c1 = -tr(M1); M_{k+1} = A(M_k + c_k I).
  SmallMatrix mk = m;
  std::vector<double> c(n);
  c[0] = -mk.trace();
  for (int k = 1; k < n; ++k) {
    SmallMatrix shifted = mk;
    for (int i = 0; i < n; ++i) shifted(i, i) += c[k - 1];
    SmallMatrix next(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += m(i, l) * shifted(l, j);
        next(i, j) = s;
      }
    mk = next;
    c[k] = -mk.trace() / (k + 1);
  }
  return c;
}

namespace {

using cplx = std::complex<double>;

cplx poly_eval(const std::vector<double>& c, cplx x) {
  cplx v = 1.0;
  for (double ck : c) v = v * x + ck;
  return v;
}

cplx poly_deriv_eval(const std::vector<double>& c, cplx x) {
  const int n = static_cast<int>(c.size());
  cplx v = static_cast<double>(n);
  for (int k = 0; k < n - 1; ++k) v = v * x + static_cast<double>(n - 1 - k) * c[k];
  return v;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const SmallMatrix& m) {
  const int n = m.size();
  if (n < 1 || n > SmallMatrix::kMax) {
    throw NumericalFailureError("eigenvalues: dimension must be 1..6");
  }
  if (!m.all_finite()) {
    throw InvalidStateError("eigenvalues: non-finite matrix");
  }

  // Scale to unit norm so the root iteration sees O(1) magnitudes.
  const double scale = m.inf_norm();
  if (scale == 0.0) return std::vector<cplx>(n, 0.0);
  SmallMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = m(i, j) / scale;

  std::vector<double> chi = characteristic_polynomial(s);

  std::vector<cplx> z(n);
  if (n == 1) {
    z[0] = -chi[0];
  } else {
    // Durand-Kerner from the standard staggered complex seeds.
    const cplx seed(0.4, 0.9);
    cplx pw = 1.0;
    for (int i = 0; i < n; ++i) {
      pw *= seed;
      z[i] = pw;
    }
    for (int it = 0; it < 500; ++it) {
      double move = 0.0;
      for (int i = 0; i < n; ++i) {
        cplx denom = 1.0;
        for (int j = 0; j < n; ++j)
          if (j != i) denom *= z[i] - z[j];
        if (std::abs(denom) < 1e-300) {
          denom = 1e-300;
        }
        cplx step = poly_eval(chi, z[i]) / denom;
        z[i] -= step;
        move = std::fmax(move, std::abs(step));
      }
      if (move < 1e-14) break;
    }
    // Newton polish (helps clustered roots).
    for (int i = 0; i < n; ++i) {
      for (int it = 0; it < 8; ++it) {
        cplx d = poly_deriv_eval(chi, z[i]);
        if (std::abs(d) < 1e-30) break;
        cplx step = poly_eval(chi, z[i]) / d;
        z[i] -= step;
        if (std::abs(step) < 1e-16) break;
      }
      // Real roots drift a few ulps into the complex plane; snap them back.
      if (std::fabs(z[i].imag()) < 1e-10 * std::fmax(1.0, std::fabs(z[i].real()))) {
        cplx real_cand(z[i].real(), 0.0);
        if (std::abs(poly_eval(chi, real_cand)) <= 2.0 * std::abs(poly_eval(chi, z[i]))) {
          z[i] = real_cand;
        }
      }
    }
  }

  for (const cplx& root : z) {
    if (!(std::abs(poly_eval(chi, root)) < 1e-8)) {
      throw NumericalFailureError("eigenvalues: root residual above tolerance");
    }
  }

  for (auto& root : z) root *= scale;
  std::sort(z.begin(), z.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return z;
}

namespace {

Stability classify_spectrum(const std::vector<std::complex<double>>& eigs,
                            double margin) {
  bool all_negative = true;
  for (const auto& l : eigs) {
    if (l.real() > margin) return Stability::kUnstable;
    if (!(l.real() < -margin)) all_negative = false;
  }
  return all_negative ? Stability::kStable : Stability::kUndetermined;
}

Equilibrium classify_with(Equilibrium eq, const SmallMatrix& j, bool surrogate) {
  eq.eigenvalues = eigenvalues(j);
  eq.stability = classify_spectrum(eq.eigenvalues, 1e-9 * j.inf_norm());
  eq.classified_by_surrogate = surrogate;
  return eq;
}

}  // namespace

Equilibrium classify(Equilibrium eq, const SitParams& p) {
  if (eq.kind == EquilibriumKind::kExtinction) {
    // The reduced system is not differentiable at the origin; classify
    // through the comparison system for the unreduced population instead.
    return classify_with(std::move(eq), sit_extinction_jacobian(p, 0.0),
                         true);
  }
  if (!eq.state.all_finite() ||
      !(eq.state[1] + p.gamma * eq.state[2] > 1e-12 * p.K)) {
    eq.stability = Stability::kUndetermined;
    eq.flags.push_back("jacobian-singular");
    return eq;
  }
  SmallMatrix j = sit_state_jacobian(eq.state, p);
  return classify_with(std::move(eq), j, false);
}

Equilibrium classify(Equilibrium eq, const WolParams& p) {
  if (eq.kind == EquilibriumKind::kExtinction) {
    return classify_with(std::move(eq), wol_extinction_jacobian(p), true);
  }
  if (!eq.state.all_finite() || !(eq.state[1] + eq.state[3] > 1e-12 * p.K)) {
    eq.stability = Stability::kUndetermined;
    eq.flags.push_back("jacobian-singular");
    return eq;
  }
  SmallMatrix j = wol_state_jacobian(eq.state, p);
  return classify_with(std::move(eq), j, false);
}

}  // namespace mosqopt

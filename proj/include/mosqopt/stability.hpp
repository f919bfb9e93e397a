#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "mosqopt/model.hpp"
#include "mosqopt/params.hpp"
#include "mosqopt/smallmatrix.hpp"
#include "mosqopt/state.hpp"

namespace mosqopt {

// Central finite differences with step 1e-6 * max(1, |x_i|) per component.
SmallMatrix fd_jacobian(const std::function<StateVec(const StateVec&)>& f,
                        const StateVec& x);

// Model-aware Jacobians (finite differences behind the singularity guard:
// throws SingularPointError when the fertility-ratio denominator is below
// 1e-12*K). Cross-validated against the analytic partials in tests.
SmallMatrix sit_jacobian(const StateVec& x, const SitParams& p);
SmallMatrix wol_jacobian(const StateVec& x, const WolParams& p);

// The 3x3 comparison-system matrix certifying instability of the SIT
// extinction state: rows
//   (-(tau_E+delta_E), beta_E/(1+eps), 0)
//   (nu beta_F,        -delta_F,       0)
//   ((1-nu) beta_F,    0,              -delta_M)   with delta_M = delta_F.
SmallMatrix sit_extinction_jacobian(const SitParams& p, double eps);

// Face-restricted linearization at the Wolbachia total-extinction point,
// where the mixed fertility ratio is not differentiable: block diagonal of
// the wild subsystem on the {Ei = Fi = 0} face and the infected subsystem
// on the {Eu = Fu = 0} face. A positive eigenvalue of either block grows
// along its invariant face, certifying instability.
SmallMatrix wol_extinction_jacobian(const WolParams& p);

// Monic characteristic polynomial coefficients (Faddeev-LeVerrier):
// x^n + c[0] x^{n-1} + ... + c[n-1].
std::vector<double> characteristic_polynomial(const SmallMatrix& m);

// All eigenvalues, descending real part (ties: descending imaginary part).
// Durand-Kerner iteration on the characteristic polynomial of the
// norm-scaled matrix, then Newton polish; each root satisfies
// |chi(lambda)| < 1e-8 * ||m||^n or NumericalFailureError is thrown.
std::vector<std::complex<double>> eigenvalues(const SmallMatrix& m);

// Fills stability and eigenvalues. Classification margin 1e-9 * ||J||_inf:
// stable iff every real part is below -margin, unstable iff some real part
// exceeds +margin, undetermined otherwise. Extinction points use the
// surrogate matrices above (the reduced systems are singular there).
Equilibrium classify(Equilibrium eq, const SitParams& p);
Equilibrium classify(Equilibrium eq, const WolParams& p);

}  // namespace mosqopt

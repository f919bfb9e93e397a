#include "mosqopt/params.hpp"

#include <cmath>
#include <sstream>

#include "mosqopt/errors.hpp"

namespace mosqopt {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidParamsError(what);
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw InvalidParamsError(std::string(name) + " is not finite");
  }
}

// Tabulated field ranges; membership is advisory (warn-only).
void warn_interval(std::vector<std::string>& out, const char* name, double v,
                   double lo, double hi) {
  if (v < lo || v > hi) {
    std::ostringstream os;
    os << name << " = " << v << " outside the tabulated interval [" << lo
       << ", " << hi << "]";
    out.push_back(os.str());
  }
}

}  // namespace

std::vector<std::string> SitParams::validate() const {
  for (auto [v, n] : {std::pair{beta_E, "beta_E"}, {gamma, "gamma"},
                      {tau_E, "tau_E"}, {delta_E, "delta_E"},
                      {beta_F, "beta_F"}, {delta_F, "delta_F"},
                      {delta_s, "delta_s"}, {nu, "nu"}, {K, "K"}}) {
    require_finite(v, n);
  }
  require(beta_E > 0, "beta_E must be > 0");
  require(tau_E > 0, "tau_E must be > 0");
  require(delta_E > 0, "delta_E must be > 0");
  require(beta_F > 0, "beta_F must be > 0");
  require(delta_F > 0, "delta_F must be > 0");
  require(delta_s > 0, "delta_s must be > 0");
  require(nu > 0 && nu < 1, "nu must lie in (0, 1)");
  require(gamma >= 0 && gamma <= 1, "gamma must lie in [0, 1]");
  require(K > 0, "K must be > 0");

  std::vector<std::string> warnings;
  warn_interval(warnings, "beta_E", beta_E, 7.46, 14.85);
  warn_interval(warnings, "tau_E", tau_E, 0.005, 0.25);
  warn_interval(warnings, "delta_E", delta_E, 0.023, 0.046);
  warn_interval(warnings, "beta_F", beta_F, 0.005, 0.025);
  warn_interval(warnings, "delta_F", delta_F, 0.033, 0.046);
  return warnings;
}

std::vector<std::string> WolParams::validate() const {
  for (auto [v, n] : {std::pair{beta_E, "beta_E"}, {tau_E, "tau_E"},
                      {delta_E, "delta_E"}, {beta_F, "beta_F"},
                      {delta_F, "delta_F"}, {nu, "nu"}, {K, "K"},
                      {s_h, "s_h"}, {eta, "eta"}, {delta, "delta"}}) {
    require_finite(v, n);
  }
  require(beta_E > 0, "beta_E must be > 0");
  require(tau_E > 0, "tau_E must be > 0");
  require(delta_E > 0, "delta_E must be > 0");
  require(beta_F > 0, "beta_F must be > 0");
  require(delta_F > 0, "delta_F must be > 0");
  require(nu > 0 && nu < 1, "nu must lie in (0, 1)");
  require(K > 0, "K must be > 0");
  require(s_h > 0 && s_h <= 1, "s_h must lie in (0, 1]");
  require(eta > 0 && eta < 1, "eta must lie in (0, 1)");
  require(delta > 1, "delta must be > 1");

  std::vector<std::string> warnings;
  warn_interval(warnings, "beta_E", beta_E, 7.46, 14.85);
  warn_interval(warnings, "tau_E", tau_E, 0.005, 0.25);
  warn_interval(warnings, "delta_E", delta_E, 0.023, 0.046);
  warn_interval(warnings, "beta_F", beta_F, 0.005, 0.025);
  warn_interval(warnings, "delta_F", delta_F, 0.033, 0.046);
  warn_interval(warnings, "eta", eta, 0.85, 1.0);
  warn_interval(warnings, "delta", delta, 1.0, 1.7);
  return warnings;
}

}  // namespace mosqopt

#pragma once

#include <string>
#include <vector>

namespace mosqopt {

// Biological rates for the reduced sterile-male system. Units: beta_E in
// eggs/(female day); tau_E, delta_E, delta_F, delta_s, beta_F in 1/day;
// gamma, nu dimensionless; K in eggs.
//
// The reduction to three compartments assumes equal male/female emergence
// (nu = 1/2) and equal adult death rates (delta_M = delta_F); delta_M is
// therefore not a separate field and every place that conceptually needs it
// uses delta_F.
struct SitParams {
  double beta_E = 10.0;    // effective fecundity
  double gamma = 1.0;      // mating competitiveness of sterile males
  double tau_E = 0.05;     // hatching rate
  double delta_E = 0.03;   // aquatic-phase death rate
  double beta_F = 0.010;   // female emergence rate
  double delta_F = 0.04;   // adult female death rate
  double delta_s = 0.12;   // sterile male death rate
  double nu = 0.5;         // female fraction at emergence
  double K = 43641.025641025641;  // egg carrying capacity

  // Throws InvalidParamsError on hard violations; returns interval warnings
  // for values outside the tabulated field ranges.
  std::vector<std::string> validate() const;
};

// Adds the Wolbachia infection parameters; gamma and delta_s do not apply.
struct WolParams {
  double beta_E = 10.0;
  double tau_E = 0.05;
  double delta_E = 0.03;
  double beta_F = 0.010;
  double delta_F = 0.04;
  double nu = 0.5;
  double K = 43641.025641025641;
  double s_h = 0.9951;   // cytoplasmic incompatibility probability
  double eta = 0.95;     // fecundity reduction of infected females
  double delta = 1.25;   // mortality increase of infected mosquitoes

  // Net reproduction coefficient; recomputed on every access so it can
  // never fall out of sync with the fields it derives from.
  double b() const { return nu * beta_F * beta_E / (tau_E + delta_E); }

  std::vector<std::string> validate() const;
};

}  // namespace mosqopt

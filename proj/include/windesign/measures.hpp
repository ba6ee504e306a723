#pragma once

#include "windesign/ustat.hpp"

namespace windesign {

struct MeasureValues {
  double wr = 1, nb = 0, wo = 1, door = 0.5;
};

// WR = tau_w/tau_l, NB = tau_w - tau_l, WO = (tau_w + tau_tie/2)/(tau_l + tau_tie/2),
// DOOR = 0.5*(1 + NB). Throws DegenerateError when a denominator vanishes.
MeasureValues measure_values(const PluginEstimates& est);

// |effect| on the measure's own testing scale (log scale for WR/WO), under the
// supplied (alternative) plug-ins.
double effect_delta(Measure measure, const PluginEstimates& alt);

// Large-sample variance quantity A(H) for the standardized statistic, with
// allocation ratio r = n/m.
double variance_quantity(Measure measure, const PluginEstimates& est, double r);

struct MeasureQuantities {
  Measure measure = Measure::WR;
  double delta = 0;   // effect size under the alternative
  double a_null = 0;  // A(H0)
  double a_alt = 0;   // A(HA)
};

MeasureQuantities measure_quantities(Measure measure, const PluginEstimates& null_est,
                                     const PluginEstimates& alt_est, double r);

// Power ~ Phi((-z_{1-a/2}*sqrt(A0) + sqrt(m)*Delta)/sqrt(AA)); the second
// (wrong-tail) term is off by default and adds < alpha/2.
double power_closed_form(const MeasureQuantities& q, long long m, double alpha,
                         bool include_second_tail = false);

// m = ceil[(z_{1-a/2}*sqrt(A0) + z_{power}*sqrt(AA))^2 / Delta^2].
// target_power restricted to (0.5, 1): below one half the closed form and its
// exact inversion diverge.
long long sample_size_closed_form(const MeasureQuantities& q, double alpha, double target_power);

// Finite-sample variant: exact variances (xi^{11} retained) mapped through the
// delta method per measure.
double power_exact(const PluginEstimates& null_est, const PluginEstimates& alt_est, Measure measure,
                   long long m, long long n, double alpha, bool include_second_tail = false);

// Monotone integer bisection of power_exact over m in [2, 1e8]; n = round(r*m).
long long sample_size_exact(const PluginEstimates& null_est, const PluginEstimates& alt_est,
                            Measure measure, double r, double alpha, double target_power);

// Tie-only variance quantities (Yu-Ganju / Barnhart style), defined for WR and
// NB only: WR: 4(1+t)(1+r)/(3r(1-t));  NB: (1+t)(1-t)(1+r)/(3r).
double yu_ganju_variance(Measure measure, double tau_tie_alt, double r);

struct PowerTriplet {
  double p_alt = 0;  // full formula
  double p_null = 0; // A(HA) replaced by A(H0)
  double p_yg = 0;   // A(H0) replaced by the tie-only quantity; NaN for WO/DOOR
};

PowerTriplet sensitivity_power_triplet(const PluginEstimates& null_est,
                                       const PluginEstimates& alt_est, Measure measure, long long m,
                                       double r, double alpha);

}  // namespace windesign

#pragma once

#include <cstdint>

#include "windesign/compare.hpp"
#include "windesign/pair_kernel.hpp"

namespace windesign {

// Covariance components xi_uv^{rs}: u,v index the win/loss kernels, the
// superscript says which of the treatment (first) and control (second) subject
// indices are shared between the two kernel evaluations.
struct XiComponents {
  double ww10 = 0, ww01 = 0, ww11 = 0;
  double ll10 = 0, ll01 = 0, ll11 = 0;
  double wl10 = 0, wl01 = 0, wl11 = 0;
};

struct PluginEstimates {
  double tau_w = 0, tau_l = 0, tau_tie = 1;
  XiComponents xi;
};

// Exact finite-sample estimators from integer pair counts. Uses the
// row/column-aggregate identity
//   sum_{j1 != j2} phi_u^{i j1} phi_v^{i j2} = W_i V_i - sum_j phi_u phi_v
// (and phi_w phi_l == 0), so the whole computation is O(m*n) given the counts.
// Values are raw - small samples can give legitimately negative diagonals;
// clamping is the caller's decision at averaging time.
PluginEstimates plugins_from_counts(const PairCounts& counts);

PluginEstimates estimate_plugins(const ArmSample& treat, const ArmSample& ctrl,
                                 const std::vector<LevelRule>& rules);

struct VarianceComponents {
  double var_uw = 0, var_ul = 0, cov_wl = 0;
};

// Exact variance/covariance of the win and loss statistics at trial sizes
// (m, n), retaining the xi^{11} term.
VarianceComponents exact_variance(const PluginEstimates& est, long long m, long long n);

// Large-sample form: xi^{10}/m + xi^{01}/(r*m), xi^{11} dropped.
VarianceComponents large_sample_variance(const PluginEstimates& est, long long m, double r);

// Clamp negative diagonal xi (floating-point cancellation in averaged output)
// to zero; bumps *clamped per adjusted component when provided.
PluginEstimates clamp_nonnegative_diagonals(const PluginEstimates& est, int* clamped = nullptr);

}  // namespace windesign

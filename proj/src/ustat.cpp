#include "windesign/ustat.hpp"

namespace windesign {

PluginEstimates plugins_from_counts(const PairCounts& c) {
  const double m = static_cast<double>(c.m), n = static_cast<double>(c.n);
  const double pairs = m * n;
  PluginEstimates e;
  e.tau_w = c.wins / pairs;
  e.tau_l = c.losses / pairs;
  e.tau_tie = static_cast<double>(c.m * c.n - c.wins - c.losses) / pairs;

  // Shared treatment subject, two distinct controls; the indicator kernels make
  // sum_j phi^2 = the plain win/loss totals and phi_w*phi_l vanish pairwise.
  const double d10 = m * n * (n - 1.0);
  e.xi.ww10 = (c.row_w2 - c.wins) / d10 - e.tau_w * e.tau_w;
  e.xi.ll10 = (c.row_l2 - c.losses) / d10 - e.tau_l * e.tau_l;
  e.xi.wl10 = c.row_wl / d10 - e.tau_w * e.tau_l;

  // Shared control subject, two distinct treatments.
  const double d01 = n * m * (m - 1.0);
  e.xi.ww01 = (c.col_w2 - c.wins) / d01 - e.tau_w * e.tau_w;
  e.xi.ll01 = (c.col_l2 - c.losses) / d01 - e.tau_l * e.tau_l;
  e.xi.wl01 = c.col_wl / d01 - e.tau_w * e.tau_l;

  // Same pair in both kernels.
  e.xi.ww11 = e.tau_w - e.tau_w * e.tau_w;
  e.xi.ll11 = e.tau_l - e.tau_l * e.tau_l;
  e.xi.wl11 = -e.tau_w * e.tau_l;
  return e;
}

PluginEstimates estimate_plugins(const ArmSample& treat, const ArmSample& ctrl,
                                 const std::vector<LevelRule>& rules) {
  return plugins_from_counts(accumulate_pair_counts(build_pair_tables(treat, ctrl, rules)));
}

VarianceComponents exact_variance(const PluginEstimates& e, long long m, long long n) {
  const double dm = static_cast<double>(m), dn = static_cast<double>(n);
  const double c10 = (dn - 1.0) / (dm * dn);
  const double c01 = (dm - 1.0) / (dm * dn);
  const double c11 = 1.0 / (dm * dn);
  VarianceComponents v;
  v.var_uw = c10 * e.xi.ww10 + c01 * e.xi.ww01 + c11 * e.xi.ww11;
  v.var_ul = c10 * e.xi.ll10 + c01 * e.xi.ll01 + c11 * e.xi.ll11;
  v.cov_wl = c10 * e.xi.wl10 + c01 * e.xi.wl01 + c11 * e.xi.wl11;
  return v;
}

VarianceComponents large_sample_variance(const PluginEstimates& e, long long m, double r) {
  const double dm = static_cast<double>(m);
  VarianceComponents v;
  v.var_uw = e.xi.ww10 / dm + e.xi.ww01 / (r * dm);
  v.var_ul = e.xi.ll10 / dm + e.xi.ll01 / (r * dm);
  v.cov_wl = e.xi.wl10 / dm + e.xi.wl01 / (r * dm);
  return v;
}

PluginEstimates clamp_nonnegative_diagonals(const PluginEstimates& est, int* clamped) {
  PluginEstimates out = est;
  int hits = 0;
  for (double* p : {&out.xi.ww10, &out.xi.ww01, &out.xi.ww11, &out.xi.ll10, &out.xi.ll01,
                    &out.xi.ll11}) {
    if (*p < 0) {
      *p = 0;
      ++hits;
    }
  }
  if (clamped) *clamped += hits;
  return out;
}

}  // namespace windesign

#include "windesign/pair_kernel.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>

#include "windesign/errors.hpp"
#include "pair_kernel_impl.hpp"

namespace windesign {

PairTables build_pair_tables(const ArmSample& treat, const ArmSample& ctrl,
                             const std::vector<LevelRule>& rules) {
  const int q = static_cast<int>(rules.size());
  const int m = treat.n, n = ctrl.n;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  PairTables t;
  t.q = q;
  t.m = m;
  t.n = n;
  t.lhs_gt.assign(q, std::vector<double>(m));
  t.lhs_lt.assign(q, std::vector<double>(m));
  t.rhs_gt.assign(q, std::vector<double>(n));
  t.rhs_lt.assign(q, std::vector<double>(n));
  t.swap_wl.assign(q, 0);

  for (int l = 0; l < q; ++l) {
    const LevelRule& rule = rules[l];
    t.swap_wl[l] = rule.lower_wins ? 1 : 0;
    const double* tv = treat.values[l].data();
    const double* cv = ctrl.values[l].data();
    if (rule.time_to_event) {
      const uint8_t* te = treat.events[l].data();
      const uint8_t* ce = ctrl.events[l].data();
      for (int i = 0; i < m; ++i) {
        t.lhs_gt[l][i] = tv[i];
        // No treatment event => the loss test t < c - delta can never fire.
        t.lhs_lt[l][i] = te[i] ? tv[i] : kInf;
      }
      for (int j = 0; j < n; ++j) {
        // No control event => the win test t > c + delta can never fire.
        t.rhs_gt[l][j] = ce[j] ? cv[j] + rule.threshold : kInf;
        t.rhs_lt[l][j] = cv[j] - rule.threshold;
      }
    } else {
      for (int i = 0; i < m; ++i) t.lhs_gt[l][i] = t.lhs_lt[l][i] = tv[i];
      for (int j = 0; j < n; ++j) {
        t.rhs_gt[l][j] = cv[j] + rule.threshold;
        t.rhs_lt[l][j] = cv[j] - rule.threshold;
      }
    }
  }
  return t;
}

PairKernelFn scalar_pair_kernel() { return &detail::scalar_pair_kernel_impl; }

PairKernelFn avx2_pair_kernel() {
#if defined(WINDESIGN_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return &detail::avx2_pair_kernel_impl;
#endif
  return nullptr;
}

PairKernelFn active_pair_kernel() {
  const char* env = std::getenv("WINDESIGN_KERNEL");
  if (env && std::strcmp(env, "scalar") == 0) return scalar_pair_kernel();
  if (env && std::strcmp(env, "avx2") == 0) {
    PairKernelFn f = avx2_pair_kernel();
    if (!f) throw ConfigError("WINDESIGN_KERNEL=avx2 requested but AVX2 is unavailable");
    return f;
  }
  if (env && *env) throw ConfigError(std::string("unknown WINDESIGN_KERNEL value: ") + env);
  PairKernelFn f = avx2_pair_kernel();
  return f ? f : scalar_pair_kernel();
}

const char* active_pair_kernel_name() {
  return active_pair_kernel() == scalar_pair_kernel() ? "scalar" : "avx2";
}

PairCounts accumulate_pair_counts(const PairTables& tables) {
  PairCounts counts;
  KernelWorkspace ws;
  active_pair_kernel()(tables, counts, ws);
  return counts;
}

}  // namespace windesign

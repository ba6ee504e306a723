#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "windesign/sampler.hpp"

namespace windesign {

// Precomputed comparison operands. For each level the win test is
//   lhs_gt[i] > rhs_gt[j]      and the loss test is      lhs_lt[i] < rhs_lt[j].
// Thresholds are folded into the control side (c+delta / c-delta) and censored
// TTE subjects are folded to +inf on whichever side disables them, so the
// inner loop is two pure double compares per level regardless of endpoint type.
struct PairTables {
  int q = 0;
  int m = 0;  // treatment rows
  int n = 0;  // control columns
  std::vector<std::vector<double>> lhs_gt, lhs_lt;  // per level, length m
  std::vector<std::vector<double>> rhs_gt, rhs_lt;  // per level, length n
  std::vector<uint8_t> swap_wl;                     // lower-wins levels swap win/loss
};

PairTables build_pair_tables(const ArmSample& treat, const ArmSample& ctrl,
                             const std::vector<LevelRule>& rules);

// All counts a batch needs, in integers: win/loss totals, the row/column
// cross-products feeding the covariance-component estimators, and per-level
// deciding counts for the decomposition table.
struct PairCounts {
  int64_t m = 0, n = 0;
  int64_t wins = 0, losses = 0;
  int64_t row_w2 = 0, row_l2 = 0, row_wl = 0;  // sum over rows of W_i^2, L_i^2, W_i*L_i
  int64_t col_w2 = 0, col_l2 = 0, col_wl = 0;  // same over columns
  std::vector<int64_t> level_wins, level_losses;
};

// Column accumulators reused across batches (the only O(n) scratch state).
struct KernelWorkspace {
  std::vector<int64_t> col_w, col_l;
};

using PairKernelFn = void (*)(const PairTables&, PairCounts&, KernelWorkspace&);

PairKernelFn scalar_pair_kernel();
PairKernelFn avx2_pair_kernel();    // nullptr when not compiled in or CPU lacks AVX2
PairKernelFn active_pair_kernel();  // runtime choice; WINDESIGN_KERNEL=scalar|avx2 overrides
const char* active_pair_kernel_name();

PairCounts accumulate_pair_counts(const PairTables& tables);  // active kernel, fresh workspace

}  // namespace windesign

#include "pair_kernel_impl.hpp"

namespace windesign::detail {

void scalar_pair_kernel_impl(const PairTables& t, PairCounts& out, KernelWorkspace& ws) {
  const int q = t.q, m = t.m, n = t.n;
  out = PairCounts{};
  out.m = m;
  out.n = n;
  out.level_wins.assign(q, 0);
  out.level_losses.assign(q, 0);
  ws.col_w.assign(n, 0);
  ws.col_l.assign(n, 0);

  for (int i = 0; i < m; ++i) {
    int64_t wi = 0, li = 0;
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < q; ++l) {
        bool gt = t.lhs_gt[l][i] > t.rhs_gt[l][j];
        bool lt = t.lhs_lt[l][i] < t.rhs_lt[l][j];
        bool win = t.swap_wl[l] ? lt : gt;
        bool loss = t.swap_wl[l] ? gt : lt;
        if (win) {
          ++wi;
          ++ws.col_w[j];
          ++out.level_wins[l];
          break;
        }
        if (loss) {
          ++li;
          ++ws.col_l[j];
          ++out.level_losses[l];
          break;
        }
      }
    }
    out.wins += wi;
    out.losses += li;
    out.row_w2 += wi * wi;
    out.row_l2 += li * li;
    out.row_wl += wi * li;
  }
  for (int j = 0; j < n; ++j) {
    out.col_w2 += ws.col_w[j] * ws.col_w[j];
    out.col_l2 += ws.col_l[j] * ws.col_l[j];
    out.col_wl += ws.col_w[j] * ws.col_l[j];
  }
}

}  // namespace windesign::detail

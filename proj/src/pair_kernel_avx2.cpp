#include <immintrin.h>

#include <cstdint>

#include "pair_kernel_impl.hpp"

namespace windesign::detail {

namespace {

constexpr int kMaxVectorLevels = 16;

inline int64_t hsum_epi64(__m256i v) {
  alignas(32) int64_t lane[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane), v);
  return lane[0] + lane[1] + lane[2] + lane[3];
}

}  // namespace

// Four column pairs per iteration. Compare masks are full-width lanes
// (0 / -1), so adding a hit is a single lane subtraction and the undecided
// mask folds the hierarchy without branches. Counts are integers, hence
// identical to the scalar kernel on any input.
void avx2_pair_kernel_impl(const PairTables& t, PairCounts& out, KernelWorkspace& ws) {
  const int q = t.q, m = t.m, n = t.n;
  if (q > kMaxVectorLevels) {  // nobody designs 17-deep hierarchies; stay correct anyway
    scalar_pair_kernel_impl(t, out, ws);
    return;
  }
  out = PairCounts{};
  out.m = m;
  out.n = n;
  out.level_wins.assign(q, 0);
  out.level_losses.assign(q, 0);
  ws.col_w.assign(n, 0);
  ws.col_l.assign(n, 0);

  const int n4 = n & ~3;
  const __m256i kOnes = _mm256_set1_epi64x(-1);
  const __m256i kZero = _mm256_setzero_si256();
  __m256i lvl_w[kMaxVectorLevels], lvl_l[kMaxVectorLevels];
  for (int l = 0; l < q; ++l) lvl_w[l] = lvl_l[l] = kZero;

  for (int i = 0; i < m; ++i) {
    __m256i row_w = kZero, row_l = kZero;
    for (int j = 0; j < n4; j += 4) {
      __m256i undec = kOnes, win_m = kZero, loss_m = kZero;
      for (int l = 0; l < q; ++l) {
        __m256d lg = _mm256_set1_pd(t.lhs_gt[l][i]);
        __m256d ll = _mm256_set1_pd(t.lhs_lt[l][i]);
        __m256d rg = _mm256_loadu_pd(t.rhs_gt[l].data() + j);
        __m256d rl = _mm256_loadu_pd(t.rhs_lt[l].data() + j);
        __m256i gt = _mm256_castpd_si256(_mm256_cmp_pd(lg, rg, _CMP_GT_OQ));
        __m256i lt = _mm256_castpd_si256(_mm256_cmp_pd(ll, rl, _CMP_LT_OQ));
        __m256i w = t.swap_wl[l] ? lt : gt;
        __m256i lo = t.swap_wl[l] ? gt : lt;
        // Win and loss tests are exclusive by construction (threshold >= 0).
        __m256i new_w = _mm256_and_si256(undec, w);
        __m256i new_l = _mm256_and_si256(undec, lo);
        win_m = _mm256_or_si256(win_m, new_w);
        loss_m = _mm256_or_si256(loss_m, new_l);
        lvl_w[l] = _mm256_sub_epi64(lvl_w[l], new_w);
        lvl_l[l] = _mm256_sub_epi64(lvl_l[l], new_l);
        undec = _mm256_andnot_si256(_mm256_or_si256(new_w, new_l), undec);
        if (_mm256_testz_si256(undec, undec)) break;
      }
      row_w = _mm256_sub_epi64(row_w, win_m);
      row_l = _mm256_sub_epi64(row_l, loss_m);
      __m256i cw = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(ws.col_w.data() + j));
      __m256i cl = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(ws.col_l.data() + j));
      cw = _mm256_sub_epi64(cw, win_m);
      cl = _mm256_sub_epi64(cl, loss_m);
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(ws.col_w.data() + j), cw);
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(ws.col_l.data() + j), cl);
    }
    int64_t wi = hsum_epi64(row_w), li = hsum_epi64(row_l);
    for (int j = n4; j < n; ++j) {
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
  for (int l = 0; l < q; ++l) {
    out.level_wins[l] += hsum_epi64(lvl_w[l]);
    out.level_losses[l] += hsum_epi64(lvl_l[l]);
  }
  for (int j = 0; j < n; ++j) {
    out.col_w2 += ws.col_w[j] * ws.col_w[j];
    out.col_l2 += ws.col_l[j] * ws.col_l[j];
    out.col_wl += ws.col_w[j] * ws.col_l[j];
  }
}

}  // namespace windesign::detail

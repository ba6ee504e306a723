#include "windesign/concordance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace windesign {

namespace {

// Pairs (i < j) with strictly decreasing values; equal values are not counted.
int64_t merge_count_inversions(std::vector<double>& v, std::vector<double>& buf, size_t lo,
                               size_t hi) {
  if (hi - lo < 2) return 0;
  size_t mid = lo + (hi - lo) / 2;
  int64_t inv = merge_count_inversions(v, buf, lo, mid) + merge_count_inversions(v, buf, mid, hi);
  size_t a = lo, b = mid, k = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {
      inv += static_cast<int64_t>(mid - a);
      buf[k++] = v[b++];
    } else {
      buf[k++] = v[a++];
    }
  }
  while (a < mid) buf[k++] = v[a++];
  while (b < hi) buf[k++] = v[b++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return inv;
}

int64_t tied_pairs(int64_t run) { return run * (run - 1) / 2; }

struct Fenwick {
  std::vector<int64_t> t;
  explicit Fenwick(int n) : t(static_cast<size_t>(n) + 1, 0) {}
  void add(int rank) {
    for (int i = rank + 1; i < static_cast<int>(t.size()); i += i & -i) ++t[i];
  }
  int64_t prefix(int rank) const {  // count of inserted ranks <= rank
    int64_t s = 0;
    for (int i = rank + 1; i > 0; i -= i & -i) s += t[i];
    return s;
  }
};

std::vector<int> dense_ranks(const std::vector<double>& y, int& levels) {
  std::vector<double> sorted(y);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  levels = static_cast<int>(sorted.size());
  std::vector<int> r(y.size());
  for (size_t i = 0; i < y.size(); ++i)
    r[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), y[i]) - sorted.begin());
  return r;
}

}  // namespace

double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n != y.size() || n < 2) return std::numeric_limits<double>::quiet_NaN();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  const int64_t n0 = static_cast<int64_t>(n) * (static_cast<int64_t>(n) - 1) / 2;
  int64_t n1 = 0, n3 = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && x[idx[j]] == x[idx[i]]) ++j;
    n1 += tied_pairs(static_cast<int64_t>(j - i));
    for (size_t a = i; a < j;) {
      size_t b = a;
      while (b < j && y[idx[b]] == y[idx[a]]) ++b;
      n3 += tied_pairs(static_cast<int64_t>(b - a));
      a = b;
    }
    i = j;
  }
  int64_t n2 = 0;
  {
    std::vector<double> ys(y);
    std::sort(ys.begin(), ys.end());
    for (size_t i = 0; i < n;) {
      size_t j = i;
      while (j < n && ys[j] == ys[i]) ++j;
      n2 += tied_pairs(static_cast<int64_t>(j - i));
      i = j;
    }
  }
  std::vector<double> yo(n), buf(n);
  for (size_t i = 0; i < n; ++i) yo[i] = y[idx[i]];
  const int64_t swaps = merge_count_inversions(yo, buf, 0, n);

  const int64_t num = n0 - n1 - n2 + n3 - 2 * swaps;
  const int64_t d1 = n0 - n1, d2 = n0 - n2;
  if (d1 == 0 || d2 == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(num) / std::sqrt(static_cast<double>(d1) * static_cast<double>(d2));
}

HarrellC harrell_c(const std::vector<double>& time, const std::vector<uint8_t>& event,
                   const std::vector<double>& y) {
  const size_t n = time.size();
  HarrellC out;
  if (n < 2 || event.size() != n || y.size() != n) {
    out.c = out.kappa = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  int levels = 0;
  std::vector<int> rank = dense_ranks(y, levels);
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return time[a] > time[b]; });  // descending time

  Fenwick fen(levels);
  int64_t inserted = 0, conc2 = 0, evaluable = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && time[idx[j]] == time[idx[i]]) ++j;
    // Pairs within an equal-time group are never evaluable; score the group
    // against strictly-later times first, then insert it whole.
    for (size_t k = i; k < j; ++k) {
      const size_t s = idx[k];
      if (!event[s]) continue;
      const int64_t le = fen.prefix(rank[s]);
      const int64_t eq = le - (rank[s] > 0 ? fen.prefix(rank[s] - 1) : 0);
      const int64_t gt = inserted - le;
      conc2 += 2 * gt + eq;
      evaluable += inserted;
    }
    for (size_t k = i; k < j; ++k) fen.add(rank[idx[k]]);
    inserted += static_cast<int64_t>(j - i);
    i = j;
  }
  out.evaluable = evaluable;
  if (evaluable == 0) {
    out.c = out.kappa = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.c = static_cast<double>(conc2) / (2.0 * static_cast<double>(evaluable));
  out.kappa = 2.0 * out.c - 1.0;
  return out;
}

HarrellC harrell_c_censored(const std::vector<double>& time, const std::vector<uint8_t>& event,
                            const std::vector<double>& y_time,
                            const std::vector<uint8_t>& y_event) {
  const size_t n = time.size();
  HarrellC out;
  if (n < 2 || event.size() != n || y_time.size() != n || y_event.size() != n) {
    out.c = out.kappa = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  int levels = 0;
  std::vector<int> rank = dense_ranks(y_time, levels);
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return time[a] > time[b]; });

  Fenwick all(levels), ev(levels);  // second tracks only event-bearing y times
  int64_t inserted = 0, conc2 = 0, evaluable = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && time[idx[j]] == time[idx[i]]) ++j;
    for (size_t k = i; k < j; ++k) {
      const size_t s = idx[k];
      if (!event[s]) continue;
      // Larger-y side decidable through this subject's own event...
      if (y_event[s]) {
        const int64_t gt = inserted - all.prefix(rank[s]);
        conc2 += 2 * gt;
        evaluable += gt;
      }
      // ...smaller-y side through the partner's event.
      const int64_t lt_ev = rank[s] > 0 ? ev.prefix(rank[s] - 1) : 0;
      evaluable += lt_ev;
    }
    for (size_t k = i; k < j; ++k) {
      all.add(rank[idx[k]]);
      if (y_event[idx[k]]) ev.add(rank[idx[k]]);
    }
    inserted += static_cast<int64_t>(j - i);
    i = j;
  }
  out.evaluable = evaluable;
  if (evaluable == 0) {
    out.c = out.kappa = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.c = static_cast<double>(conc2) / (2.0 * static_cast<double>(evaluable));
  out.kappa = 2.0 * out.c - 1.0;
  return out;
}

}  // namespace windesign

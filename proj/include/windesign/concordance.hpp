#pragma once

#include <cstdint>
#include <vector>

namespace windesign {

// Kendall's tau-b for two numeric vectors, tie-corrected:
//   tau_b = (C - D) / sqrt((n0 - n1)(n0 - n2)),  n0 = n(n-1)/2.
// O(n log n) merge/Fenwick path; the final division matches the naive O(n^2)
// expression bit for bit (same integer numerator and tie counts).
double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y);

struct HarrellC {
  double c = 0.5;         // concordance index
  double kappa = 0;       // 2c - 1, comparable to a Kendall coordinate
  int64_t evaluable = 0;  // pair count entering the denominator
};

// Concordance between a right-censored time (event flag 1 = observed) and a
// fully observed companion y. A pair is evaluable iff the smaller observed
// time carries an event; equal times are never evaluable; ties on y score
// half. O(n log n) over y-ranks with equal-time grouping.
HarrellC harrell_c(const std::vector<double>& time, const std::vector<uint8_t>& event,
                   const std::vector<double>& y);

// Both coordinates right-censored: evaluable iff the smaller time in each
// coordinate is an event (equal observed times non-evaluable per coordinate).
HarrellC harrell_c_censored(const std::vector<double>& time, const std::vector<uint8_t>& event,
                            const std::vector<double>& y_time, const std::vector<uint8_t>& y_event);

}  // namespace windesign

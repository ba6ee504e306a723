#pragma once

#include <cstdint>
#include <vector>

#include "windesign/sampler.hpp"

namespace windesign {

enum class Verdict { Win, Loss, Tie };

struct PairOutcome {
  Verdict verdict = Verdict::Tie;
  int deciding_level = -1;  // 0-based; -1 when tied through every level
};

struct WinStats {
  double u_w = 0, u_l = 0, u_tie = 1;
};

// Single-level rule. Non-TTE: win iff t > c + delta, loss iff t < c - delta
// (swapped when lower_wins). TTE on censored values: win iff control had the
// event and t > c + delta; loss iff treatment had the event and t < c - delta.
// Exact IEEE comparisons only - no epsilon fuzz.
Verdict compare_level(double treat_value, bool treat_event, double ctrl_value, bool ctrl_event,
                      const LevelRule& rule);

// First non-tie level decides, evaluated in priority order.
PairOutcome compare_pair(const SubjectRecord& treat, const SubjectRecord& ctrl,
                         const std::vector<LevelRule>& rules);

// Exact averages over all m*n pairs (kernel-backed; integer counts divided once).
WinStats win_stats(const ArmSample& treat, const ArmSample& ctrl,
                   const std::vector<LevelRule>& rules);

struct LevelDecomposition {
  struct Row {
    double win = 0, loss = 0, tie = 1;
    bool defined = true;    // false when no pairs remain tied on prior levels
    int64_t pairs = 0;      // pairs reaching this level
  };
  std::vector<Row> levels;  // levels[0] marginal; levels[q] conditional on ties at 0..q-1
  WinStats overall;
};

LevelDecomposition decompose_by_level(const ArmSample& treat, const ArmSample& ctrl,
                                      const std::vector<LevelRule>& rules);

}  // namespace windesign

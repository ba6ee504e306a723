#include "windesign/compare.hpp"

#include "windesign/pair_kernel.hpp"

namespace windesign {

Verdict compare_level(double treat_value, bool treat_event, double ctrl_value, bool ctrl_event,
                      const LevelRule& rule) {
  if (rule.time_to_event) {
    if (ctrl_event && treat_value > ctrl_value + rule.threshold) return Verdict::Win;
    if (treat_event && treat_value < ctrl_value - rule.threshold) return Verdict::Loss;
    return Verdict::Tie;
  }
  if (rule.lower_wins) {
    if (treat_value < ctrl_value - rule.threshold) return Verdict::Win;
    if (treat_value > ctrl_value + rule.threshold) return Verdict::Loss;
    return Verdict::Tie;
  }
  if (treat_value > ctrl_value + rule.threshold) return Verdict::Win;
  if (treat_value < ctrl_value - rule.threshold) return Verdict::Loss;
  return Verdict::Tie;
}

PairOutcome compare_pair(const SubjectRecord& treat, const SubjectRecord& ctrl,
                         const std::vector<LevelRule>& rules) {
  for (size_t l = 0; l < rules.size(); ++l) {
    Verdict v = compare_level(treat.values[l], treat.events[l] != 0, ctrl.values[l],
                              ctrl.events[l] != 0, rules[l]);
    if (v != Verdict::Tie) return {v, static_cast<int>(l)};
  }
  return {Verdict::Tie, -1};
}

WinStats win_stats(const ArmSample& treat, const ArmSample& ctrl,
                   const std::vector<LevelRule>& rules) {
  PairCounts counts = accumulate_pair_counts(build_pair_tables(treat, ctrl, rules));
  const double pairs = static_cast<double>(counts.m) * static_cast<double>(counts.n);
  WinStats s;
  s.u_w = counts.wins / pairs;
  s.u_l = counts.losses / pairs;
  s.u_tie = static_cast<double>(counts.m * counts.n - counts.wins - counts.losses) / pairs;
  return s;
}

LevelDecomposition decompose_by_level(const ArmSample& treat, const ArmSample& ctrl,
                                      const std::vector<LevelRule>& rules) {
  PairCounts counts = accumulate_pair_counts(build_pair_tables(treat, ctrl, rules));
  const int q = static_cast<int>(rules.size());
  const int64_t total = counts.m * counts.n;

  LevelDecomposition d;
  d.levels.resize(q);
  int64_t reaching = total;
  for (int l = 0; l < q; ++l) {
    auto& row = d.levels[l];
    row.pairs = reaching;
    if (reaching == 0) {
      row.defined = false;
      row.win = row.loss = 0;
      row.tie = 1;
    } else {
      row.win = static_cast<double>(counts.level_wins[l]) / reaching;
      row.loss = static_cast<double>(counts.level_losses[l]) / reaching;
      row.tie = 1.0 - row.win - row.loss;
    }
    reaching -= counts.level_wins[l] + counts.level_losses[l];
  }
  const double pairs = static_cast<double>(total);
  d.overall.u_w = counts.wins / pairs;
  d.overall.u_l = counts.losses / pairs;
  d.overall.u_tie = static_cast<double>(total - counts.wins - counts.losses) / pairs;
  return d;
}

}  // namespace windesign

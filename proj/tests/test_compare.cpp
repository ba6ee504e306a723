#include <cmath>
#include <vector>

#include "doctest.h"
#include "windesign/compare.hpp"

using namespace windesign;

TEST_CASE("continuous rule truth table") {
  LevelRule rule{6.0, false, false};  // win margin 6
  // strict inequality at the margin boundary
  CHECK(compare_level(10.0, true, 3.0, true, rule) == Verdict::Win);    // 10 > 9
  CHECK(compare_level(9.0, true, 3.0, true, rule) == Verdict::Tie);     // 9 = 3+6 exactly
  CHECK(compare_level(-3.0, true, 3.0, true, rule) == Verdict::Tie);    // -3 = 3-6 exactly
  CHECK(compare_level(-3.1, true, 3.0, true, rule) == Verdict::Loss);
  CHECK(compare_level(3.0, true, 3.0, true, rule) == Verdict::Tie);

  LevelRule zero{0.0, false, false};
  CHECK(compare_level(1.0, true, 0.0, true, zero) == Verdict::Win);
  CHECK(compare_level(0.0, true, 0.0, true, zero) == Verdict::Tie);
  CHECK(compare_level(-0.5, true, 0.0, true, zero) == Verdict::Loss);
}

TEST_CASE("lower_wins swaps the verdict") {
  LevelRule rule{0.0, false, true};  // e.g. hospitalization count
  CHECK(compare_level(0.0, true, 2.0, true, rule) == Verdict::Win);
  CHECK(compare_level(2.0, true, 0.0, true, rule) == Verdict::Loss);
  CHECK(compare_level(1.0, true, 1.0, true, rule) == Verdict::Tie);
  LevelRule margin{1.0, false, true};
  CHECK(compare_level(0.0, true, 2.0, true, margin) == Verdict::Win);   // 0 < 2-1
  CHECK(compare_level(1.0, true, 2.0, true, margin) == Verdict::Tie);   // 1 = 2-1
}

TEST_CASE("time-to-event rule respects censoring") {
  LevelRule rule{0.0, true, false};
  // win requires the CONTROL event observed
  CHECK(compare_level(8.0, false, 5.0, true, rule) == Verdict::Win);
  CHECK(compare_level(8.0, true, 5.0, true, rule) == Verdict::Win);
  CHECK(compare_level(8.0, false, 5.0, false, rule) == Verdict::Tie);  // ctrl censored first
  // loss requires the TREATMENT event observed
  CHECK(compare_level(2.0, true, 5.0, false, rule) == Verdict::Loss);
  CHECK(compare_level(2.0, false, 5.0, false, rule) == Verdict::Tie);  // impossible data, still tie
  // both censored at S: tie
  CHECK(compare_level(10.0, false, 10.0, false, rule) == Verdict::Tie);
  // equal observed times: tie regardless of events
  CHECK(compare_level(5.0, true, 5.0, true, rule) == Verdict::Tie);

  LevelRule margin{1.5, true, false};
  CHECK(compare_level(7.0, false, 5.0, true, margin) == Verdict::Win);   // 7 > 6.5
  CHECK(compare_level(6.0, false, 5.0, true, margin) == Verdict::Tie);   // 6 < 6.5
  CHECK(compare_level(3.0, true, 5.0, true, margin) == Verdict::Loss);   // 3 < 3.5
  CHECK(compare_level(4.0, true, 5.0, true, margin) == Verdict::Tie);
}

TEST_CASE("first non-tie level decides") {
  std::vector<LevelRule> rules{{0.0, true, false}, {0.0, false, false}};
  SubjectRecord t{{5.0, 100.0}, {1, 1}};
  SubjectRecord c{{5.0, 1.0}, {1, 1}};
  PairOutcome o = compare_pair(t, c, rules);  // tie on survival, win on level 2
  CHECK(o.verdict == Verdict::Win);
  CHECK(o.deciding_level == 1);

  SubjectRecord t2{{2.0, 100.0}, {1, 1}};
  PairOutcome o2 = compare_pair(t2, c, rules);  // level-1 loss shadows level-2 win
  CHECK(o2.verdict == Verdict::Loss);
  CHECK(o2.deciding_level == 0);

  SubjectRecord c3{{5.0, 100.0}, {1, 1}};
  PairOutcome o3 = compare_pair(t, c3, rules);
  CHECK(o3.verdict == Verdict::Tie);
  CHECK(o3.deciding_level == -1);
}

namespace {

ArmSample make_sample(const std::vector<std::vector<double>>& rows,
                      const std::vector<std::vector<uint8_t>>& evs) {
  ArmSample s;
  s.n = static_cast<int>(rows.size());
  s.q = static_cast<int>(rows[0].size());
  s.values.assign(s.q, std::vector<double>(s.n));
  s.events.assign(s.q, std::vector<uint8_t>(s.n));
  for (int i = 0; i < s.n; ++i)
    for (int l = 0; l < s.q; ++l) {
      s.values[l][i] = rows[i][l];
      s.events[l][i] = evs[i][l];
    }
  return s;
}

}  // namespace

TEST_CASE("win_stats equals the per-pair brute force") {
  std::vector<LevelRule> rules{{0.0, true, false}, {2.0, false, true}};
  // hand-made arms: 4 treatment vs 3 control subjects
  ArmSample treat = make_sample({{10.0, 1.0}, {4.0, 5.0}, {10.0, 2.0}, {6.0, 0.0}},
                                {{0, 1}, {1, 1}, {0, 1}, {1, 1}});
  ArmSample ctrl = make_sample({{5.0, 3.0}, {10.0, 0.0}, {6.0, 6.0}},
                               {{1, 1}, {0, 1}, {1, 1}});
  treat.arm = Arm::Treatment;

  int64_t w = 0, l = 0, t = 0;
  for (int i = 0; i < treat.n; ++i)
    for (int j = 0; j < ctrl.n; ++j) {
      PairOutcome o = compare_pair(record_at(treat, i), record_at(ctrl, j), rules);
      if (o.verdict == Verdict::Win) ++w;
      else if (o.verdict == Verdict::Loss) ++l;
      else ++t;
    }
  WinStats ws = win_stats(treat, ctrl, rules);
  const double pairs = static_cast<double>(treat.n) * ctrl.n;
  CHECK(ws.u_w == w / pairs);
  CHECK(ws.u_l == l / pairs);
  CHECK(ws.u_tie == t / pairs);
  CHECK(w + l + t == treat.n * ctrl.n);
}

TEST_CASE("decomposition rows are consistent with the overall split") {
  std::vector<LevelRule> rules{{0.0, false, false}, {0.0, false, false}};
  ArmSample treat = make_sample({{1.0, 0.0}, {0.0, 3.0}, {0.0, 0.0}, {2.0, -1.0}},
                                {{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  ArmSample ctrl = make_sample({{0.0, 0.0}, {1.0, 1.0}}, {{1, 1}, {1, 1}});
  LevelDecomposition d = decompose_by_level(treat, ctrl, rules);
  REQUIRE(d.levels.size() == 2);
  CHECK(d.levels[0].pairs == 8);
  // brute-force level-1 marginals
  int w1 = 0, l1 = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) {
      Verdict v = compare_level(treat.values[0][i], true, ctrl.values[0][j], true, rules[0]);
      w1 += v == Verdict::Win;
      l1 += v == Verdict::Loss;
    }
  CHECK(d.levels[0].win == w1 / 8.0);
  CHECK(d.levels[0].loss == l1 / 8.0);
  // level-2 row is conditional on ties at level 1
  const int64_t reach = 8 - w1 - l1;
  CHECK(d.levels[1].pairs == reach);
  // overall re-aggregates: u_w = marg1_w + tie1 * cond2_w
  const double tie1 = 1.0 - d.levels[0].win - d.levels[0].loss;
  CHECK(d.overall.u_w ==
        doctest::Approx(d.levels[0].win + tie1 * d.levels[1].win).epsilon(1e-12));
  CHECK(d.overall.u_l ==
        doctest::Approx(d.levels[0].loss + tie1 * d.levels[1].loss).epsilon(1e-12));
  WinStats ws = win_stats(treat, ctrl, rules);
  CHECK(d.overall.u_w == ws.u_w);
  CHECK(d.overall.u_l == ws.u_l);
}

TEST_CASE("all pairs tied yields an undefined second row") {
  std::vector<LevelRule> rules{{0.0, false, false}, {0.0, false, false}};
  ArmSample treat = make_sample({{1.0, 5.0}}, {{1, 1}});
  ArmSample ctrl = make_sample({{2.0, 0.0}}, {{1, 1}});  // decided at level 1
  LevelDecomposition d = decompose_by_level(treat, ctrl, rules);
  CHECK(d.levels[0].defined);
  CHECK_FALSE(d.levels[1].defined);
  CHECK(d.levels[1].pairs == 0);
}

#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "windesign/measures.hpp"

namespace windesign {

struct MeasureOutcome {
  double value = 0;       // estimated measure
  double stat = 0;        // standardized test statistic
  bool reject = false;
  bool degenerate = false;  // zero wins or zero losses (ratio measures only)
};

struct TrialOutcome {
  std::array<MeasureOutcome, 4> per_measure{};  // indexed by Measure
  WinStats stats{};
  PluginEstimates est{};
};

// One simulated trial of m treatment vs n control subjects under the given
// hypothesis. The test statistic is est / sqrt(A0_hat / m) with A0_hat built
// from the trial's own plug-ins; by default the win/loss components are
// symmetrized (tau_bar = (tau_w + tau_l)/2) so the null variance does not
// borrow direction from the observed effect.
TrialOutcome simulate_trial_once(const ValidatedScenario& scenario, long long m, long long n,
                                 Hypothesis hyp, uint64_t seed, uint64_t rep, double alpha,
                                 bool symmetrized_null = true);

struct SimulationReport {
  long long reps = 0;
  std::array<long long, 4> rejections{};
  std::array<long long, 4> degenerate{};  // excluded from the WR/WO denominators
  std::array<double, 4> mean_value{};     // over non-degenerate reps
  std::array<double, 4> rate{};           // rejections / (reps - degenerate)
};

// Empirical power (HA reps) and size (H0 reps) via repeated trials. Worker
// results land in preallocated per-rep slots and are reduced in rep order, so
// the report is identical for any worker count.
std::pair<SimulationReport, SimulationReport> empirical_rates(const ValidatedScenario& scenario,
                                                              long long m, long long n,
                                                              long long reps, uint64_t seed,
                                                              double alpha, int workers,
                                                              bool symmetrized_null = true);

}  // namespace windesign

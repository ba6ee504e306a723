#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "windesign/measures.hpp"

namespace windesign {

// Streaming means + squared deviations (Welford) for the 24 tracked quantities:
// {tau_w, tau_l, tau_tie, 9 xi} under each hypothesis. Batches merge in index
// order, so results are identical for any worker count.
struct RunningAverages {
  static constexpr int kPerHyp = 12;   // 3 tau + 9 xi
  static constexpr int kTotal = 24;    // H0 block then HA block
  int64_t b = 0;
  std::array<double, kTotal> mean{};
  std::array<double, kTotal> m2{};

  void update(const std::array<double, kTotal>& x);
  double se(int idx) const;            // sample SD across batches / sqrt(b); needs b >= 2
  double max_se_tau() const;
  double max_se_xi() const;
};

struct StoppingCheck {
  bool stop = false;
  double max_se_tau = 0, max_se_xi = 0;
};

// True iff b >= b_min and both SE maxima are at or under their thresholds.
StoppingCheck check_stopping(const RunningAverages& avgs, const EstimatorConfig& cfg);

enum class RunStatus { Converged, BMaxReached };

struct RunDiagnostics {
  int64_t b_final = 0;
  RunStatus status = RunStatus::Converged;
  double max_se_tau = 0, max_se_xi = 0;
  double wall_seconds = 0;
  uint64_t workset_bytes_estimate = 0;  // per worker
  uint64_t peak_rss_bytes = 0;          // process VmHWM where available
  int workers = 1;
  std::string kernel;
  int clamped_xi = 0;  // negative averaged diagonals clamped on output
};

struct ForssResult {
  PluginEstimates null_est;  // batch-averaged, diagonals clamped
  PluginEstimates alt_est;
  RunDiagnostics diagnostics;
  // Deciding-level integer counts summed over all batches, for decomposition
  // reports; pair_total = b_final * n_sp^2 per hypothesis.
  std::vector<int64_t> level_wins_null, level_losses_null;
  std::vector<int64_t> level_wins_alt, level_losses_alt;
  int64_t pair_total = 0;
};

// Adaptive super-sample loop: per batch draw control C, treatment T, and a
// second control draw C* ~ control; estimate plug-ins from T-vs-C (HA) and
// C*-vs-C (H0); stop when b >= b_min and the running-mean SEs clear eps_tau /
// eps_xi, or at b_max. Batch-parallel with in-order merge.
ForssResult run_forss(const ValidatedScenario& scenario, const EstimatorConfig& cfg);

}  // namespace windesign

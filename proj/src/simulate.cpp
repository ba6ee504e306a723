#include "windesign/simulate.hpp"

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "windesign/mathutil.hpp"

namespace windesign {

TrialOutcome simulate_trial_once(const ValidatedScenario& scenario, long long m, long long n,
                                 Hypothesis hyp, uint64_t seed, uint64_t rep, double alpha,
                                 bool symmetrized_null) {
  const Arm treat_arm = hyp == Hypothesis::HA ? Arm::Treatment : Arm::TreatmentNull;
  ArmSample treat = sample_scenario_arm(scenario, static_cast<int>(m), treat_arm, hyp, seed,
                                        Stream::Trial, rep);
  // Same key under both hypotheses: the control draw is shared.
  ArmSample ctrl = sample_scenario_arm(scenario, static_cast<int>(n), Arm::Control, hyp, seed,
                                       Stream::Trial, rep);
  PairCounts counts = accumulate_pair_counts(build_pair_tables(treat, ctrl, scenario.rules));
  PluginEstimates est = plugins_from_counts(counts);

  TrialOutcome out;
  out.est = est;
  out.stats = WinStats{est.tau_w, est.tau_l, est.tau_tie};

  const double r_hat = static_cast<double>(n) / static_cast<double>(m);
  PluginEstimates null_base = est;
  if (symmetrized_null) {
    // The null variance treats wins and losses exchangeably instead of
    // borrowing the observed direction.
    const double tau_bar = 0.5 * (est.tau_w + est.tau_l);
    null_base.tau_w = null_base.tau_l = tau_bar;
  }
  const double z = inverse_normal_cdf(1.0 - alpha / 2.0);
  const bool no_wins = counts.wins == 0, no_losses = counts.losses == 0;
  const double nb = est.tau_w - est.tau_l;

  for (Measure measure : {Measure::WR, Measure::NB, Measure::WO, Measure::DOOR}) {
    MeasureOutcome& o = out.per_measure[static_cast<size_t>(measure)];
    double estimate = 0;
    switch (measure) {
      case Measure::WR:
        if (no_wins || no_losses) {
          o.degenerate = true;
          o.value = std::numeric_limits<double>::quiet_NaN();
          continue;
        }
        o.value = est.tau_w / est.tau_l;
        estimate = std::log(o.value);
        break;
      case Measure::NB:
        o.value = nb;
        estimate = nb;
        break;
      case Measure::WO:
        if (no_wins || no_losses) {
          o.degenerate = true;
          o.value = std::numeric_limits<double>::quiet_NaN();
          continue;
        }
        o.value = (est.tau_w + est.tau_tie / 2.0) / (est.tau_l + est.tau_tie / 2.0);
        estimate = std::log(o.value);
        break;
      case Measure::DOOR:
        o.value = 0.5 * (1.0 + nb);
        estimate = nb / 2.0;
        break;
    }
    const double a0 = variance_quantity(measure, null_base, r_hat);
    if (a0 > 0) {
      o.stat = estimate / std::sqrt(a0 / static_cast<double>(m));
    } else {
      o.stat = estimate == 0 ? 0.0
                             : std::copysign(std::numeric_limits<double>::infinity(), estimate);
    }
    o.reject = std::fabs(o.stat) > z;
  }
  return out;
}

namespace {

SimulationReport reduce_outcomes(const std::vector<TrialOutcome>& outcomes) {
  SimulationReport rep;
  rep.reps = static_cast<long long>(outcomes.size());
  std::array<double, 4> value_sum{};
  for (const TrialOutcome& t : outcomes) {
    for (size_t k = 0; k < 4; ++k) {
      const MeasureOutcome& o = t.per_measure[k];
      if (o.degenerate) {
        ++rep.degenerate[k];
        continue;
      }
      value_sum[k] += o.value;
      if (o.reject) ++rep.rejections[k];
    }
  }
  for (size_t k = 0; k < 4; ++k) {
    const long long used = rep.reps - rep.degenerate[k];
    rep.mean_value[k] = used > 0 ? value_sum[k] / static_cast<double>(used)
                                 : std::numeric_limits<double>::quiet_NaN();
    rep.rate[k] = used > 0 ? static_cast<double>(rep.rejections[k]) / static_cast<double>(used)
                           : std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace

std::pair<SimulationReport, SimulationReport> empirical_rates(const ValidatedScenario& scenario,
                                                              long long m, long long n,
                                                              long long reps, uint64_t seed,
                                                              double alpha, int workers,
                                                              bool symmetrized_null) {
  if (reps < 1) throw ConfigError("reps must be >= 1");
  std::vector<TrialOutcome> alt(static_cast<size_t>(reps)), nul(static_cast<size_t>(reps));
  const int w = std::max(1, workers);
  auto worker = [&](long long first) {
    for (long long rp = first; rp < reps; rp += w) {
      alt[static_cast<size_t>(rp)] =
          simulate_trial_once(scenario, m, n, Hypothesis::HA, seed, static_cast<uint64_t>(rp),
                              alpha, symmetrized_null);
      nul[static_cast<size_t>(rp)] =
          simulate_trial_once(scenario, m, n, Hypothesis::H0, seed, static_cast<uint64_t>(rp),
                              alpha, symmetrized_null);
    }
  };
  if (w == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int k = 0; k < w; ++k) pool.emplace_back(worker, static_cast<long long>(k));
    for (auto& th : pool) th.join();
  }
  // Slots are reduced in replicate order regardless of which worker filled them.
  return {reduce_outcomes(alt), reduce_outcomes(nul)};
}

}  // namespace windesign

#include "windesign/estimator.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "windesign/ustat.hpp"

namespace windesign {

void RunningAverages::update(const std::array<double, kTotal>& x) {
  ++b;
  for (int i = 0; i < kTotal; ++i) {
    double delta = x[i] - mean[i];
    mean[i] += delta / static_cast<double>(b);
    m2[i] += delta * (x[i] - mean[i]);
  }
}

double RunningAverages::se(int idx) const {
  if (b < 2) return std::numeric_limits<double>::infinity();
  return std::sqrt(m2[idx] / (static_cast<double>(b - 1) * static_cast<double>(b)));
}

namespace {
constexpr int kTauIdx[] = {0, 1, 2, 12, 13, 14};
}

double RunningAverages::max_se_tau() const {
  double mx = 0;
  for (int i : kTauIdx) mx = std::max(mx, se(i));
  return mx;
}

double RunningAverages::max_se_xi() const {
  double mx = 0;
  for (int block : {0, kPerHyp})
    for (int i = 3; i < kPerHyp; ++i) mx = std::max(mx, se(block + i));
  return mx;
}

StoppingCheck check_stopping(const RunningAverages& avgs, const EstimatorConfig& cfg) {
  StoppingCheck c;
  c.max_se_tau = avgs.max_se_tau();
  c.max_se_xi = avgs.max_se_xi();
  c.stop = avgs.b >= cfg.b_min && c.max_se_tau <= cfg.eps_tau && c.max_se_xi <= cfg.eps_xi;
  return c;
}

namespace {

struct BatchOut {
  std::array<double, RunningAverages::kTotal> x{};
  std::vector<int64_t> lw0, ll0, lwA, llA;
};

void fill_block(std::array<double, RunningAverages::kTotal>& x, int base,
                const PluginEstimates& e) {
  x[base + 0] = e.tau_w;
  x[base + 1] = e.tau_l;
  x[base + 2] = e.tau_tie;
  x[base + 3] = e.xi.ww10;
  x[base + 4] = e.xi.ww01;
  x[base + 5] = e.xi.ww11;
  x[base + 6] = e.xi.ll10;
  x[base + 7] = e.xi.ll01;
  x[base + 8] = e.xi.ll11;
  x[base + 9] = e.xi.wl10;
  x[base + 10] = e.xi.wl01;
  x[base + 11] = e.xi.wl11;
}

PluginEstimates block_to_estimates(const std::array<double, RunningAverages::kTotal>& mean,
                                   int base) {
  PluginEstimates e;
  e.tau_w = mean[base + 0];
  e.tau_l = mean[base + 1];
  e.tau_tie = mean[base + 2];
  e.xi.ww10 = mean[base + 3];
  e.xi.ww01 = mean[base + 4];
  e.xi.ww11 = mean[base + 5];
  e.xi.ll10 = mean[base + 6];
  e.xi.ll01 = mean[base + 7];
  e.xi.ll11 = mean[base + 8];
  e.xi.wl10 = mean[base + 9];
  e.xi.wl01 = mean[base + 10];
  e.xi.wl11 = mean[base + 11];
  return e;
}

BatchOut compute_batch(const ValidatedScenario& sc, const EstimatorConfig& cfg, uint64_t batch,
                       PairKernelFn kernel, KernelWorkspace& ws) {
  const int n = cfg.n_sp;
  ArmSample ctrl =
      sample_scenario_arm(sc, n, Arm::Control, Hypothesis::HA, cfg.seed, Stream::SuperSample, batch);
  ArmSample treat = sample_scenario_arm(sc, n, Arm::Treatment, Hypothesis::HA, cfg.seed,
                                        Stream::SuperSample, batch);
  ArmSample null_treat = sample_scenario_arm(sc, n, Arm::TreatmentNull, Hypothesis::H0, cfg.seed,
                                             Stream::SuperSample, batch);
  PairCounts c0, ca;
  kernel(build_pair_tables(null_treat, ctrl, sc.rules), c0, ws);
  kernel(build_pair_tables(treat, ctrl, sc.rules), ca, ws);

  BatchOut out;
  fill_block(out.x, 0, plugins_from_counts(c0));
  fill_block(out.x, RunningAverages::kPerHyp, plugins_from_counts(ca));
  out.lw0 = std::move(c0.level_wins);
  out.ll0 = std::move(c0.level_losses);
  out.lwA = std::move(ca.level_wins);
  out.llA = std::move(ca.level_losses);
  return out;
}

uint64_t read_peak_rss_bytes() {
  std::ifstream f("/proc/self/status");
  std::string line;
  while (std::getline(f, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      uint64_t kb = 0;
      for (char ch : line)
        if (ch >= '0' && ch <= '9') kb = kb * 10 + static_cast<uint64_t>(ch - '0');
      return kb * 1024;
    }
  }
  return 0;
}

}  // namespace

ForssResult run_forss(const ValidatedScenario& scenario, const EstimatorConfig& cfg) {
  if (scenario.needs_calibration())
    throw ConfigError("dependence targets are not calibrated yet; run calibration first");
  const auto t0 = std::chrono::steady_clock::now();
  const int q = scenario.q();
  const int workers = std::max(1, cfg.workers);
  PairKernelFn kernel = active_pair_kernel();

  RunningAverages avgs;
  ForssResult res;
  res.level_wins_null.assign(q, 0);
  res.level_losses_null.assign(q, 0);
  res.level_wins_alt.assign(q, 0);
  res.level_losses_alt.assign(q, 0);

  StoppingCheck last;
  bool stopped = false;
  int64_t next_batch = 0;
  KernelWorkspace main_ws;
  while (!stopped && next_batch < cfg.b_max) {
    const int wave = static_cast<int>(std::min<int64_t>(workers, cfg.b_max - next_batch));
    std::vector<BatchOut> outs(wave);
    if (wave == 1) {
      outs[0] = compute_batch(scenario, cfg, static_cast<uint64_t>(next_batch), kernel, main_ws);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(wave);
      for (int k = 0; k < wave; ++k) {
        pool.emplace_back([&, k] {
          KernelWorkspace ws;
          outs[k] =
              compute_batch(scenario, cfg, static_cast<uint64_t>(next_batch + k), kernel, ws);
        });
      }
      for (auto& th : pool) th.join();
    }
    // Merge strictly in batch order; drop wave leftovers past the stop point so
    // any worker count reproduces the sequential run.
    for (int k = 0; k < wave && !stopped; ++k) {
      avgs.update(outs[k].x);
      for (int l = 0; l < q; ++l) {
        res.level_wins_null[l] += outs[k].lw0[l];
        res.level_losses_null[l] += outs[k].ll0[l];
        res.level_wins_alt[l] += outs[k].lwA[l];
        res.level_losses_alt[l] += outs[k].llA[l];
      }
      ++next_batch;
      last = check_stopping(avgs, cfg);
      stopped = last.stop;
    }
  }

  res.diagnostics.b_final = avgs.b;
  res.diagnostics.status = stopped ? RunStatus::Converged : RunStatus::BMaxReached;
  res.diagnostics.max_se_tau = last.max_se_tau;
  res.diagnostics.max_se_xi = last.max_se_xi;
  res.diagnostics.workers = workers;
  res.diagnostics.kernel = active_pair_kernel_name();

  int clamped = 0;
  res.null_est = clamp_nonnegative_diagonals(block_to_estimates(avgs.mean, 0), &clamped);
  res.alt_est =
      clamp_nonnegative_diagonals(block_to_estimates(avgs.mean, RunningAverages::kPerHyp), &clamped);
  res.diagnostics.clamped_xi = clamped;
  res.pair_total = avgs.b * static_cast<int64_t>(cfg.n_sp) * static_cast<int64_t>(cfg.n_sp);

  // Per-worker footprint: three samples, two comparison tables, one workspace.
  const uint64_t nsp = static_cast<uint64_t>(cfg.n_sp), qq = static_cast<uint64_t>(q);
  res.diagnostics.workset_bytes_estimate =
      3 * qq * nsp * 9 + 2 * qq * 4 * nsp * 8 + 2 * nsp * 8;
  res.diagnostics.peak_rss_bytes = read_peak_rss_bytes();
  res.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace windesign

#include "windesign/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace windesign {

double gaussian_rho_to_kappa(double rho) {
  rho = std::clamp(rho, -1.0, 1.0);
  return 2.0 / M_PI * std::asin(rho);
}

double gaussian_kappa_to_rho(double kappa) {
  kappa = std::clamp(kappa, -1.0, 1.0);
  return std::sin(M_PI / 2.0 * kappa);
}

PairMethod pair_method(const ValidatedScenario& scenario, int a, int b) {
  const bool ta = scenario.rules[a].time_to_event, tb = scenario.rules[b].time_to_event;
  if (ta && tb) return PairMethod::HarrellBoth;
  if (ta) return PairMethod::HarrellRow;
  if (tb) return PairMethod::HarrellCol;
  auto continuous = [&](int l) {
    const MarginalDist& m = scenario.control[l];
    return std::holds_alternative<Normal>(m) || std::holds_alternative<Exponential>(m);
  };
  return continuous(a) && continuous(b) ? PairMethod::ClosedForm : PairMethod::Kendall;
}

namespace {

int upper_index(int q, int a, int b) {  // row-major upper triangle, a < b
  return a * q - a * (a + 1) / 2 + (b - a - 1);
}

ArmSample draw_cal_batch(const ValidatedScenario& sc, const Matrix& chol_lower,
                         const CalibrationSettings& cs, uint64_t seed, uint64_t batch) {
  RngKey key{seed, Stream::Calibration, batch, static_cast<uint32_t>(Arm::Treatment)};
  ArmSample s = sample_arm(cs.n_cal, sc.treatment, sc.rules, chol_lower, sc.follow_up, key,
                           Arm::Treatment, Hypothesis::HA);
  if (!cs.pooled_arms) return s;
  RngKey ck{seed, Stream::Calibration, batch, static_cast<uint32_t>(Arm::Control)};
  ArmSample c = sample_arm(cs.n_cal, sc.control, sc.rules, chol_lower, sc.follow_up, ck,
                           Arm::Control, Hypothesis::HA);
  for (int l = 0; l < s.q; ++l) {
    s.values[l].insert(s.values[l].end(), c.values[l].begin(), c.values[l].end());
    s.events[l].insert(s.events[l].end(), c.events[l].begin(), c.events[l].end());
  }
  s.n += c.n;
  return s;
}

double entry_kappa(const ArmSample& s, int a, int b, PairMethod method) {
  switch (method) {
    case PairMethod::Kendall:
      return kendall_tau_b(s.values[a], s.values[b]);
    case PairMethod::HarrellRow:
      return harrell_c(s.values[a], s.events[a], s.values[b]).kappa;
    case PairMethod::HarrellCol:
      return harrell_c(s.values[b], s.events[b], s.values[a]).kappa;
    case PairMethod::HarrellBoth:
      return harrell_c_censored(s.values[a], s.events[a], s.values[b], s.events[b]).kappa;
    case PairMethod::ClosedForm:
      break;
  }
  return 0;
}

struct EntryAvg {
  int64_t b = 0;
  double mean = 0, m2 = 0;
  void update(double x) {
    ++b;
    double d = x - mean;
    mean += d / static_cast<double>(b);
    m2 += d * (x - mean);
  }
  double se() const {
    if (b < 2) return std::numeric_limits<double>::infinity();
    return std::sqrt(m2 / (static_cast<double>(b - 1) * static_cast<double>(b)));
  }
};

// Sampled concordance of a single pair at a fixed batch count (CRN: batch k
// always uses the same key, whatever rho is being probed).
double sampled_entry_kappa(const ValidatedScenario& sc, const Matrix& chol_lower, int a, int b,
                           PairMethod method, const CalibrationSettings& cs, uint64_t seed,
                           int batches) {
  EntryAvg avg;
  for (int k = 0; k < batches; ++k) {
    ArmSample s = draw_cal_batch(sc, chol_lower, cs, seed, static_cast<uint64_t>(k));
    avg.update(entry_kappa(s, a, b, method));
  }
  return avg.mean;
}

}  // namespace

ConcordanceSummary implied_concordance(const Matrix& latent, const ValidatedScenario& scenario,
                                       const CalibrationSettings& settings, uint64_t seed) {
  const int q = scenario.q();
  Matrix lower;
  if (!cholesky(latent, lower))
    throw DegenerateError("latent correlation matrix is not positive definite");

  ConcordanceSummary out;
  out.k = Matrix::identity(q);
  out.se.assign(static_cast<size_t>(q) * (q - 1) / 2, 0.0);

  std::vector<std::pair<int, int>> sampled;
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b) {
      if (pair_method(scenario, a, b) == PairMethod::ClosedForm) {
        double k = gaussian_rho_to_kappa(latent.at(a, b));
        out.k.at(a, b) = out.k.at(b, a) = k;
      } else {
        sampled.emplace_back(a, b);
      }
    }
  if (sampled.empty()) return out;

  std::vector<EntryAvg> avgs(sampled.size());
  const double se_goal = settings.tol / 3.0;
  int b = 0;
  for (; b < settings.max_batches; ++b) {
    ArmSample s = draw_cal_batch(scenario, lower, settings, seed, static_cast<uint64_t>(b));
    for (size_t e = 0; e < sampled.size(); ++e) {
      auto [i, j] = sampled[e];
      avgs[e].update(entry_kappa(s, i, j, pair_method(scenario, i, j)));
    }
    if (b + 1 >= settings.min_batches) {
      bool done = true;
      for (const auto& a : avgs) done = done && a.se() <= se_goal;
      if (done) {
        ++b;
        break;
      }
    }
  }
  out.batches = b;
  for (size_t e = 0; e < sampled.size(); ++e) {
    auto [i, j] = sampled[e];
    out.k.at(i, j) = out.k.at(j, i) = avgs[e].mean;
    out.se[upper_index(q, i, j)] = avgs[e].se();
  }
  return out;
}

CalibrationResult calibrate(const Matrix& k_target, const ValidatedScenario& scenario,
                            const CalibrationSettings& settings, uint64_t seed) {
  const int q = scenario.q();
  if (k_target.n != q) throw ConfigError("/dependence/matrix", "size must match endpoint count");
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b)
      if (!(std::fabs(k_target.at(a, b)) < 1.0))
        throw ConfigError("/dependence/matrix", "target concordances must lie in (-1,1)");

  // Sine map is exact for continuous pairs and a good opener everywhere else.
  Matrix r = Matrix::identity(q);
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b)
      r.at(a, b) = r.at(b, a) = gaussian_kappa_to_rho(k_target.at(a, b));
  {
    Matrix lower;
    int tries = 0;
    while (!cholesky(r, lower)) {
      if (++tries > 200)
        throw DegenerateError("no positive definite matrix near the requested targets");
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
          if (a != b) r.at(a, b) *= 0.9;
    }
  }

  std::vector<std::pair<int, int>> sampled;
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b)
      if (pair_method(scenario, a, b) != PairMethod::ClosedForm) sampled.emplace_back(a, b);

  auto feasible = [&](Matrix& candidate, double rho, int a, int b, Matrix& lower) {
    candidate.at(a, b) = candidate.at(b, a) = rho;
    return cholesky(candidate, lower);
  };

  // Batch count for search evaluations: grow once at the start until every
  // sampled entry clears tol/3, then keep it fixed so the bisection sees a
  // stable (common-random-number) surface.
  int eval_batches = settings.min_batches;
  if (!sampled.empty()) {
    Matrix lower;
    cholesky(r, lower);
    std::vector<EntryAvg> avgs(sampled.size());
    int b = 0;
    for (; b < settings.max_batches; ++b) {
      ArmSample s = draw_cal_batch(scenario, lower, settings, seed, static_cast<uint64_t>(b));
      for (size_t e = 0; e < sampled.size(); ++e)
        avgs[e].update(entry_kappa(s, sampled[e].first, sampled[e].second,
                                   pair_method(scenario, sampled[e].first, sampled[e].second)));
      if (b + 1 >= settings.min_batches) {
        bool done = true;
        for (const auto& a : avgs) done = done && a.se() <= settings.tol / 3.0;
        if (done) {
          ++b;
          break;
        }
      }
    }
    eval_batches = std::min(b, settings.max_batches);
    eval_batches = std::max(eval_batches, settings.min_batches);
  }

  CalibrationResult result;
  for (int cycle = 1; cycle <= settings.max_cycles; ++cycle) {
    for (auto [a, b] : sampled) {
      const PairMethod method = pair_method(scenario, a, b);
      const double target = k_target.at(a, b);
      const double cur = r.at(a, b);
      Matrix cand = r, lower;
      double lo = -0.999, hi = 0.999;
      // Pull the bracket endpoints inside the feasible interval around the
      // current (feasible) entry.
      for (int t = 0; t < 60 && !feasible(cand, lo, a, b, lower); ++t) lo = 0.5 * (lo + cur);
      for (int t = 0; t < 60 && !feasible(cand, hi, a, b, lower); ++t) hi = 0.5 * (hi + cur);
      while (hi - lo > settings.rho_tol) {
        const double mid = 0.5 * (lo + hi);
        if (!feasible(cand, mid, a, b, lower)) break;  // paranoia; interval is convex
        const double k_hat =
            sampled_entry_kappa(scenario, lower, a, b, method, settings, seed, eval_batches);
        (k_hat < target ? lo : hi) = mid;
      }
      r.at(a, b) = r.at(b, a) = 0.5 * (lo + hi);
    }
    ConcordanceSummary sum = implied_concordance(r, scenario, settings, seed);
    double d_max = 0;
    for (int a = 0; a < q; ++a)
      for (int b = a + 1; b < q; ++b)
        d_max = std::max(d_max, std::fabs(sum.k.at(a, b) - k_target.at(a, b)));
    result.r_cal = r;
    result.k_sim = sum.k;
    result.entry_se = sum.se;
    result.d_max = d_max;
    result.cycles = cycle;
    if (d_max <= settings.tol) {
      result.converged = true;
      return result;
    }
  }
  throw ConvergenceError("calibration did not reach tolerance within the cycle budget");
}

}  // namespace windesign

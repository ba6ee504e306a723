#include "windesign/sampler.hpp"

#include <cmath>

#include "windesign/mathutil.hpp"

namespace windesign {

SubjectRecord record_at(const ArmSample& sample, int i) {
  SubjectRecord r;
  r.values.resize(sample.q);
  r.events.resize(sample.q);
  for (int l = 0; l < sample.q; ++l) {
    r.values[l] = sample.values[l][i];
    r.events[l] = sample.events[l][i];
  }
  return r;
}

double inverse_cdf(const MarginalDist& marginal, double u) {
  if (const auto* nm = std::get_if<Normal>(&marginal))
    return nm->mean + nm->sd * inverse_normal_cdf(u);
  if (const auto* bn = std::get_if<Bernoulli>(&marginal)) return u > 1.0 - bn->p ? 1.0 : 0.0;
  if (const auto* ex = std::get_if<Exponential>(&marginal)) return -std::log1p(-u) / ex->rate;
  if (const auto* po = std::get_if<Poisson>(&marginal)) {
    // Sequential CDF inversion; the cap only matters for absurd u*mean combos.
    double pk = std::exp(-po->mean), cdf = pk;
    double k = 0;
    while (u > cdf && k < 1e6) {
      k += 1;
      pk *= po->mean / k;
      cdf += pk;
    }
    return k;
  }
  const auto& ct = std::get<Categorical>(marginal);
  double cdf = 0;
  for (size_t i = 0; i < ct.probs.size(); ++i) {
    cdf += ct.probs[i];
    if (u <= cdf) return ct.scores[i];
  }
  return ct.scores.back();
}

ArmSample sample_arm(int n, const std::vector<MarginalDist>& marginals,
                     const std::vector<LevelRule>& rules, const Matrix& chol_lower,
                     double follow_up, const RngKey& key, Arm arm, Hypothesis hyp) {
  const int q = static_cast<int>(marginals.size());
  ArmSample s;
  s.q = q;
  s.n = n;
  s.arm = arm;
  s.hypothesis = hyp;
  s.values.assign(q, std::vector<double>(n));
  s.events.assign(q, std::vector<uint8_t>(n, 1));

  std::vector<double> g(q), z(q);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < q; ++l) g[l] = normal01(key, static_cast<uint64_t>(i), l);
    for (int l = 0; l < q; ++l) {
      double acc = 0;
      for (int k = 0; k <= l; ++k) acc += chol_lower.at(l, k) * g[k];
      z[l] = acc;
    }
    for (int l = 0; l < q; ++l) {
      double value = inverse_cdf(marginals[l], normal_cdf(z[l]));
      if (rules[l].time_to_event) {
        // Administrative censoring: observe min(T, S) and whether T came first.
        if (value > follow_up) {
          s.values[l][i] = follow_up;
          s.events[l][i] = 0;
        } else {
          s.values[l][i] = value;
          s.events[l][i] = 1;
        }
      } else {
        s.values[l][i] = value;
      }
    }
  }
  return s;
}

ArmSample sample_scenario_arm(const ValidatedScenario& scenario, int n, Arm arm, Hypothesis hyp,
                              uint64_t seed, Stream stream, uint64_t batch) {
  if (!scenario.chol)
    throw ConfigError("dependence targets are not calibrated yet; run calibration first");
  const auto& marginals = arm == Arm::Treatment ? scenario.treatment : scenario.control;
  RngKey key{seed, stream, batch, static_cast<uint32_t>(arm)};
  return sample_arm(n, marginals, scenario.rules, *scenario.chol, scenario.follow_up, key, arm,
                    hyp);
}

}  // namespace windesign

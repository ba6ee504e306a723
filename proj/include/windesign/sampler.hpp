#pragma once

#include <cstdint>
#include <vector>

#include "windesign/rng.hpp"
#include "windesign/scenario.hpp"

namespace windesign {

enum class Arm : uint32_t { Control = 0, Treatment = 1, TreatmentNull = 2 };
enum class Hypothesis { H0, HA };

// Column-major sample: one contiguous array per endpoint level. The pairwise
// kernels stream these arrays, so layout matters more than per-subject views.
struct ArmSample {
  int q = 0;
  int n = 0;
  Arm arm = Arm::Control;
  Hypothesis hypothesis = Hypothesis::HA;
  std::vector<std::vector<double>> values;   // [level][subject], TTE already censored at S
  std::vector<std::vector<uint8_t>> events;  // 1 = observed event; always 1 for non-TTE
};

// Row view for the scalar reference path and small hand-written cases.
struct SubjectRecord {
  std::vector<double> values;
  std::vector<uint8_t> events;
};

SubjectRecord record_at(const ArmSample& sample, int i);

// Generalized inverse F^{-1}(u) = inf{x : F(x) >= u}; discrete families return
// integer-valued doubles. Bernoulli is oriented so larger u => 1, fixing the
// sign convention between latent correlation and observed association.
double inverse_cdf(const MarginalDist& marginal, double u);

// Gaussian-copula draw: z = L·g with g iid N(0,1) from the keyed RNG,
// u_q = Phi(z_q), value = F_q^{-1}(u_q); time-to-event levels (per rules)
// censored at follow_up with the event flag. Subjects use consecutive RNG
// counters, so the sample is reproducible under any parallel schedule.
ArmSample sample_arm(int n, const std::vector<MarginalDist>& marginals,
                     const std::vector<LevelRule>& rules, const Matrix& chol_lower,
                     double follow_up, const RngKey& key, Arm arm, Hypothesis hyp);

// Convenience: arm selection + RNG tag wiring for a validated scenario.
ArmSample sample_scenario_arm(const ValidatedScenario& scenario, int n, Arm arm, Hypothesis hyp,
                              uint64_t seed, Stream stream, uint64_t batch);

}  // namespace windesign

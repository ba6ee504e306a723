#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "windesign/errors.hpp"
#include "windesign/mathutil.hpp"

namespace windesign {

enum class DataType { Binary, Continuous, Ordinal, Count, TimeToEvent };

// Orientation of an endpoint: which direction of the raw value counts as a win
// for the treatment subject. LowerWins swaps the win/loss indicators at that
// level (e.g. hospitalization counts); not applicable to time-to-event, whose
// event-indicator rule already encodes "longer is better".
enum class Direction { HigherWins, LowerWins };

struct Normal {
  double mean = 0, sd = 1;
  bool operator==(const Normal&) const = default;
};
struct Bernoulli {
  double p = 0.5;
  bool operator==(const Bernoulli&) const = default;
};
struct Exponential {
  double rate = 1;
  bool operator==(const Exponential&) const = default;
};
struct Poisson {
  double mean = 1;
  bool operator==(const Poisson&) const = default;
};
struct Categorical {
  std::vector<double> scores;  // ascending integers
  std::vector<double> probs;   // simplex
  bool operator==(const Categorical&) const = default;
};
using MarginalDist = std::variant<Normal, Bernoulli, Exponential, Poisson, Categorical>;

struct MeanDifference {
  double value = 0;
  std::optional<double> sd_treat;  // defaults to control sd
  bool operator==(const MeanDifference&) const = default;
};
struct RiskDifference {
  double value = 0;
  bool operator==(const RiskDifference&) const = default;
};
struct HazardRatio {
  double value = 1;
  bool operator==(const HazardRatio&) const = default;
};
struct MeanRatio {
  double value = 1;
  bool operator==(const MeanRatio&) const = default;
};
struct CategoryShift {
  std::vector<double> probs_treat;
  bool operator==(const CategoryShift&) const = default;
};
using TreatmentEffect =
    std::variant<MeanDifference, RiskDifference, HazardRatio, MeanRatio, CategoryShift>;

struct EndpointSpec {
  std::string name;  // report label; defaults to d1, d2, ...
  DataType data_type = DataType::Continuous;
  MarginalDist control_marginal = Normal{};
  // Exactly one of the two must be set.
  std::optional<TreatmentEffect> effect;
  std::optional<MarginalDist> treatment_marginal;
  double threshold = 0.0;  // win margin delta_q, endpoint units
  Direction direction = Direction::HigherWins;

  bool operator==(const EndpointSpec&) const = default;
};

struct CalibrationSettings {
  double tol = 0.005;      // per-entry concordance tolerance
  int n_cal = 20000;       // sample size per calibration batch
  int min_batches = 2;     // batches grow until every entry's MC SE < tol/3
  int max_batches = 64;
  int max_cycles = 25;     // coordinate sweeps
  double rho_tol = 1e-3;   // bisection interval width stop
  bool pooled_arms = false;  // default: treatment-arm samples only

  bool operator==(const CalibrationSettings&) const = default;
};

struct Independence {
  bool operator==(const Independence&) const = default;
};
struct LatentCorrelation {
  Matrix r;
  bool operator==(const LatentCorrelation&) const = default;
};
struct ObservedTargets {
  Matrix k;
  CalibrationSettings settings;
  bool operator==(const ObservedTargets&) const = default;
};
using DependenceSpec = std::variant<Independence, LatentCorrelation, ObservedTargets>;

enum class Measure { WR, NB, WO, DOOR };

struct DesignInputs {
  std::optional<long long> m;  // treatment-arm size (power / simulate modes)
  double allocation_ratio = 1.0;  // r = n/m
  double alpha = 0.05;
  std::optional<double> target_power;  // sample-size mode
  Measure measure = Measure::WR;

  bool operator==(const DesignInputs&) const = default;
};

struct EstimatorConfig {
  int n_sp = 2000;
  int b_min = 100;
  int b_max = 3000;
  double eps_tau = 5e-4;
  double eps_xi = 1e-4;
  uint64_t seed = 1;
  int workers = 1;

  bool operator==(const EstimatorConfig&) const = default;
};

struct ScenarioSpec {
  std::vector<EndpointSpec> endpoints;
  DependenceSpec dependence = Independence{};
  DesignInputs design;
  EstimatorConfig estimator;
  std::optional<double> follow_up;  // S; required iff any TimeToEvent endpoint

  bool operator==(const ScenarioSpec&) const = default;
};

// Fully resolved comparison rule for one level of the hierarchy.
struct LevelRule {
  double threshold = 0.0;
  bool time_to_event = false;
  bool lower_wins = false;
};

struct ValidatedScenario {
  ScenarioSpec spec;  // original inputs (round-trips through the config format)
  std::vector<MarginalDist> control;    // resolved per-arm marginals
  std::vector<MarginalDist> treatment;
  std::vector<LevelRule> rules;
  double follow_up = 0.0;  // 0 when no TTE endpoint
  bool any_tte = false;
  bool repaired = false;       // correlation went through eigenvalue repair
  std::optional<Matrix> latent;  // empty only while ObservedTargets awaits calibration
  std::optional<Matrix> chol;
  std::optional<ObservedTargets> targets;

  int q() const { return static_cast<int>(rules.size()); }
  bool needs_calibration() const { return !latent.has_value(); }
  // Installs a (calibrated or user-substituted) latent matrix; re-runs the PD check.
  void set_latent(const Matrix& r);
};

ValidatedScenario validate_scenario(const ScenarioSpec& spec, bool repair_correlation = false);

MarginalDist resolve_treatment_marginal(const MarginalDist& control, const TreatmentEffect& effect);

// lambda = -ln(1-p)/horizon: exponential rate matching an event probability
// over a fixed horizon.
double event_prob_to_rate(double p, double horizon);

const char* measure_name(Measure m);  // "wr", "nb", "wo", "door"

}  // namespace windesign

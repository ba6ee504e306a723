#include "windesign/scenario.hpp"

#include <cmath>
#include <string>
#include <variant>

namespace windesign {

namespace {

std::string ep_path(size_t i, const char* field) {
  return "/endpoints/" + std::to_string(i) + "/" + field;
}

void check_marginal(const MarginalDist& m, const std::string& path) {
  if (const auto* nm = std::get_if<Normal>(&m)) {
    if (!(nm->sd > 0)) throw ConfigError(path + "/sd", "must be > 0");
    if (!std::isfinite(nm->mean)) throw ConfigError(path + "/mean", "must be finite");
  } else if (const auto* bn = std::get_if<Bernoulli>(&m)) {
    if (!(bn->p >= 0 && bn->p <= 1)) throw ConfigError(path + "/p", "must be in [0,1]");
  } else if (const auto* ex = std::get_if<Exponential>(&m)) {
    if (!(ex->rate > 0)) throw ConfigError(path + "/rate", "must be > 0");
  } else if (const auto* po = std::get_if<Poisson>(&m)) {
    if (!(po->mean > 0)) throw ConfigError(path + "/mean", "must be > 0");
  } else if (const auto* ct = std::get_if<Categorical>(&m)) {
    if (ct->scores.size() < 2) throw ConfigError(path + "/scores", "need at least 2 categories");
    if (ct->scores.size() != ct->probs.size())
      throw ConfigError(path + "/probs", "must match scores length");
    for (size_t k = 1; k < ct->scores.size(); ++k)
      if (!(ct->scores[k] > ct->scores[k - 1]))
        throw ConfigError(path + "/scores", "must be strictly increasing");
    double sum = 0;
    for (double p : ct->probs) {
      if (!(p >= 0)) throw ConfigError(path + "/probs", "entries must be >= 0");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw ConfigError(path + "/probs", "must sum to 1");
  }
}

// Marginal families admitted per data type.
bool family_fits(DataType t, const MarginalDist& m) {
  switch (t) {
    case DataType::Binary:
      return std::holds_alternative<Bernoulli>(m);
    case DataType::Continuous:
      return std::holds_alternative<Normal>(m) || std::holds_alternative<Exponential>(m);
    case DataType::Ordinal:
      return std::holds_alternative<Categorical>(m);
    case DataType::Count:
      return std::holds_alternative<Poisson>(m);
    case DataType::TimeToEvent:
      return std::holds_alternative<Exponential>(m);
  }
  return false;
}

void check_latent_matrix(const Matrix& r, int q, const std::string& path) {
  if (r.n != q) throw ConfigError(path, "matrix must be " + std::to_string(q) + "x" +
                                            std::to_string(q) + " (one row per endpoint)");
  for (int i = 0; i < q; ++i) {
    if (r.at(i, i) != 1.0) throw ConfigError(path, "diagonal entries must be 1");
    for (int j = 0; j < q; ++j) {
      if (!(r.at(i, j) >= -1.0 && r.at(i, j) <= 1.0))
        throw ConfigError(path, "entries must lie in [-1,1]");
      if (r.at(i, j) != r.at(j, i)) throw ConfigError(path, "matrix must be symmetric");
    }
  }
}

}  // namespace

MarginalDist resolve_treatment_marginal(const MarginalDist& control, const TreatmentEffect& effect) {
  if (const auto* md = std::get_if<MeanDifference>(&effect)) {
    const auto* nm = std::get_if<Normal>(&control);
    if (!nm) throw ConfigError("mean_difference effect requires a normal control marginal");
    return Normal{nm->mean + md->value, md->sd_treat.value_or(nm->sd)};
  }
  if (const auto* rd = std::get_if<RiskDifference>(&effect)) {
    const auto* bn = std::get_if<Bernoulli>(&control);
    if (!bn) throw ConfigError("risk_difference effect requires a bernoulli control marginal");
    double p = bn->p + rd->value;
    if (!(p >= 0 && p <= 1)) throw ConfigError("risk_difference pushes p outside [0,1]");
    return Bernoulli{p};
  }
  if (const auto* hr = std::get_if<HazardRatio>(&effect)) {
    const auto* ex = std::get_if<Exponential>(&control);
    if (!ex) throw ConfigError("hazard_ratio effect requires an exponential control marginal");
    if (!(hr->value > 0)) throw ConfigError("hazard_ratio must be > 0");
    return Exponential{ex->rate * hr->value};
  }
  if (const auto* mr = std::get_if<MeanRatio>(&effect)) {
    if (!(mr->value > 0)) throw ConfigError("mean_ratio must be > 0");
    if (const auto* po = std::get_if<Poisson>(&control)) return Poisson{po->mean * mr->value};
    if (const auto* ex = std::get_if<Exponential>(&control))
      return Exponential{ex->rate / mr->value};
    throw ConfigError("mean_ratio effect requires a poisson or exponential control marginal");
  }
  const auto& cs = std::get<CategoryShift>(effect);
  const auto* ct = std::get_if<Categorical>(&control);
  if (!ct) throw ConfigError("category_shift effect requires a categorical control marginal");
  if (cs.probs_treat.size() != ct->probs.size())
    throw ConfigError("category_shift probs_treat must match control categories");
  return Categorical{ct->scores, cs.probs_treat};
}

double event_prob_to_rate(double p, double horizon) {
  if (!(p > 0 && p < 1)) throw ConfigError("event probability must be in (0,1)");
  if (!(horizon > 0)) throw ConfigError("horizon must be > 0");
  return -std::log1p(-p) / horizon;
}

const char* measure_name(Measure m) {
  switch (m) {
    case Measure::WR: return "wr";
    case Measure::NB: return "nb";
    case Measure::WO: return "wo";
    case Measure::DOOR: return "door";
  }
  return "?";
}

void ValidatedScenario::set_latent(const Matrix& r) {
  check_latent_matrix(r, q(), "/dependence/matrix");
  Matrix lower;
  if (!cholesky(r, lower)) throw DegenerateError("latent correlation matrix is not positive definite");
  latent = r;
  chol = lower;
}

ValidatedScenario validate_scenario(const ScenarioSpec& spec, bool repair) {
  if (spec.endpoints.empty()) throw ConfigError("/endpoints", "need at least one endpoint");
  const int q = static_cast<int>(spec.endpoints.size());

  ValidatedScenario v;
  v.spec = spec;
  v.control.reserve(q);
  v.treatment.reserve(q);
  v.rules.reserve(q);

  for (size_t i = 0; i < spec.endpoints.size(); ++i) {
    const EndpointSpec& ep = spec.endpoints[i];
    if (!family_fits(ep.data_type, ep.control_marginal))
      throw ConfigError(ep_path(i, "control"), "marginal family does not fit the endpoint type");
    check_marginal(ep.control_marginal, ep_path(i, "control"));

    if (ep.effect.has_value() == ep.treatment_marginal.has_value())
      throw ConfigError(ep_path(i, "effect"),
                        "specify exactly one of effect and treatment marginal");
    MarginalDist treat;
    if (ep.effect) {
      try {
        treat = resolve_treatment_marginal(ep.control_marginal, *ep.effect);
      } catch (const ConfigError& e) {
        throw ConfigError(ep_path(i, "effect"), e.what());
      }
    } else {
      treat = *ep.treatment_marginal;
      if (treat.index() != ep.control_marginal.index())
        throw ConfigError(ep_path(i, "treatment"), "family must match the control marginal");
    }
    check_marginal(treat, ep_path(i, "treatment"));

    if (!(ep.threshold >= 0) || !std::isfinite(ep.threshold))
      throw ConfigError(ep_path(i, "threshold"), "must be finite and >= 0");
    const bool tte = ep.data_type == DataType::TimeToEvent;
    if (ep.data_type == DataType::Binary && ep.threshold != 0)
      throw ConfigError(ep_path(i, "threshold"), "binary endpoints compare strictly; use 0");
    if (tte && ep.direction == Direction::LowerWins)
      throw ConfigError(ep_path(i, "direction"),
                        "time-to-event comparisons already encode orientation");

    v.control.push_back(ep.control_marginal);
    v.treatment.push_back(std::move(treat));
    v.rules.push_back(LevelRule{ep.threshold, tte, ep.direction == Direction::LowerWins});
    v.any_tte = v.any_tte || tte;
  }

  if (v.any_tte) {
    if (!spec.follow_up || !(*spec.follow_up > 0))
      throw ConfigError("/follow_up", "required (> 0) with a time_to_event endpoint");
    v.follow_up = *spec.follow_up;
  } else if (spec.follow_up) {
    throw ConfigError("/follow_up", "only meaningful with a time_to_event endpoint");
  }

  if (!(spec.design.alpha > 0 && spec.design.alpha < 1))
    throw ConfigError("/design/alpha", "must be in (0,1)");
  if (!(spec.design.allocation_ratio > 0))
    throw ConfigError("/design/allocation_ratio", "must be > 0");
  if (spec.design.m && *spec.design.m < 2) throw ConfigError("/design/m", "must be >= 2");
  if (spec.design.target_power &&
      !(*spec.design.target_power > 0.5 && *spec.design.target_power < 1))
    throw ConfigError("/design/target_power", "must be in (0.5, 1)");

  const EstimatorConfig& ec = spec.estimator;
  if (ec.n_sp < 2) throw ConfigError("/estimator/n_sp", "must be >= 2");
  if (ec.b_min < 2) throw ConfigError("/estimator/b_min", "must be >= 2");
  if (ec.b_max < ec.b_min) throw ConfigError("/estimator/b_max", "must be >= b_min");
  if (!(ec.eps_tau > 0) || !(ec.eps_xi > 0))
    throw ConfigError("/estimator/eps_tau", "tolerances must be > 0");
  if (ec.workers < 1) throw ConfigError("/estimator/workers", "must be >= 1");

  if (std::holds_alternative<Independence>(spec.dependence)) {
    v.latent = Matrix::identity(q);
    v.chol = Matrix::identity(q);
  } else if (const auto* lc = std::get_if<LatentCorrelation>(&spec.dependence)) {
    check_latent_matrix(lc->r, q, "/dependence/matrix");
    Matrix use = lc->r;
    Matrix lower;
    if (!cholesky(use, lower)) {
      if (!repair)
        throw ConfigError("/dependence/matrix",
                          "not positive definite (rerun with correlation repair to clip)");
      use = repair_correlation(use);
      if (!cholesky(use, lower))
        throw DegenerateError("correlation repair failed to produce a usable matrix");
      v.repaired = true;
    }
    v.latent = use;
    v.chol = lower;
  } else {
    const auto& ot = std::get<ObservedTargets>(spec.dependence);
    check_latent_matrix(ot.k, q, "/dependence/matrix");
    const CalibrationSettings& cs = ot.settings;
    if (!(cs.tol > 0)) throw ConfigError("/dependence/calibration/tol", "must be > 0");
    if (cs.n_cal < 100) throw ConfigError("/dependence/calibration/n_cal", "must be >= 100");
    if (cs.min_batches < 2)
      throw ConfigError("/dependence/calibration/min_batches", "must be >= 2");
    if (cs.max_batches < cs.min_batches)
      throw ConfigError("/dependence/calibration/max_batches", "must be >= min_batches");
    if (cs.max_cycles < 1) throw ConfigError("/dependence/calibration/max_cycles", "must be >= 1");
    if (!(cs.rho_tol > 0)) throw ConfigError("/dependence/calibration/rho_tol", "must be > 0");
    v.targets = ot;
    // latent/chol stay empty until calibrate() installs a matrix.
  }
  return v;
}

}  // namespace windesign

#include "windesign/config_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

namespace windesign {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError(path + "/" + it.key(), "unknown key");
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const char* key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) throw ConfigError(path + "/" + key, "missing");
  if (!v->is_number()) throw ConfigError(path + "/" + key, "expected a number");
  return v->get<double>();
}

double get_number_or(const json& j, const char* key, const std::string& path, double fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError(path + "/" + key, "expected a number");
  return v->get<double>();
}

long long get_integer(const json& j, const char* key, const std::string& path, long long fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError(path + "/" + key, "expected an integer");
  return v->get<long long>();
}

bool get_bool_or(const json& j, const char* key, const std::string& path, bool fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(path + "/" + key, "expected a boolean");
  return v->get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) throw ConfigError(path + "/" + key, "missing");
  if (!v->is_string()) throw ConfigError(path + "/" + key, "expected a string");
  return v->get<std::string>();
}

std::vector<double> get_number_array(const json& j, const char* key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) throw ConfigError(path + "/" + key, "missing");
  if (!v->is_array()) throw ConfigError(path + "/" + key, "expected an array");
  std::vector<double> out;
  out.reserve(v->size());
  for (size_t i = 0; i < v->size(); ++i) {
    const json& e = (*v)[i];
    if (!e.is_number())
      throw ConfigError(path + "/" + key + "/" + std::to_string(i), "expected a number");
    out.push_back(e.get<double>());
  }
  return out;
}

MarginalDist marginal_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string family = get_string(j, "family", path);
  if (family == "normal") {
    check_keys(j, {"family", "mean", "sd"}, path);
    return Normal{get_number(j, "mean", path), get_number(j, "sd", path)};
  }
  if (family == "bernoulli") {
    check_keys(j, {"family", "p"}, path);
    return Bernoulli{get_number(j, "p", path)};
  }
  if (family == "exponential") {
    check_keys(j, {"family", "rate"}, path);
    return Exponential{get_number(j, "rate", path)};
  }
  if (family == "poisson") {
    check_keys(j, {"family", "mean"}, path);
    return Poisson{get_number(j, "mean", path)};
  }
  if (family == "categorical") {
    check_keys(j, {"family", "scores", "probs"}, path);
    return Categorical{get_number_array(j, "scores", path), get_number_array(j, "probs", path)};
  }
  throw ConfigError(path + "/family", "unknown family: " + family);
}

json marginal_to_json(const MarginalDist& m) {
  if (const auto* nm = std::get_if<Normal>(&m))
    return {{"family", "normal"}, {"mean", nm->mean}, {"sd", nm->sd}};
  if (const auto* bn = std::get_if<Bernoulli>(&m)) return {{"family", "bernoulli"}, {"p", bn->p}};
  if (const auto* ex = std::get_if<Exponential>(&m))
    return {{"family", "exponential"}, {"rate", ex->rate}};
  if (const auto* po = std::get_if<Poisson>(&m)) return {{"family", "poisson"}, {"mean", po->mean}};
  const auto& ct = std::get<Categorical>(m);
  return {{"family", "categorical"}, {"scores", ct.scores}, {"probs", ct.probs}};
}

TreatmentEffect effect_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = get_string(j, "kind", path);
  if (kind == "mean_difference") {
    check_keys(j, {"kind", "value", "sd_treat"}, path);
    MeanDifference md{get_number(j, "value", path), std::nullopt};
    if (find(j, "sd_treat")) md.sd_treat = get_number(j, "sd_treat", path);
    return md;
  }
  if (kind == "risk_difference") {
    check_keys(j, {"kind", "value"}, path);
    return RiskDifference{get_number(j, "value", path)};
  }
  if (kind == "hazard_ratio") {
    check_keys(j, {"kind", "value"}, path);
    return HazardRatio{get_number(j, "value", path)};
  }
  if (kind == "mean_ratio") {
    check_keys(j, {"kind", "value"}, path);
    return MeanRatio{get_number(j, "value", path)};
  }
  if (kind == "category_shift") {
    check_keys(j, {"kind", "probs_treat"}, path);
    return CategoryShift{get_number_array(j, "probs_treat", path)};
  }
  throw ConfigError(path + "/kind", "unknown effect kind: " + kind);
}

json effect_to_json(const TreatmentEffect& e) {
  if (const auto* md = std::get_if<MeanDifference>(&e)) {
    json j{{"kind", "mean_difference"}, {"value", md->value}};
    if (md->sd_treat) j["sd_treat"] = *md->sd_treat;
    return j;
  }
  if (const auto* rd = std::get_if<RiskDifference>(&e))
    return {{"kind", "risk_difference"}, {"value", rd->value}};
  if (const auto* hr = std::get_if<HazardRatio>(&e))
    return {{"kind", "hazard_ratio"}, {"value", hr->value}};
  if (const auto* mr = std::get_if<MeanRatio>(&e))
    return {{"kind", "mean_ratio"}, {"value", mr->value}};
  return {{"kind", "category_shift"}, {"probs_treat", std::get<CategoryShift>(e).probs_treat}};
}

DataType type_from_string(const std::string& s, const std::string& path) {
  if (s == "binary") return DataType::Binary;
  if (s == "continuous") return DataType::Continuous;
  if (s == "ordinal") return DataType::Ordinal;
  if (s == "count") return DataType::Count;
  if (s == "tte") return DataType::TimeToEvent;
  throw ConfigError(path, "unknown endpoint type: " + s);
}

const char* type_to_string(DataType t) {
  switch (t) {
    case DataType::Binary: return "binary";
    case DataType::Continuous: return "continuous";
    case DataType::Ordinal: return "ordinal";
    case DataType::Count: return "count";
    case DataType::TimeToEvent: return "tte";
  }
  return "?";
}

Measure measure_from_string(const std::string& s, const std::string& path) {
  if (s == "wr") return Measure::WR;
  if (s == "nb") return Measure::NB;
  if (s == "wo") return Measure::WO;
  if (s == "door") return Measure::DOOR;
  throw ConfigError(path, "unknown measure: " + s);
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of rows");
  const int n = static_cast<int>(j.size());
  Matrix m(n);
  for (int i = 0; i < n; ++i) {
    const json& row = j[i];
    const std::string rp = path + "/" + std::to_string(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ConfigError(rp, "expected a row of length " + std::to_string(n));
    for (int k = 0; k < n; ++k) {
      if (!row[k].is_number())
        throw ConfigError(rp + "/" + std::to_string(k), "expected a number");
      m.at(i, k) = row[k].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.n; ++i) {
    json row = json::array();
    for (int k = 0; k < m.n; ++k) row.push_back(m.at(i, k));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

ScenarioSpec scenario_from_json(const json& j) {
  expect_object(j, "");
  check_keys(j, {"schema", "follow_up", "endpoints", "dependence", "design", "estimator"}, "");
  const std::string schema = get_string(j, "schema", "");
  if (schema != scenario_schema_id())
    throw ConfigError("/schema", std::string("expected ") + scenario_schema_id());

  ScenarioSpec spec;
  if (find(j, "follow_up")) spec.follow_up = get_number(j, "follow_up", "");

  const json* eps = find(j, "endpoints");
  if (!eps || !eps->is_array() || eps->empty())
    throw ConfigError("/endpoints", "expected a non-empty array");
  for (size_t i = 0; i < eps->size(); ++i) {
    const json& e = (*eps)[i];
    const std::string path = "/endpoints/" + std::to_string(i);
    expect_object(e, path);
    check_keys(e, {"name", "type", "control", "effect", "treatment", "threshold", "direction"},
               path);
    EndpointSpec ep;
    ep.name = find(e, "name") ? get_string(e, "name", path) : "";
    if (ep.name.empty()) ep.name = "d" + std::to_string(i + 1);
    ep.data_type = type_from_string(get_string(e, "type", path), path + "/type");
    const json* ctrl = find(e, "control");
    if (!ctrl) throw ConfigError(path + "/control", "missing");
    ep.control_marginal = marginal_from_json(*ctrl, path + "/control");
    if (const json* eff = find(e, "effect")) ep.effect = effect_from_json(*eff, path + "/effect");
    if (const json* tm = find(e, "treatment"))
      ep.treatment_marginal = marginal_from_json(*tm, path + "/treatment");
    ep.threshold = get_number_or(e, "threshold", path, 0.0);
    if (const json* dir = find(e, "direction")) {
      const std::string d = get_string(e, "direction", path);
      if (d == "higher_wins") ep.direction = Direction::HigherWins;
      else if (d == "lower_wins") ep.direction = Direction::LowerWins;
      else throw ConfigError(path + "/direction", "expected higher_wins or lower_wins");
      (void)dir;
    }
    spec.endpoints.push_back(std::move(ep));
  }

  if (const json* dep = find(j, "dependence")) {
    const std::string path = "/dependence";
    expect_object(*dep, path);
    const std::string kind = get_string(*dep, "kind", path);
    if (kind == "independence") {
      check_keys(*dep, {"kind"}, path);
      spec.dependence = Independence{};
    } else if (kind == "latent_correlation") {
      check_keys(*dep, {"kind", "matrix"}, path);
      const json* mat = find(*dep, "matrix");
      if (!mat) throw ConfigError(path + "/matrix", "missing");
      spec.dependence = LatentCorrelation{matrix_from_json(*mat, path + "/matrix")};
    } else if (kind == "observed_targets") {
      check_keys(*dep, {"kind", "matrix", "calibration"}, path);
      const json* mat = find(*dep, "matrix");
      if (!mat) throw ConfigError(path + "/matrix", "missing");
      ObservedTargets ot;
      ot.k = matrix_from_json(*mat, path + "/matrix");
      if (const json* cal = find(*dep, "calibration")) {
        const std::string cp = path + "/calibration";
        expect_object(*cal, cp);
        check_keys(*cal,
                   {"tol", "n_cal", "min_batches", "max_batches", "max_cycles", "rho_tol",
                    "pooled_arms"},
                   cp);
        ot.settings.tol = get_number_or(*cal, "tol", cp, ot.settings.tol);
        ot.settings.n_cal = static_cast<int>(get_integer(*cal, "n_cal", cp, ot.settings.n_cal));
        ot.settings.min_batches =
            static_cast<int>(get_integer(*cal, "min_batches", cp, ot.settings.min_batches));
        ot.settings.max_batches =
            static_cast<int>(get_integer(*cal, "max_batches", cp, ot.settings.max_batches));
        ot.settings.max_cycles =
            static_cast<int>(get_integer(*cal, "max_cycles", cp, ot.settings.max_cycles));
        ot.settings.rho_tol = get_number_or(*cal, "rho_tol", cp, ot.settings.rho_tol);
        ot.settings.pooled_arms = get_bool_or(*cal, "pooled_arms", cp, ot.settings.pooled_arms);
      }
      spec.dependence = std::move(ot);
    } else {
      throw ConfigError(path + "/kind", "unknown dependence kind: " + kind);
    }
  }

  if (const json* des = find(j, "design")) {
    const std::string path = "/design";
    expect_object(*des, path);
    check_keys(*des, {"measure", "alpha", "allocation_ratio", "m", "target_power"}, path);
    if (find(*des, "measure"))
      spec.design.measure =
          measure_from_string(get_string(*des, "measure", path), path + "/measure");
    spec.design.alpha = get_number_or(*des, "alpha", path, spec.design.alpha);
    spec.design.allocation_ratio =
        get_number_or(*des, "allocation_ratio", path, spec.design.allocation_ratio);
    if (find(*des, "m")) spec.design.m = get_integer(*des, "m", path, 0);
    if (find(*des, "target_power"))
      spec.design.target_power = get_number(*des, "target_power", path);
  }

  if (const json* est = find(j, "estimator")) {
    const std::string path = "/estimator";
    expect_object(*est, path);
    check_keys(*est, {"n_sp", "b_min", "b_max", "eps_tau", "eps_xi", "seed", "workers"}, path);
    EstimatorConfig& ec = spec.estimator;
    ec.n_sp = static_cast<int>(get_integer(*est, "n_sp", path, ec.n_sp));
    ec.b_min = static_cast<int>(get_integer(*est, "b_min", path, ec.b_min));
    ec.b_max = static_cast<int>(get_integer(*est, "b_max", path, ec.b_max));
    ec.eps_tau = get_number_or(*est, "eps_tau", path, ec.eps_tau);
    ec.eps_xi = get_number_or(*est, "eps_xi", path, ec.eps_xi);
    ec.seed = static_cast<uint64_t>(get_integer(*est, "seed", path, static_cast<long long>(ec.seed)));
    ec.workers = static_cast<int>(get_integer(*est, "workers", path, ec.workers));
  }
  return spec;
}

json scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["schema"] = scenario_schema_id();
  if (spec.follow_up) j["follow_up"] = *spec.follow_up;
  json eps = json::array();
  for (const EndpointSpec& ep : spec.endpoints) {
    json e;
    e["name"] = ep.name;
    e["type"] = type_to_string(ep.data_type);
    e["control"] = marginal_to_json(ep.control_marginal);
    if (ep.effect) e["effect"] = effect_to_json(*ep.effect);
    if (ep.treatment_marginal) e["treatment"] = marginal_to_json(*ep.treatment_marginal);
    e["threshold"] = ep.threshold;
    e["direction"] = ep.direction == Direction::LowerWins ? "lower_wins" : "higher_wins";
    eps.push_back(std::move(e));
  }
  j["endpoints"] = std::move(eps);

  json dep;
  if (std::holds_alternative<Independence>(spec.dependence)) {
    dep["kind"] = "independence";
  } else if (const auto* lc = std::get_if<LatentCorrelation>(&spec.dependence)) {
    dep["kind"] = "latent_correlation";
    dep["matrix"] = matrix_to_json(lc->r);
  } else {
    const auto& ot = std::get<ObservedTargets>(spec.dependence);
    dep["kind"] = "observed_targets";
    dep["matrix"] = matrix_to_json(ot.k);
    dep["calibration"] = {{"tol", ot.settings.tol},
                          {"n_cal", ot.settings.n_cal},
                          {"min_batches", ot.settings.min_batches},
                          {"max_batches", ot.settings.max_batches},
                          {"max_cycles", ot.settings.max_cycles},
                          {"rho_tol", ot.settings.rho_tol},
                          {"pooled_arms", ot.settings.pooled_arms}};
  }
  j["dependence"] = std::move(dep);

  json des;
  des["measure"] = measure_name(spec.design.measure);
  des["alpha"] = spec.design.alpha;
  des["allocation_ratio"] = spec.design.allocation_ratio;
  if (spec.design.m) des["m"] = *spec.design.m;
  if (spec.design.target_power) des["target_power"] = *spec.design.target_power;
  j["design"] = std::move(des);

  const EstimatorConfig& ec = spec.estimator;
  j["estimator"] = {{"n_sp", ec.n_sp},     {"b_min", ec.b_min},   {"b_max", ec.b_max},
                    {"eps_tau", ec.eps_tau}, {"eps_xi", ec.eps_xi}, {"seed", ec.seed},
                    {"workers", ec.workers}};
  return j;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

std::string config_hash(const json& j) {
  const std::string dump = j.dump();  // keys already sorted canonically
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* scenario_schema_id() { return "windesign-scenario/v1"; }

const char* scenario_schema_json() {
  // Kept byte-identical to schemas/scenario.schema.json (unit-tested).
  static const char* kSchema = R"__JS__({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "$id": "windesign-scenario/v1",
  "title": "Hierarchical win-statistic trial design scenario",
  "type": "object",
  "required": ["schema", "endpoints"],
  "additionalProperties": false,
  "properties": {
    "schema": {"const": "windesign-scenario/v1"},
    "follow_up": {
      "type": "number",
      "exclusiveMinimum": 0,
      "description": "Administrative censoring horizon S; required iff any endpoint has type tte."
    },
    "endpoints": {
      "type": "array",
      "minItems": 1,
      "description": "Hierarchy in priority order; the first non-tied level decides a pair.",
      "items": {
        "type": "object",
        "required": ["type", "control"],
        "additionalProperties": false,
        "properties": {
          "name": {"type": "string"},
          "type": {"enum": ["binary", "continuous", "ordinal", "count", "tte"]},
          "control": {"$ref": "#/definitions/marginal"},
          "treatment": {"$ref": "#/definitions/marginal"},
          "effect": {"$ref": "#/definitions/effect"},
          "threshold": {
            "type": "number",
            "minimum": 0,
            "description": "Win margin delta in endpoint units; binary endpoints must use 0."
          },
          "direction": {
            "enum": ["higher_wins", "lower_wins"],
            "description": "lower_wins flips the win/loss tests; not allowed for tte."
          }
        }
      }
    },
    "dependence": {
      "type": "object",
      "oneOf": [
        {
          "properties": {"kind": {"const": "independence"}},
          "required": ["kind"],
          "additionalProperties": false
        },
        {
          "properties": {
            "kind": {"const": "latent_correlation"},
            "matrix": {"$ref": "#/definitions/square_matrix"}
          },
          "required": ["kind", "matrix"],
          "additionalProperties": false
        },
        {
          "properties": {
            "kind": {"const": "observed_targets"},
            "matrix": {
              "$ref": "#/definitions/square_matrix",
              "description": "Entrywise concordance targets on sampled values (Kendall tau-b, or the censoring-aware concordance 2C-1 when a tte endpoint is involved)."
            },
            "calibration": {
              "type": "object",
              "additionalProperties": false,
              "properties": {
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "n_cal": {"type": "integer", "minimum": 100},
                "min_batches": {"type": "integer", "minimum": 2},
                "max_batches": {"type": "integer", "minimum": 2},
                "max_cycles": {"type": "integer", "minimum": 1},
                "rho_tol": {"type": "number", "exclusiveMinimum": 0},
                "pooled_arms": {"type": "boolean"}
              }
            }
          },
          "required": ["kind", "matrix"],
          "additionalProperties": false
        }
      ]
    },
    "design": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "measure": {"enum": ["wr", "nb", "wo", "door"]},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "allocation_ratio": {
          "type": "number",
          "exclusiveMinimum": 0,
          "description": "r = control size / treatment size."
        },
        "m": {"type": "integer", "minimum": 2},
        "target_power": {"type": "number", "exclusiveMinimum": 0.5, "exclusiveMaximum": 1}
      }
    },
    "estimator": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "n_sp": {"type": "integer", "minimum": 2},
        "b_min": {"type": "integer", "minimum": 2},
        "b_max": {"type": "integer", "minimum": 2},
        "eps_tau": {"type": "number", "exclusiveMinimum": 0},
        "eps_xi": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "workers": {"type": "integer", "minimum": 1}
      }
    }
  },
  "definitions": {
    "marginal": {
      "type": "object",
      "required": ["family"],
      "oneOf": [
        {
          "properties": {
            "family": {"const": "normal"},
            "mean": {"type": "number"},
            "sd": {"type": "number", "exclusiveMinimum": 0}
          },
          "required": ["family", "mean", "sd"],
          "additionalProperties": false
        },
        {
          "properties": {
            "family": {"const": "bernoulli"},
            "p": {
              "type": "number",
              "minimum": 0,
              "maximum": 1,
              "description": "Copula convention: the latent uniform maps larger u to outcome 1."
            }
          },
          "required": ["family", "p"],
          "additionalProperties": false
        },
        {
          "properties": {
            "family": {"const": "exponential"},
            "rate": {"type": "number", "exclusiveMinimum": 0}
          },
          "required": ["family", "rate"],
          "additionalProperties": false
        },
        {
          "properties": {
            "family": {"const": "poisson"},
            "mean": {"type": "number", "exclusiveMinimum": 0}
          },
          "required": ["family", "mean"],
          "additionalProperties": false
        },
        {
          "properties": {
            "family": {"const": "categorical"},
            "scores": {"type": "array", "minItems": 2, "items": {"type": "number"}},
            "probs": {"type": "array", "minItems": 2, "items": {"type": "number", "minimum": 0}}
          },
          "required": ["family", "scores", "probs"],
          "additionalProperties": false
        }
      ]
    },
    "effect": {
      "type": "object",
      "required": ["kind"],
      "oneOf": [
        {
          "properties": {
            "kind": {"const": "mean_difference"},
            "value": {"type": "number"},
            "sd_treat": {"type": "number", "exclusiveMinimum": 0}
          },
          "required": ["kind", "value"],
          "additionalProperties": false
        },
        {
          "properties": {"kind": {"const": "risk_difference"}, "value": {"type": "number"}},
          "required": ["kind", "value"],
          "additionalProperties": false
        },
        {
          "properties": {
            "kind": {"const": "hazard_ratio"},
            "value": {"type": "number", "exclusiveMinimum": 0}
          },
          "required": ["kind", "value"],
          "additionalProperties": false
        },
        {
          "properties": {
            "kind": {"const": "mean_ratio"},
            "value": {"type": "number", "exclusiveMinimum": 0}
          },
          "required": ["kind", "value"],
          "additionalProperties": false
        },
        {
          "properties": {
            "kind": {"const": "category_shift"},
            "probs_treat": {"type": "array", "minItems": 2, "items": {"type": "number", "minimum": 0}}
          },
          "required": ["kind", "probs_treat"],
          "additionalProperties": false
        }
      ]
    },
    "square_matrix": {
      "type": "array",
      "minItems": 1,
      "items": {"type": "array", "items": {"type": "number"}}
    }
  }
}
)__JS__";
  return kSchema;
}

}  // namespace windesign

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "windesign/calibrate.hpp"
#include "windesign/config_io.hpp"
#include "windesign/estimator.hpp"
#include "windesign/measures.hpp"
#include "windesign/report.hpp"
#include "windesign/simulate.hpp"

namespace wd = windesign;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<uint64_t> seed;
  std::optional<int> workers;
  std::string measures = "";  // empty -> config's design measure
  bool repair_correlation = false;
  bool both_tails = false;
  bool exact = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool wants_exact = true) {
  cmd->add_option("config", o.config_path, "scenario config (JSON)")->required();
  cmd->add_option("--out", o.out_dir, "output directory (default ./out)");
  cmd->add_option("--seed", o.seed, "override estimator.seed");
  cmd->add_option("--workers", o.workers, "override estimator.workers");
  cmd->add_option("--measures", o.measures,
                  "comma list of wr,nb,wo,door or 'all' (default: config measure)");
  cmd->add_flag("--repair-correlation", o.repair_correlation,
                "clip a non-positive-definite latent matrix instead of failing");
  cmd->add_flag("--both-tails", o.both_tails, "add the wrong-tail rejection term to power");
  if (wants_exact)
    cmd->add_flag("--exact", o.exact, "also report finite-sample (exact-variance) results");
}

json matrix_json(const wd::Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.n; ++i) {
    json row = json::array();
    for (int k = 0; k < m.n; ++k) row.push_back(m.at(i, k));
    rows.push_back(row);
  }
  return rows;
}

std::vector<wd::Measure> parse_measures(const std::string& s, wd::Measure fallback) {
  if (s.empty()) return {fallback};
  if (s == "all") return {wd::Measure::WR, wd::Measure::NB, wd::Measure::WO, wd::Measure::DOOR};
  std::vector<wd::Measure> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok == "wr") out.push_back(wd::Measure::WR);
    else if (tok == "nb") out.push_back(wd::Measure::NB);
    else if (tok == "wo") out.push_back(wd::Measure::WO);
    else if (tok == "door") out.push_back(wd::Measure::DOOR);
    else throw wd::ConfigError("--measures: unknown measure '" + tok + "'");
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct LoadedScenario {
  wd::ScenarioSpec spec;
  wd::ValidatedScenario scenario;
  std::string hash;
  json calibration;  // present when auto-calibration ran
};

LoadedScenario load_and_prepare(const CommonOpts& o, bool auto_calibrate = true) {
  LoadedScenario ls;
  ls.spec = wd::load_scenario_file(o.config_path);
  if (o.seed) ls.spec.estimator.seed = *o.seed;
  if (o.workers) {
    ls.spec.estimator.workers = *o.workers;
  } else if (const char* env = std::getenv("WINDESIGN_WORKERS")) {
    ls.spec.estimator.workers = std::max(1, std::atoi(env));
  }
  ls.hash = wd::config_hash(wd::scenario_to_json(ls.spec));
  ls.scenario = wd::validate_scenario(ls.spec, o.repair_correlation);
  if (ls.scenario.needs_calibration() && auto_calibrate) {
    const wd::ObservedTargets& ot = *ls.scenario.targets;
    std::cerr << "calibrating latent correlation against observed targets...\n";
    wd::CalibrationResult cal =
        wd::calibrate(ot.k, ls.scenario, ot.settings, ls.spec.estimator.seed);
    ls.scenario.set_latent(cal.r_cal);
    ls.calibration = {{"r_cal", matrix_json(cal.r_cal)},
                      {"k_sim", matrix_json(cal.k_sim)},
                      {"d_max", cal.d_max},
                      {"cycles", cal.cycles}};
  }
  return ls;
}

json estimates_json(const wd::PluginEstimates& e) {
  return {{"tau_w", e.tau_w},
          {"tau_l", e.tau_l},
          {"tau_tie", e.tau_tie},
          {"xi",
           {{"ww10", e.xi.ww10},
            {"ww01", e.xi.ww01},
            {"ww11", e.xi.ww11},
            {"ll10", e.xi.ll10},
            {"ll01", e.xi.ll01},
            {"ll11", e.xi.ll11},
            {"wl10", e.xi.wl10},
            {"wl01", e.xi.wl01},
            {"wl11", e.xi.wl11}}}};
}

json diagnostics_json(const wd::RunDiagnostics& d) {
  return {{"b_final", d.b_final},
          {"status", d.status == wd::RunStatus::Converged ? "converged" : "b_max_reached"},
          {"max_se_tau", d.max_se_tau},
          {"max_se_xi", d.max_se_xi},
          {"wall_seconds", d.wall_seconds},
          {"workset_bytes_estimate", d.workset_bytes_estimate},
          {"peak_rss_bytes", d.peak_rss_bytes},
          {"workers", d.workers},
          {"kernel", d.kernel},
          {"clamped_xi", d.clamped_xi}};
}

json levels_json(const std::vector<int64_t>& wins, const std::vector<int64_t>& losses,
                 int64_t pair_total) {
  json rows = json::array();
  int64_t reaching = pair_total;
  for (size_t l = 0; l < wins.size(); ++l) {
    json row{{"level", l + 1}, {"pairs", reaching}};
    if (reaching > 0) {
      row["win"] = static_cast<double>(wins[l]) / static_cast<double>(reaching);
      row["loss"] = static_cast<double>(losses[l]) / static_cast<double>(reaching);
      row["tie"] = 1.0 - row["win"].get<double>() - row["loss"].get<double>();
    }
    rows.push_back(std::move(row));
    reaching -= wins[l] + losses[l];
  }
  return rows;
}

long long control_size(const wd::DesignInputs& d, long long m) {
  return std::max<long long>(2, std::llround(d.allocation_ratio * static_cast<double>(m)));
}

std::string g6(double v) { return wd::format_g6(v); }

int finish_forss_exit(const wd::ForssResult& res) {
  return res.diagnostics.status == wd::RunStatus::BMaxReached ? 3 : 0;
}

int cmd_power(const CommonOpts& o) {
  LoadedScenario ls = load_and_prepare(o);
  if (!ls.spec.design.m) throw wd::ConfigError("/design/m", "required for power");
  const long long m = *ls.spec.design.m;
  const long long n = control_size(ls.spec.design, m);
  const double r = ls.spec.design.allocation_ratio;
  wd::ForssResult res = wd::run_forss(ls.scenario, ls.spec.estimator);

  json out{{"command", "power"},
           {"config_hash", ls.hash},
           {"seed", ls.spec.estimator.seed},
           {"m", m},
           {"n", n},
           {"alpha", ls.spec.design.alpha},
           {"estimates", {{"null", estimates_json(res.null_est)}, {"alt", estimates_json(res.alt_est)}}},
           {"levels",
            {{"null", levels_json(res.level_wins_null, res.level_losses_null, res.pair_total)},
             {"alt", levels_json(res.level_wins_alt, res.level_losses_alt, res.pair_total)}}},
           {"diagnostics", diagnostics_json(res.diagnostics)}};
  if (!ls.calibration.is_null()) out["calibration"] = ls.calibration;

  wd::MeasureValues vals = wd::measure_values(res.alt_est);
  const double value_by[] = {vals.wr, vals.nb, vals.wo, vals.door};
  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  for (wd::Measure ms : parse_measures(o.measures, ls.spec.design.measure)) {
    wd::MeasureQuantities q = wd::measure_quantities(ms, res.null_est, res.alt_est, r);
    const double power = wd::power_closed_form(q, m, ls.spec.design.alpha, o.both_tails);
    wd::PowerTriplet trip =
        wd::sensitivity_power_triplet(res.null_est, res.alt_est, ms, m, r, ls.spec.design.alpha);
    json jr{{"measure", wd::measure_name(ms)},
            {"value", value_by[static_cast<int>(ms)]},
            {"delta", q.delta},
            {"a_null", q.a_null},
            {"a_alt", q.a_alt},
            {"power", power},
            {"power_a_null_both", trip.p_null}};
    if (!std::isnan(trip.p_yg)) jr["power_tie_only"] = trip.p_yg;
    std::string exact_s = "";
    if (o.exact) {
      const double pe =
          wd::power_exact(res.null_est, res.alt_est, ms, m, n, ls.spec.design.alpha, o.both_tails);
      jr["power_exact"] = pe;
      exact_s = g6(pe);
    }
    jrows.push_back(std::move(jr));
    rows.push_back({wd::measure_name(ms), g6(res.alt_est.tau_w), g6(res.alt_est.tau_l),
                    g6(res.alt_est.tau_tie), g6(value_by[static_cast<int>(ms)]), g6(q.delta),
                    g6(q.a_null), g6(q.a_alt), g6(power), exact_s, g6(trip.p_null),
                    std::isnan(trip.p_yg) ? "" : g6(trip.p_yg), std::to_string(m),
                    std::to_string(n), g6(ls.spec.design.alpha),
                    std::to_string(res.diagnostics.b_final),
                    res.diagnostics.status == wd::RunStatus::Converged ? "converged"
                                                                       : "b_max_reached",
                    std::to_string(ls.spec.estimator.seed), ls.hash});
    std::cout << "power[" << wd::measure_name(ms) << "] = " << g6(power * 100) << "%\n";
  }
  out["measures"] = std::move(jrows);
  wd::write_file(o.out_dir + "/power.json", wd::render_json(out));
  wd::write_file(o.out_dir + "/power.csv",
                 wd::render_csv({"measure", "tau_w", "tau_l", "tau_tie", "value", "delta",
                                 "a_null", "a_alt", "power", "power_exact", "power_a_null_both",
                                 "power_tie_only", "m", "n", "alpha", "batches", "status", "seed",
                                 "config_hash"},
                                rows));
  std::cout << "wrote " << o.out_dir << "/power.json, " << o.out_dir << "/power.csv\n";
  return finish_forss_exit(res);
}

int cmd_samplesize(const CommonOpts& o) {
  LoadedScenario ls = load_and_prepare(o);
  if (!ls.spec.design.target_power)
    throw wd::ConfigError("/design/target_power", "required for samplesize");
  const double r = ls.spec.design.allocation_ratio;
  const double target = *ls.spec.design.target_power;
  wd::ForssResult res = wd::run_forss(ls.scenario, ls.spec.estimator);

  json out{{"command", "samplesize"},
           {"config_hash", ls.hash},
           {"seed", ls.spec.estimator.seed},
           {"target_power", target},
           {"alpha", ls.spec.design.alpha},
           {"estimates", {{"null", estimates_json(res.null_est)}, {"alt", estimates_json(res.alt_est)}}},
           {"diagnostics", diagnostics_json(res.diagnostics)}};
  if (!ls.calibration.is_null()) out["calibration"] = ls.calibration;

  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  for (wd::Measure ms : parse_measures(o.measures, ls.spec.design.measure)) {
    wd::MeasureQuantities q = wd::measure_quantities(ms, res.null_est, res.alt_est, r);
    const long long m = wd::sample_size_closed_form(q, ls.spec.design.alpha, target);
    const long long n = control_size(ls.spec.design, m);
    json jr{{"measure", wd::measure_name(ms)}, {"delta", q.delta},    {"a_null", q.a_null},
            {"a_alt", q.a_alt},                {"m", m},              {"n", n},
            {"total", m + n}};
    std::string me_s = "", ne_s = "";
    if (o.exact) {
      const long long me = wd::sample_size_exact(res.null_est, res.alt_est, ms, r,
                                                 ls.spec.design.alpha, target);
      const long long ne = control_size(ls.spec.design, me);
      jr["m_exact"] = me;
      jr["n_exact"] = ne;
      me_s = std::to_string(me);
      ne_s = std::to_string(ne);
    }
    jrows.push_back(std::move(jr));
    rows.push_back({wd::measure_name(ms), g6(q.delta), g6(q.a_null), g6(q.a_alt),
                    std::to_string(m), std::to_string(n), std::to_string(m + n), me_s, ne_s,
                    g6(ls.spec.design.alpha), g6(target),
                    std::to_string(res.diagnostics.b_final),
                    res.diagnostics.status == wd::RunStatus::Converged ? "converged"
                                                                       : "b_max_reached",
                    std::to_string(ls.spec.estimator.seed), ls.hash});
    std::cout << "samplesize[" << wd::measure_name(ms) << "]: m = " << m << ", total = " << m + n
              << "\n";
  }
  out["measures"] = std::move(jrows);
  wd::write_file(o.out_dir + "/samplesize.json", wd::render_json(out));
  wd::write_file(o.out_dir + "/samplesize.csv",
                 wd::render_csv({"measure", "delta", "a_null", "a_alt", "m", "n", "total",
                                 "m_exact", "n_exact", "alpha", "target_power", "batches",
                                 "status", "seed", "config_hash"},
                                rows));
  std::cout << "wrote " << o.out_dir << "/samplesize.json, " << o.out_dir << "/samplesize.csv\n";
  return finish_forss_exit(res);
}

int cmd_simulate(const CommonOpts& o, long long reps, bool unsymmetrized) {
  LoadedScenario ls = load_and_prepare(o);
  if (!ls.spec.design.m) throw wd::ConfigError("/design/m", "required for simulate");
  const long long m = *ls.spec.design.m;
  const long long n = control_size(ls.spec.design, m);
  auto [alt, nul] = wd::empirical_rates(ls.scenario, m, n, reps, ls.spec.estimator.seed,
                                        ls.spec.design.alpha, ls.spec.estimator.workers,
                                        !unsymmetrized);

  json out{{"command", "simulate"}, {"config_hash", ls.hash},
           {"seed", ls.spec.estimator.seed}, {"m", m},
           {"n", n},                  {"alpha", ls.spec.design.alpha},
           {"reps", reps},            {"symmetrized_null", !unsymmetrized}};
  if (!ls.calibration.is_null()) out["calibration"] = ls.calibration;
  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  for (wd::Measure ms : parse_measures(o.measures, ls.spec.design.measure)) {
    const auto k = static_cast<size_t>(ms);
    json jr{{"measure", wd::measure_name(ms)},
            {"power_emp", alt.rate[k]},
            {"type1_emp", nul.rate[k]},
            {"rejections_alt", alt.rejections[k]},
            {"rejections_null", nul.rejections[k]},
            {"degenerate_alt", alt.degenerate[k]},
            {"degenerate_null", nul.degenerate[k]},
            {"mean_value_alt", alt.mean_value[k]},
            {"mean_value_null", nul.mean_value[k]}};
    jrows.push_back(std::move(jr));
    rows.push_back({wd::measure_name(ms), std::to_string(m), std::to_string(n),
                    std::to_string(reps), g6(alt.rate[k]), g6(nul.rate[k]),
                    std::to_string(alt.degenerate[k]), std::to_string(nul.degenerate[k]),
                    g6(alt.mean_value[k]), g6(nul.mean_value[k]), g6(ls.spec.design.alpha),
                    std::to_string(ls.spec.estimator.seed), ls.hash});
    std::cout << "simulate[" << wd::measure_name(ms) << "]: power = " << g6(alt.rate[k] * 100)
              << "%, type I = " << g6(nul.rate[k] * 100) << "%\n";
  }
  out["measures"] = std::move(jrows);
  wd::write_file(o.out_dir + "/simulate.json", wd::render_json(out));
  wd::write_file(o.out_dir + "/simulate.csv",
                 wd::render_csv({"measure", "m", "n", "reps", "power_emp", "type1_emp",
                                 "degenerate_alt", "degenerate_null", "mean_value_alt",
                                 "mean_value_null", "alpha", "seed", "config_hash"},
                                rows));
  std::cout << "wrote " << o.out_dir << "/simulate.json, " << o.out_dir << "/simulate.csv\n";
  return 0;
}

int cmd_calibrate(const CommonOpts& o) {
  LoadedScenario ls = load_and_prepare(o, /*auto_calibrate=*/false);
  if (!ls.scenario.targets)
    throw wd::ConfigError("/dependence", "calibrate needs kind = observed_targets");
  const wd::ObservedTargets& ot = *ls.scenario.targets;
  wd::CalibrationResult cal = wd::calibrate(ot.k, ls.scenario, ot.settings, ls.spec.estimator.seed);

  json out{{"command", "calibrate"},
           {"config_hash", ls.hash},
           {"seed", ls.spec.estimator.seed},
           {"k_target", matrix_json(ot.k)},
           {"r_cal", matrix_json(cal.r_cal)},
           {"k_sim", matrix_json(cal.k_sim)},
           {"entry_se", cal.entry_se},
           {"d_max", cal.d_max},
           {"cycles", cal.cycles},
           {"converged", cal.converged}};
  std::vector<std::vector<std::string>> rows;
  const int q = cal.r_cal.n;
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b)
      rows.push_back({std::to_string(a + 1), std::to_string(b + 1), g6(ot.k.at(a, b)),
                      g6(cal.r_cal.at(a, b)), g6(cal.k_sim.at(a, b)),
                      g6(cal.k_sim.at(a, b) - ot.k.at(a, b)),
                      std::to_string(ls.spec.estimator.seed), ls.hash});
  wd::write_file(o.out_dir + "/calibrate.json", wd::render_json(out));
  wd::write_file(o.out_dir + "/calibrate.csv",
                 wd::render_csv({"row", "col", "k_target", "rho_cal", "k_sim", "k_error", "seed",
                                 "config_hash"},
                                rows));
  std::cout << "calibrated in " << cal.cycles << " cycle(s), max entry error = " << g6(cal.d_max)
            << "\nwrote " << o.out_dir << "/calibrate.json, " << o.out_dir << "/calibrate.csv\n";
  return 0;
}

int cmd_grid(const CommonOpts& o, const std::string& rho_list, const std::string& grid_file,
             long long empirical_reps) {
  LoadedScenario base = load_and_prepare(o, /*auto_calibrate=*/false);
  const int q = static_cast<int>(base.spec.endpoints.size());

  std::vector<std::pair<std::string, wd::Matrix>> points;
  if (!rho_list.empty()) {
    size_t pos = 0;
    while (pos <= rho_list.size()) {
      size_t comma = rho_list.find(',', pos);
      std::string tok =
          rho_list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      char* end = nullptr;
      const double rho = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end) throw wd::ConfigError("--rho: bad number '" + tok + "'");
      wd::Matrix r = wd::Matrix::identity(q);
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
          if (a != b) r.at(a, b) = rho;
      points.emplace_back(tok, std::move(r));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (!grid_file.empty()) {
    std::ifstream f(grid_file);
    if (!f) throw wd::ConfigError("cannot open grid file: " + grid_file);
    json j;
    try {
      j = json::parse(f);
    } catch (const json::parse_error& e) {
      throw wd::ConfigError(grid_file + ": " + e.what());
    }
    if (!j.is_array()) throw wd::ConfigError(grid_file + ": expected an array of matrices");
    for (size_t i = 0; i < j.size(); ++i) {
      const json& mj = j[i];
      if (!mj.is_array() || mj.size() != static_cast<size_t>(q))
        throw wd::ConfigError(grid_file + "[" + std::to_string(i) + "]: expected a " +
                              std::to_string(q) + "x" + std::to_string(q) + " matrix");
      wd::Matrix r(q);
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) r.at(a, b) = mj[a][b].get<double>();
      points.emplace_back("matrix_" + std::to_string(i), std::move(r));
    }
  }
  if (points.empty()) throw wd::ConfigError("grid needs --rho and/or --grid-file");

  const auto measures = parse_measures(o.measures, base.spec.design.measure);
  const double r_alloc = base.spec.design.allocation_ratio;
  json jpoints = json::array();
  std::vector<std::vector<std::string>> rows;
  int ok_points = 0;
  bool any_bmax = false;
  int last_error_code = 1;

  for (const auto& [label, rmat] : points) {
    json jp{{"point", label}, {"latent", matrix_json(rmat)}};
    try {
      wd::ScenarioSpec spec = base.spec;
      spec.dependence = wd::LatentCorrelation{rmat};
      wd::ValidatedScenario sc = wd::validate_scenario(spec, o.repair_correlation);
      wd::ForssResult res = wd::run_forss(sc, spec.estimator);
      any_bmax = any_bmax || res.diagnostics.status == wd::RunStatus::BMaxReached;

      wd::ConcordanceSummary ks =
          wd::implied_concordance(*sc.latent, sc, wd::CalibrationSettings{}, spec.estimator.seed);
      std::string kappa_s;
      for (int a = 0; a < q; ++a)
        for (int b = a + 1; b < q; ++b) {
          if (!kappa_s.empty()) kappa_s += '|';
          kappa_s += g6(ks.k.at(a, b));
        }
      jp["kappa_hat"] = matrix_json(ks.k);
      jp["estimates"] = {{"null", estimates_json(res.null_est)},
                         {"alt", estimates_json(res.alt_est)}};
      jp["diagnostics"] = diagnostics_json(res.diagnostics);

      std::optional<std::pair<wd::SimulationReport, wd::SimulationReport>> emp;
      if (empirical_reps > 0) {
        if (!spec.design.m) throw wd::ConfigError("/design/m", "required for --empirical-reps");
        emp = wd::empirical_rates(sc, *spec.design.m, control_size(spec.design, *spec.design.m),
                                  empirical_reps, spec.estimator.seed, spec.design.alpha,
                                  spec.estimator.workers, true);
      }

      wd::MeasureValues vals = wd::measure_values(res.alt_est);
      const double value_by[] = {vals.wr, vals.nb, vals.wo, vals.door};
      json jms = json::array();
      for (wd::Measure ms : measures) {
        wd::MeasureQuantities qq =
            wd::measure_quantities(ms, res.null_est, res.alt_est, r_alloc);
        json jm{{"measure", wd::measure_name(ms)},
                {"value", value_by[static_cast<int>(ms)]},
                {"delta", qq.delta},
                {"a_null", qq.a_null},
                {"a_alt", qq.a_alt}};
        std::string power_s, p_null_s, p_yg_s, m_req_s, emp_power_s, emp_t1_s;
        if (spec.design.m) {
          const double pw =
              wd::power_closed_form(qq, *spec.design.m, spec.design.alpha, o.both_tails);
          wd::PowerTriplet trip = wd::sensitivity_power_triplet(
              res.null_est, res.alt_est, ms, *spec.design.m, r_alloc, spec.design.alpha);
          jm["power"] = pw;
          jm["power_a_null_both"] = trip.p_null;
          power_s = g6(pw);
          p_null_s = g6(trip.p_null);
          if (!std::isnan(trip.p_yg)) {
            jm["power_tie_only"] = trip.p_yg;
            p_yg_s = g6(trip.p_yg);
          }
        }
        if (spec.design.target_power) {
          const long long mreq =
              wd::sample_size_closed_form(qq, spec.design.alpha, *spec.design.target_power);
          jm["m_required"] = mreq;
          jm["total_required"] = mreq + control_size(spec.design, mreq);
          m_req_s = std::to_string(mreq);
        }
        if (emp) {
          const auto k = static_cast<size_t>(ms);
          jm["power_emp"] = emp->first.rate[k];
          jm["type1_emp"] = emp->second.rate[k];
          emp_power_s = g6(emp->first.rate[k]);
          emp_t1_s = g6(emp->second.rate[k]);
        }
        jms.push_back(std::move(jm));
        rows.push_back({label, kappa_s, wd::measure_name(ms), g6(res.alt_est.tau_w),
                        g6(res.alt_est.tau_l), g6(res.alt_est.tau_tie),
                        g6(value_by[static_cast<int>(ms)]), g6(qq.delta), g6(qq.a_null),
                        g6(qq.a_alt), power_s, p_null_s, p_yg_s, m_req_s, emp_power_s, emp_t1_s,
                        std::to_string(res.diagnostics.b_final),
                        res.diagnostics.status == wd::RunStatus::Converged ? "converged"
                                                                           : "b_max_reached",
                        "", std::to_string(spec.estimator.seed), base.hash});
      }
      jp["measures"] = std::move(jms);
      ++ok_points;
      std::cout << "grid point " << label << ": done\n";
    } catch (const wd::Error& e) {
      jp["error"] = e.what();
      last_error_code = static_cast<int>(e.code());
      std::vector<std::string> err_row(21, "");
      err_row[0] = label;
      err_row[18] = e.what();
      err_row[19] = std::to_string(base.spec.estimator.seed);
      err_row[20] = base.hash;
      rows.push_back(std::move(err_row));
      std::cout << "grid point " << label << ": error: " << e.what() << "\n";
    }
    jpoints.push_back(std::move(jp));
  }

  json out{{"command", "grid"},
           {"config_hash", base.hash},
           {"seed", base.spec.estimator.seed},
           {"points", std::move(jpoints)}};
  wd::write_file(o.out_dir + "/grid.json", wd::render_json(out));
  wd::write_file(
      o.out_dir + "/grid.csv",
      wd::render_csv({"point", "kappa_hat", "measure", "tau_w", "tau_l", "tau_tie", "value",
                      "delta", "a_null", "a_alt", "power", "power_a_null_both", "power_tie_only",
                      "m_required", "power_emp", "type1_emp", "batches", "status", "error",
                      "seed", "config_hash"},
                     rows));
  std::cout << "wrote " << o.out_dir << "/grid.json, " << o.out_dir << "/grid.csv\n";
  if (ok_points == 0) return last_error_code;
  return any_bmax ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trial design for prioritized composite endpoints via win statistics"};
  app.require_subcommand(1);

  CommonOpts power_o, size_o, sim_o, cal_o, grid_o;
  long long sim_reps = 2000;
  bool sim_unsym = false;
  std::string grid_rho, grid_file;
  long long grid_emp_reps = 0;

  add_common(app.add_subcommand("power", "closed-form power at the configured m"), power_o);
  add_common(app.add_subcommand("samplesize", "smallest m reaching the target power"), size_o);
  CLI::App* sim = app.add_subcommand("simulate", "empirical power and type I error");
  add_common(sim, sim_o, /*wants_exact=*/false);
  sim->add_option("--reps", sim_reps, "trial replicates per hypothesis (default 2000)");
  sim->add_flag("--unsymmetrized-null", sim_unsym,
                "use the raw (direction-borrowing) variance in the test denominator");
  CLI::App* cal = app.add_subcommand("calibrate", "fit a latent correlation to concordance targets");
  add_common(cal, cal_o, /*wants_exact=*/false);
  CLI::App* grid = app.add_subcommand("grid", "sweep latent correlation points");
  add_common(grid, grid_o);
  grid->add_option("--rho", grid_rho, "comma list; sets every off-diagonal latent entry");
  grid->add_option("--grid-file", grid_file, "JSON array of full latent matrices");
  grid->add_option("--empirical-reps", grid_emp_reps,
                   "also simulate this many trial replicates per point");
  CLI::App* schema = app.add_subcommand("schema", "print the config JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (schema->parsed()) {
      std::cout << wd::scenario_schema_json();
      return 0;
    }
    if (app.get_subcommand("power")->parsed()) return cmd_power(power_o);
    if (app.get_subcommand("samplesize")->parsed()) return cmd_samplesize(size_o);
    if (sim->parsed()) return cmd_simulate(sim_o, sim_reps, sim_unsym);
    if (cal->parsed()) return cmd_calibrate(cal_o);
    if (grid->parsed()) return cmd_grid(grid_o, grid_rho, grid_file, grid_emp_reps);
  } catch (const wd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

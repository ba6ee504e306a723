#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "windesign/estimator.hpp"

using namespace windesign;

namespace {

ValidatedScenario small_scenario(int n_sp, int b_min, int b_max, double eps_tau = 1e9,
                                 double eps_xi = 1e9, int workers = 1) {
  ScenarioSpec s;
  EndpointSpec e1;
  e1.data_type = DataType::Continuous;
  e1.control_marginal = Normal{3, 10};
  e1.effect = MeanDifference{1, std::nullopt};
  e1.threshold = 8;
  s.endpoints.push_back(e1);
  EndpointSpec e2;
  e2.data_type = DataType::Continuous;
  e2.control_marginal = Normal{30, 15};
  e2.effect = MeanDifference{6, std::nullopt};
  e2.threshold = 6;
  s.endpoints.push_back(e2);
  Matrix r = Matrix::identity(2);
  r.at(0, 1) = r.at(1, 0) = 0.4;
  s.dependence = LatentCorrelation{r};
  s.design.m = 100;
  s.estimator.n_sp = n_sp;
  s.estimator.b_min = b_min;
  s.estimator.b_max = b_max;
  s.estimator.eps_tau = eps_tau;
  s.estimator.eps_xi = eps_xi;
  s.estimator.seed = 31;
  s.estimator.workers = workers;
  return validate_scenario(s);
}

}  // namespace

TEST_CASE("running averages match a two-pass mean and SE") {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> u(0, 1);
  RunningAverages avgs;
  std::vector<std::array<double, RunningAverages::kTotal>> rows;
  for (int b = 0; b < 37; ++b) {
    std::array<double, RunningAverages::kTotal> x{};
    for (auto& v : x) v = u(gen);
    rows.push_back(x);
    avgs.update(x);
  }
  CHECK(avgs.b == 37);
  for (int k = 0; k < RunningAverages::kTotal; ++k) {
    double mean = 0;
    for (const auto& rw : rows) mean += rw[k];
    mean /= rows.size();
    double ss = 0;
    for (const auto& rw : rows) ss += (rw[k] - mean) * (rw[k] - mean);
    const double se = std::sqrt(ss / (rows.size() - 1)) / std::sqrt(double(rows.size()));
    CHECK(avgs.mean[k] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(avgs.se(k) == doctest::Approx(se).epsilon(1e-10));
  }
}

TEST_CASE("stopping needs b_min and both SE thresholds") {
  EstimatorConfig cfg;
  cfg.b_min = 10;
  cfg.b_max = 100;
  cfg.eps_tau = 0.05;
  cfg.eps_xi = 0.05;
  RunningAverages avgs;
  std::array<double, RunningAverages::kTotal> lo{};  // constant rows -> zero SE
  for (int b = 0; b < 9; ++b) avgs.update(lo);
  CHECK_FALSE(check_stopping(avgs, cfg).stop);  // below b_min
  avgs.update(lo);
  CHECK(check_stopping(avgs, cfg).stop);

  // noisy tau blocks stopping even with quiet xi
  RunningAverages noisy;
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int b = 0; b < 50; ++b) {
    std::array<double, RunningAverages::kTotal> x{};
    x[0] = 2 * u(gen);  // tau_w under H0; SE ~ 0.08 across 50 draws
    noisy.update(x);
  }
  StoppingCheck chk = check_stopping(noisy, cfg);
  CHECK(chk.max_se_tau > cfg.eps_tau);
  CHECK_FALSE(chk.stop);
}

TEST_CASE("forss output shape and basic sanity") {
  ValidatedScenario v = small_scenario(120, 8, 8);
  ForssResult res = run_forss(v, v.spec.estimator);
  CHECK(res.diagnostics.b_final == 8);
  CHECK(res.diagnostics.status == RunStatus::Converged);  // eps thresholds are huge
  CHECK(res.pair_total == 8ll * 120 * 120);
  // probabilities form a distribution
  CHECK(res.alt_est.tau_w > 0);
  CHECK(res.alt_est.tau_l > 0);
  CHECK(res.alt_est.tau_w + res.alt_est.tau_l + res.alt_est.tau_tie ==
        doctest::Approx(1.0).epsilon(1e-12));
  // null arms are exchangeable: tau_w ~ tau_l, and the alternative favors wins
  CHECK(std::abs(res.null_est.tau_w - res.null_est.tau_l) < 0.05);
  CHECK(res.alt_est.tau_w > res.alt_est.tau_l);
  // averaged diagonals are clamped nonnegative
  CHECK(res.alt_est.xi.ww10 >= 0);
  CHECK(res.null_est.xi.ll01 >= 0);
  // level counts fold back to the win totals
  int64_t w = 0;
  for (int64_t x : res.level_wins_alt) w += x;
  CHECK(w / double(res.pair_total) == doctest::Approx(res.alt_est.tau_w).epsilon(1e-12));
  CHECK(res.diagnostics.workers == 1);
  CHECK((res.diagnostics.kernel == "scalar" || res.diagnostics.kernel == "avx2"));
}

TEST_CASE("b_max is reported when thresholds are unreachable") {
  ValidatedScenario v = small_scenario(50, 2, 5, 1e-12, 1e-12);
  ForssResult res = run_forss(v, v.spec.estimator);
  CHECK(res.diagnostics.status == RunStatus::BMaxReached);
  CHECK(res.diagnostics.b_final == 5);
  CHECK(res.diagnostics.max_se_tau > 1e-12);
}

TEST_CASE("worker count does not change any estimate") {
  ForssResult base = run_forss(small_scenario(60, 12, 12), small_scenario(60, 12, 12).spec.estimator);
  for (int workers : {2, 4}) {
    ValidatedScenario v = small_scenario(60, 12, 12, 1e9, 1e9, workers);
    ForssResult res = run_forss(v, v.spec.estimator);
    CHECK(res.diagnostics.workers == workers);
    CHECK(res.null_est.tau_w == base.null_est.tau_w);
    CHECK(res.null_est.xi.ww10 == base.null_est.xi.ww10);
    CHECK(res.null_est.xi.wl01 == base.null_est.xi.wl01);
    CHECK(res.alt_est.tau_w == base.alt_est.tau_w);
    CHECK(res.alt_est.tau_l == base.alt_est.tau_l);
    CHECK(res.alt_est.xi.ww01 == base.alt_est.xi.ww01);
    CHECK(res.alt_est.xi.ll10 == base.alt_est.xi.ll10);
    CHECK(res.level_wins_alt == base.level_wins_alt);
    CHECK(res.level_losses_null == base.level_losses_null);
    CHECK(res.diagnostics.b_final == base.diagnostics.b_final);
  }
}

TEST_CASE("adaptive stop is worker-invariant too") {
  // thresholds chosen so the loop stops somewhere between b_min and b_max
  auto mk = [&](int workers) {
    ValidatedScenario v = small_scenario(80, 4, 400, 5e-3, 1e9, workers);
    return run_forss(v, v.spec.estimator);
  };
  ForssResult a = mk(1);
  ForssResult b = mk(3);
  CHECK(a.diagnostics.b_final == b.diagnostics.b_final);
  CHECK(a.diagnostics.b_final > 4);
  CHECK(a.diagnostics.b_final < 400);
  CHECK(a.diagnostics.status == RunStatus::Converged);
  CHECK(a.alt_est.tau_w == b.alt_est.tau_w);
  CHECK(a.null_est.xi.ww10 == b.null_est.xi.ww10);
}

TEST_CASE("estimates converge to the analytic independent-normals value") {
  // two independent normal levels; win/loss probabilities have a closed form:
  // P(win at level 1) = P(T - C > 8), T-C ~ N(1, 200)
  ValidatedScenario v = [] {
    ScenarioSpec s;
    EndpointSpec e1;
    e1.data_type = DataType::Continuous;
    e1.control_marginal = Normal{3, 10};
    e1.effect = MeanDifference{1, std::nullopt};
    e1.threshold = 8;
    s.endpoints.push_back(e1);
    s.design.m = 100;
    s.estimator.n_sp = 300;
    s.estimator.b_min = 40;
    s.estimator.b_max = 40;
    s.estimator.seed = 7;
    return validate_scenario(s);
  }();
  ForssResult res = run_forss(v, v.spec.estimator);
  const double sd = std::sqrt(200.0);
  const double p_win = 1 - normal_cdf((8 - 1) / sd);
  const double p_loss = normal_cdf((-8 - 1) / sd);
  CHECK(res.alt_est.tau_w == doctest::Approx(p_win).epsilon(0.03));
  CHECK(res.alt_est.tau_l == doctest::Approx(p_loss).epsilon(0.03));
  CHECK(res.null_est.tau_w == doctest::Approx(1 - normal_cdf(8 / sd)).epsilon(0.05));
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "windesign/measures.hpp"

using namespace windesign;

namespace {

PluginEstimates plausible(double tw, double tl, double scale10 = 0.05, double scale01 = 0.04) {
  PluginEstimates e;
  e.tau_w = tw;
  e.tau_l = tl;
  e.tau_tie = 1 - tw - tl;
  e.xi.ww10 = scale10 * tw * (1 - tw);
  e.xi.ww01 = scale01 * tw * (1 - tw);
  e.xi.ww11 = tw - tw * tw;
  e.xi.ll10 = scale10 * tl * (1 - tl);
  e.xi.ll01 = scale01 * tl * (1 - tl);
  e.xi.ll11 = tl - tl * tl;
  e.xi.wl10 = -scale10 * tw * tl;
  e.xi.wl01 = -scale01 * tw * tl;
  e.xi.wl11 = -tw * tl;
  return e;
}

}  // namespace

TEST_CASE("measure values from the win/loss/tie split") {
  PluginEstimates e = plausible(0.5241, 0.3844);
  MeasureValues v = measure_values(e);
  CHECK(v.wr == doctest::Approx(0.5241 / 0.3844).epsilon(1e-12));
  CHECK(v.nb == doctest::Approx(0.5241 - 0.3844).epsilon(1e-12));
  const double half_tie = (1 - 0.5241 - 0.3844) / 2;
  CHECK(v.wo == doctest::Approx((0.5241 + half_tie) / (0.3844 + half_tie)).epsilon(1e-12));
  CHECK(v.door == doctest::Approx(0.5 * (1 + v.nb)).epsilon(1e-12));

  PluginEstimates zero_l = plausible(0.3, 0.0);
  CHECK_THROWS_AS(measure_values(zero_l), DegenerateError);
}

TEST_CASE("variance quantity algebra") {
  PluginEstimates e = plausible(0.52, 0.38);
  const double r = 1.5;
  const double sw = e.xi.ww10 + e.xi.ww01 / r;
  const double sl = e.xi.ll10 + e.xi.ll01 / r;
  const double swl = e.xi.wl10 + e.xi.wl01 / r;
  const double tw = e.tau_w, tl = e.tau_l;

  const double a_wr = sw / (tw * tw) + sl / (tl * tl) - 2 * swl / (tw * tl);
  CHECK(variance_quantity(Measure::WR, e, r) == doctest::Approx(a_wr).epsilon(1e-12));

  const double a_nb = sw + sl - 2 * swl;
  CHECK(variance_quantity(Measure::NB, e, r) == doctest::Approx(a_nb).epsilon(1e-12));

  const double nb = tw - tl;
  const double a_wo = 4 * a_nb / ((1 - nb * nb) * (1 - nb * nb));
  CHECK(variance_quantity(Measure::WO, e, r) == doctest::Approx(a_wo).epsilon(1e-12));

  // DOOR is exactly a quarter of NB (power-of-two scaling, so bit-exact)
  CHECK(variance_quantity(Measure::DOOR, e, r) == 0.25 * variance_quantity(Measure::NB, e, r));
}

TEST_CASE("effect size per measure") {
  PluginEstimates e = plausible(0.52, 0.38);
  CHECK(effect_delta(Measure::WR, e) == doctest::Approx(std::log(0.52 / 0.38)).epsilon(1e-12));
  CHECK(effect_delta(Measure::NB, e) == doctest::Approx(0.14).epsilon(1e-12));
  MeasureValues v = measure_values(e);
  CHECK(effect_delta(Measure::WO, e) == doctest::Approx(std::log(v.wo)).epsilon(1e-12));
  CHECK(effect_delta(Measure::DOOR, e) == 0.5 * effect_delta(Measure::NB, e));
  // deltas are magnitudes: a harmful direction flips sign inside
  PluginEstimates h = plausible(0.38, 0.52);
  CHECK(effect_delta(Measure::WR, h) == doctest::Approx(std::log(0.52 / 0.38)).epsilon(1e-12));
}

TEST_CASE("power and sample size invert each other") {
  PluginEstimates nul = plausible(0.45, 0.45);
  PluginEstimates alt = plausible(0.52, 0.38);
  for (Measure ms : {Measure::WR, Measure::NB, Measure::WO, Measure::DOOR}) {
    MeasureQuantities q = measure_quantities(ms, nul, alt, 1.0);
    for (double target : {0.8, 0.85, 0.9}) {
      const long long m = sample_size_closed_form(q, 0.05, target);
      // the returned m reaches the target, m-1 does not
      CHECK(power_closed_form(q, m, 0.05) >= target - 1e-12);
      if (m > 2) CHECK(power_closed_form(q, m - 1, 0.05) < target);
    }
  }
}

TEST_CASE("power formula reference value") {
  // hand-computed: delta=0.31, A0=AA=9.6, m=274, alpha=0.05
  MeasureQuantities q;
  q.delta = 0.31;
  q.a_null = 9.6;
  q.a_alt = 9.6;
  const double z = 1.959963984540054;
  const double want = 0.5 * std::erfc(-((-z + std::sqrt(274.0) * 0.31 / std::sqrt(9.6))) / std::sqrt(2.0));
  CHECK(power_closed_form(q, 274, 0.05) == doctest::Approx(want).epsilon(1e-12));
  // the second tail can only add probability, and less than alpha/2
  const double both = power_closed_form(q, 274, 0.05, true);
  CHECK(both >= power_closed_form(q, 274, 0.05));
  CHECK(both - power_closed_form(q, 274, 0.05) < 0.025);
}

TEST_CASE("power is monotone in m, delta, and alpha") {
  PluginEstimates nul = plausible(0.45, 0.45);
  PluginEstimates alt = plausible(0.52, 0.38);
  MeasureQuantities q = measure_quantities(Measure::WR, nul, alt, 1.0);
  double prev = 0;
  for (long long m : {50, 100, 200, 400, 800}) {
    const double p = power_closed_form(q, m, 0.05);
    CHECK(p > prev);
    prev = p;
  }
  MeasureQuantities q2 = q;
  q2.delta *= 1.2;
  CHECK(power_closed_form(q2, 200, 0.05) > power_closed_form(q, 200, 0.05));
  CHECK(power_closed_form(q, 200, 0.10) > power_closed_form(q, 200, 0.05));
}

TEST_CASE("door and nb give identical sample sizes, bit for bit") {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double tw = 0.3 + 0.4 * u(gen);
    const double tl = tw - 0.02 - 0.2 * u(gen);
    if (tl <= 0.01) continue;
    PluginEstimates alt = plausible(tw, tl);
    PluginEstimates nul = plausible((tw + tl) / 2, (tw + tl) / 2);
    const double r = 0.5 + 2 * u(gen);
    const double target = 0.55 + 0.44 * u(gen);
    const double alpha = 0.01 + 0.09 * u(gen);
    MeasureQuantities qn = measure_quantities(Measure::NB, nul, alt, r);
    MeasureQuantities qd = measure_quantities(Measure::DOOR, nul, alt, r);
    CHECK(qd.delta == 0.5 * qn.delta);
    CHECK(qd.a_null == 0.25 * qn.a_null);
    CHECK(qd.a_alt == 0.25 * qn.a_alt);
    CHECK(sample_size_closed_form(qd, alpha, target) ==
          sample_size_closed_form(qn, alpha, target));
    CHECK(power_closed_form(qd, 211, alpha) == power_closed_form(qn, 211, alpha));
  }
}

TEST_CASE("exact power approaches the closed form for large m") {
  PluginEstimates nul = plausible(0.45, 0.45);
  PluginEstimates alt = plausible(0.52, 0.38);
  for (Measure ms : {Measure::WR, Measure::NB, Measure::WO, Measure::DOOR}) {
    MeasureQuantities q = measure_quantities(ms, nul, alt, 1.0);
    const double closed = power_closed_form(q, 5000, 0.05);
    const double exact = power_exact(nul, alt, ms, 5000, 5000, 0.05);
    CHECK(exact == doctest::Approx(closed).epsilon(5e-3));
  }
}

TEST_CASE("exact sample size is the smallest m meeting the target") {
  PluginEstimates nul = plausible(0.45, 0.45);
  PluginEstimates alt = plausible(0.52, 0.38);
  for (Measure ms : {Measure::WR, Measure::NB}) {
    const long long m = sample_size_exact(nul, alt, ms, 1.0, 0.05, 0.85);
    CHECK(power_exact(nul, alt, ms, m, m, 0.05) >= 0.85);
    CHECK(power_exact(nul, alt, ms, m - 1, m - 1, 0.05) < 0.85);
    // and it lands near the closed form: the retained xi^11 term adds about
    // xi11/(m*(xi10+xi01)) in relative variance, ~30% here because these
    // synthetic plug-ins keep xi10/xi01 at 5% of xi11
    MeasureQuantities q = measure_quantities(ms, nul, alt, 1.0);
    const long long mc = sample_size_closed_form(q, 0.05, 0.85);
    CHECK(std::llabs(m - mc) <= std::max<long long>(3, mc / 3));
  }
}

TEST_CASE("tie-only variance quantities") {
  const double t = 0.0915, r = 1.0;
  CHECK(yu_ganju_variance(Measure::WR, t, r) ==
        doctest::Approx(4 * (1 + t) * (1 + r) / (3 * r * (1 - t))).epsilon(1e-12));
  CHECK(yu_ganju_variance(Measure::NB, t, r) ==
        doctest::Approx((1 + t) * (1 - t) * (1 + r) / (3 * r)).epsilon(1e-12));
  CHECK(std::isnan(yu_ganju_variance(Measure::WO, t, r)));
  CHECK(std::isnan(yu_ganju_variance(Measure::DOOR, t, r)));
}

TEST_CASE("sensitivity triplet wiring") {
  PluginEstimates nul = plausible(0.455, 0.455, 0.05, 0.05);
  PluginEstimates alt = plausible(0.5241, 0.3844, 0.05, 0.05);
  const long long m = 274;
  PowerTriplet trip = sensitivity_power_triplet(nul, alt, Measure::WR, m, 1.0, 0.05);
  MeasureQuantities q = measure_quantities(Measure::WR, nul, alt, 1.0);
  CHECK(trip.p_alt == power_closed_form(q, m, 0.05));
  // substituting A0 for AA:
  MeasureQuantities q0 = q;
  q0.a_alt = q.a_null;
  CHECK(trip.p_null == doctest::Approx(power_closed_form(q0, m, 0.05)).epsilon(1e-12));
  // tie-only quantity uses the alternative's tie mass in both slots
  MeasureQuantities qyg = q;
  qyg.a_null = qyg.a_alt = yu_ganju_variance(Measure::WR, alt.tau_tie, 1.0);
  CHECK(trip.p_yg == doctest::Approx(power_closed_form(qyg, m, 0.05)).epsilon(1e-12));
  PowerTriplet wo = sensitivity_power_triplet(nul, alt, Measure::WO, m, 1.0, 0.05);
  CHECK(std::isnan(wo.p_yg));
}

TEST_CASE("quantities reject invalid inputs") {
  PluginEstimates nul = plausible(0.45, 0.45);
  PluginEstimates alt = plausible(0.52, 0.38);
  MeasureQuantities q = measure_quantities(Measure::WR, nul, alt, 1.0);
  CHECK_THROWS_AS(sample_size_closed_form(q, 0.05, 0.5), ConfigError);
  CHECK_THROWS_AS(sample_size_closed_form(q, 0.05, 1.0), ConfigError);
  MeasureQuantities flat = q;
  flat.delta = 0.0;
  CHECK_THROWS_AS(sample_size_closed_form(flat, 0.05, 0.85), DegenerateError);
}

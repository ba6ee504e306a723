#include "windesign/measures.hpp"

#include <cmath>
#include <limits>

#include "windesign/mathutil.hpp"

namespace windesign {

MeasureValues measure_values(const PluginEstimates& est) {
  MeasureValues v;
  if (est.tau_l <= 0) throw DegenerateError("win ratio undefined: no losses observed");
  v.wr = est.tau_w / est.tau_l;
  v.nb = est.tau_w - est.tau_l;
  const double half_tie = est.tau_tie / 2.0;
  if (est.tau_l + half_tie <= 0) throw DegenerateError("win odds undefined: empty denominator");
  v.wo = (est.tau_w + half_tie) / (est.tau_l + half_tie);
  v.door = 0.5 * (1.0 + v.nb);
  return v;
}

double effect_delta(Measure measure, const PluginEstimates& alt) {
  switch (measure) {
    case Measure::WR: {
      if (alt.tau_w <= 0 || alt.tau_l <= 0)
        throw DegenerateError("log win ratio undefined at a zero win or loss probability");
      return std::fabs(std::log(alt.tau_w / alt.tau_l));
    }
    case Measure::NB:
      return std::fabs(alt.tau_w - alt.tau_l);
    case Measure::WO: {
      MeasureValues v = measure_values(alt);
      if (v.wo <= 0) throw DegenerateError("log win odds undefined");
      return std::fabs(std::log(v.wo));
    }
    case Measure::DOOR:
      return effect_delta(Measure::NB, alt) / 2.0;
  }
  return 0;
}

double variance_quantity(Measure measure, const PluginEstimates& est, double r) {
  const double sw = est.xi.ww10 + est.xi.ww01 / r;
  const double sl = est.xi.ll10 + est.xi.ll01 / r;
  const double swl = est.xi.wl10 + est.xi.wl01 / r;
  switch (measure) {
    case Measure::WR: {
      if (est.tau_w <= 0 || est.tau_l <= 0)
        throw DegenerateError("win ratio variance undefined at a zero win or loss probability");
      return sw / (est.tau_w * est.tau_w) + sl / (est.tau_l * est.tau_l) -
             2.0 * swl / (est.tau_w * est.tau_l);
    }
    case Measure::NB:
      return sw + sl - 2.0 * swl;
    case Measure::WO: {
      const double nb = est.tau_w - est.tau_l;
      const double den = 1.0 - nb * nb;
      if (den <= 0) throw DegenerateError("win odds variance undefined: |net benefit| at 1");
      return 4.0 * variance_quantity(Measure::NB, est, r) / (den * den);
    }
    case Measure::DOOR:
      return variance_quantity(Measure::NB, est, r) / 4.0;
  }
  return 0;
}

MeasureQuantities measure_quantities(Measure measure, const PluginEstimates& null_est,
                                     const PluginEstimates& alt_est, double r) {
  MeasureQuantities q;
  q.measure = measure;
  q.delta = effect_delta(measure, alt_est);
  q.a_null = variance_quantity(measure, null_est, r);
  q.a_alt = variance_quantity(measure, alt_est, r);
  return q;
}

double power_closed_form(const MeasureQuantities& q, long long m, double alpha,
                         bool include_second_tail) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must be in (0,1)");
  if (m < 2) throw ConfigError("m must be >= 2");
  if (!(q.a_alt > 0)) throw DegenerateError("alternative variance quantity must be > 0");
  const double z = inverse_normal_cdf(1.0 - alpha / 2.0);
  const double root_m = std::sqrt(static_cast<double>(m));
  const double s0 = std::sqrt(q.a_null), sa = std::sqrt(q.a_alt);
  double p = normal_cdf((-z * s0 + root_m * q.delta) / sa);
  if (include_second_tail) p += normal_cdf((-z * s0 - root_m * q.delta) / sa);
  return p;
}

long long sample_size_closed_form(const MeasureQuantities& q, double alpha, double target_power) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must be in (0,1)");
  if (!(target_power > 0.5 && target_power < 1))
    throw ConfigError("target power must be in (0.5, 1)");
  if (!(q.delta > 0)) throw DegenerateError("sample size undefined: effect size is zero");
  const double z = inverse_normal_cdf(1.0 - alpha / 2.0);
  const double zb = inverse_normal_cdf(target_power);
  const double num = z * std::sqrt(q.a_null) + zb * std::sqrt(q.a_alt);
  const double m = std::ceil(num * num / (q.delta * q.delta));
  return std::max<long long>(2, static_cast<long long>(m));
}

namespace {

double measure_scale_variance(Measure measure, const PluginEstimates& est,
                              const VarianceComponents& v) {
  const double var_nb = v.var_uw + v.var_ul - 2.0 * v.cov_wl;
  switch (measure) {
    case Measure::WR:
      if (est.tau_w <= 0 || est.tau_l <= 0)
        throw DegenerateError("win ratio variance undefined at a zero win or loss probability");
      return v.var_uw / (est.tau_w * est.tau_w) + v.var_ul / (est.tau_l * est.tau_l) -
             2.0 * v.cov_wl / (est.tau_w * est.tau_l);
    case Measure::NB:
      return var_nb;
    case Measure::WO: {
      const double nb = est.tau_w - est.tau_l;
      const double den = 1.0 - nb * nb;
      if (den <= 0) throw DegenerateError("win odds variance undefined: |net benefit| at 1");
      return 4.0 * var_nb / (den * den);
    }
    case Measure::DOOR:
      return var_nb / 4.0;
  }
  return 0;
}

}  // namespace

double power_exact(const PluginEstimates& null_est, const PluginEstimates& alt_est, Measure measure,
                   long long m, long long n, double alpha, bool include_second_tail) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must be in (0,1)");
  if (m < 2 || n < 2) throw ConfigError("m and n must be >= 2");
  const double v0 = measure_scale_variance(measure, null_est, exact_variance(null_est, m, n));
  const double va = measure_scale_variance(measure, alt_est, exact_variance(alt_est, m, n));
  if (!(va > 0)) throw DegenerateError("alternative variance must be > 0");
  const double z = inverse_normal_cdf(1.0 - alpha / 2.0);
  const double delta = effect_delta(measure, alt_est);
  const double s0 = std::sqrt(v0 > 0 ? v0 : 0.0), sa = std::sqrt(va);
  double p = normal_cdf((-z * s0 + delta) / sa);
  if (include_second_tail) p += normal_cdf((-z * s0 - delta) / sa);
  return p;
}

long long sample_size_exact(const PluginEstimates& null_est, const PluginEstimates& alt_est,
                            Measure measure, double r, double alpha, double target_power) {
  if (!(target_power > 0.5 && target_power < 1))
    throw ConfigError("target power must be in (0.5, 1)");
  auto n_of = [r](long long m) {
    return std::max<long long>(2, static_cast<long long>(std::llround(r * static_cast<double>(m))));
  };
  auto enough = [&](long long m) {
    return power_exact(null_est, alt_est, measure, m, n_of(m), alpha) >= target_power;
  };
  long long lo = 2, hi = 100000000;
  if (!enough(hi)) throw ConvergenceError("target power unreachable below m = 1e8");
  if (enough(lo)) return lo;
  while (lo + 1 < hi) {
    long long mid = lo + (hi - lo) / 2;
    (enough(mid) ? hi : lo) = mid;
  }
  return hi;
}

double yu_ganju_variance(Measure measure, double tau_tie_alt, double r) {
  const double t = tau_tie_alt;
  if (!(t >= 0 && t < 1)) throw DegenerateError("tie probability must be in [0,1)");
  switch (measure) {
    case Measure::WR:
      return 4.0 * (1.0 + t) * (1.0 + r) / (3.0 * r * (1.0 - t));
    case Measure::NB:
      return (1.0 + t) * (1.0 - t) * (1.0 + r) / (3.0 * r);
    default:
      return std::numeric_limits<double>::quiet_NaN();
  }
}

PowerTriplet sensitivity_power_triplet(const PluginEstimates& null_est,
                                       const PluginEstimates& alt_est, Measure measure, long long m,
                                       double r, double alpha) {
  MeasureQuantities q = measure_quantities(measure, null_est, alt_est, r);
  const double z = inverse_normal_cdf(1.0 - alpha / 2.0);
  const double root_m = std::sqrt(static_cast<double>(m));
  PowerTriplet t;
  t.p_alt = power_closed_form(q, m, alpha);
  t.p_null = normal_cdf(-z + root_m * q.delta / std::sqrt(q.a_null));
  const double a_yg = yu_ganju_variance(measure, alt_est.tau_tie, r);
  t.p_yg = std::isnan(a_yg) ? a_yg : normal_cdf(-z + root_m * q.delta / std::sqrt(a_yg));
  return t;
}

}  // namespace windesign

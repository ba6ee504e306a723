#pragma once

#include <cstdint>
#include <vector>

#include "windesign/concordance.hpp"
#include "windesign/sampler.hpp"

namespace windesign {

// Closed form linking a latent Gaussian pairwise correlation to the Kendall
// concordance of two continuous margins: kappa = (2/pi) asin(rho).
double gaussian_rho_to_kappa(double rho);
double gaussian_kappa_to_rho(double kappa);

// How a coordinate pair's concordance is measured on sampled data.
enum class PairMethod {
  Kendall,       // both coordinates fully observed
  HarrellRow,    // first coordinate censored
  HarrellCol,    // second coordinate censored
  HarrellBoth,   // both censored
  ClosedForm,    // two continuous margins: no sampling needed
};

// Which estimator applies to endpoint pair (a, b) of the scenario.
PairMethod pair_method(const ValidatedScenario& scenario, int a, int b);

struct ConcordanceSummary {
  Matrix k;                        // entrywise concordance estimate
  std::vector<double> se;          // per off-diagonal entry (row-major upper), 0 for closed form
  int batches = 0;
};

// Monte-Carlo concordance implied by a latent correlation matrix: draws
// treatment-arm samples (both arms interleaved when pooled_arms) in batches
// of settings.n_cal until every sampled entry's batch-mean SE falls under
// tol/3 (bounded by min/max batches). Same seed => same draws regardless of
// the latent matrix (common random numbers), which keeps the calibration
// search surface smooth.
ConcordanceSummary implied_concordance(const Matrix& latent, const ValidatedScenario& scenario,
                                       const CalibrationSettings& settings, uint64_t seed);

struct CalibrationResult {
  Matrix r_cal;                  // calibrated latent correlation
  Matrix k_sim;                  // concordance simulated at r_cal
  std::vector<double> entry_se;  // SEs of k_sim off-diagonals
  double d_max = 0;              // max |k_sim - k_target| over off-diagonals
  int cycles = 0;
  bool converged = false;
};

// Entrywise bisection on the latent scale against target concordances.
// Pairwise copula margins depend only on their own latent entry, so
// coordinates decouple; each cycle sweeps all off-diagonal entries, and the
// sweep repeats until d_max <= settings.tol or max_cycles. Candidate entries
// that break positive definiteness are pulled back toward the last feasible
// iterate. Throws ConvergenceError if max_cycles is exhausted.
CalibrationResult calibrate(const Matrix& k_target, const ValidatedScenario& scenario,
                            const CalibrationSettings& settings, uint64_t seed);

}  // namespace windesign

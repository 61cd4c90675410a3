#pragma once

#include <string>
#include <vector>

#include "mmce/em.hpp"
#include "mmce/gamp.hpp"
#include "mmce/types.hpp"

namespace mmce {

/// ||x_hat - x||^2 / ||x||^2.
double nmse(const Vec& x_hat, const Vec& x_true);

struct WaterfillResult {
  Vec powers;        // per-stream allocation, sums to the budget
  double level = 0;  // common water level of the active set
  int active_streams = 0;
};

/// Water-filling over parallel channels with gains sigma_m (singular values,
/// sorted descending): P_m = max(0, level - noise_var / sigma_m^2) with the
/// level chosen so the powers sum to total_power.
WaterfillResult waterfill(const Vec& singular_values, double noise_var,
                          double total_power);

struct RateReport {
  Vec powers;
  Vec sinr;
  double rate_bits = 0.0;  // sum log2(1 + SINR_m)
  int active_streams = 0;
};

/// SVD-precoded achievable-rate lower bound: precoders/combiners from the
/// SVD of h_hat, water-filled powers, per-stream SINR against the true
/// channel with inter-stream interference from CSI error. Noise per complex
/// dimension is 2 sigma2_w.
RateReport rate_lower_bound(const CMat& h_true, const CMat& h_hat,
                            double sigma2_w, double total_power = 1.0);

struct Scenario {
  Index m_t = 64;
  Index m_r = 64;
  Index k = 128;
  int clusters = 4;
  int subpaths = 10;
  double spread_deg = 3.5;
  double snr_db = 10.0;
  GampConfig gamp;
  EmConfig em;
  double lmmse_prior_var = 0.5;  // white prior per real component
  double gaussian_prior_var = 0.5;
  bool rate_eval = false;
  double total_power = 1.0;

  double sigma2_w() const;  // from snr_db via SNR = 1 / (2 sigma_w^2)
};

struct TrialRecord {
  int trial = 0;
  std::string estimator;
  double snr_db = 0.0;
  Index k = 0;
  double nmse = 0.0;
  int iterations = 0;
  bool converged = false;
  double rate_bits = 0.0;
  double b_hat = 0.0;
  double sigma2_hat = 0.0;
  double wall_ms = 0.0;
};

inline constexpr const char* kEstimatorNames[] = {
    "gamp_laplace", "gamp_gaussian", "ls", "lmmse", "perfect_csi"};

bool is_known_estimator(const std::string& name);

/// Deterministic per-trial seed stream derived from the master seed.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial);

/// Runs n_trials independent realizations; within a trial every estimator
/// sees the identical (y, A). Trials are distributed over `threads` workers
/// (0 = hardware concurrency); results are identical for any thread count.
/// Estimator failures are recorded with converged = false, never thrown.
std::vector<TrialRecord> run_monte_carlo(const Scenario& scenario,
                                         const std::vector<std::string>& estimators,
                                         int n_trials,
                                         std::uint64_t master_seed,
                                         int threads = 1);

struct AggregateRow {
  std::string estimator;
  double snr_db = 0.0;
  Index k = 0;
  int trials = 0;
  double mean_nmse = 0.0;  // linear scale
  double std_nmse = 0.0;
  double mean_iterations = 0.0;
  double converged_fraction = 0.0;
  double mean_rate_bits = 0.0;
  double mean_wall_ms = 0.0;
};

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records);

}  // namespace mmce

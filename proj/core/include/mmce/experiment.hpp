#pragma once

#include <string>
#include <vector>

#include "mmce/evaluate.hpp"

namespace mmce {

/// Full experiment description: a desk of Monte-Carlo runs swept over the
/// SNR grid and observation-window sizes K.
struct ExperimentConfig {
  Index m_t = 64;
  Index m_r = 64;
  std::vector<Index> k_list = {128};
  std::vector<double> snr_db = {-5, 0, 5, 10, 15, 20};
  int clusters = 4;
  int subpaths = 10;
  double spread_deg = 3.5;
  std::vector<std::string> estimators = {"gamp_laplace"};
  int n_trials = 500;
  std::uint64_t master_seed = 1;
  GampConfig gamp;
  EmConfig em;
  double lmmse_prior_var = 0.5;
  double gaussian_prior_var = 0.5;
  bool rate_eval = false;
  double total_power = 1.0;
  int threads = 0;  // 0 = hardware concurrency
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a JSON config; omitted fields take the defaults above. Throws
/// std::runtime_error with the offending field path on schema or invariant
/// violations.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);

struct ExperimentOutput {
  std::string trials_csv;
  std::string aggregate_csv;
  std::string manifest_json;
  std::vector<TrialRecord> records;
};

/// Runs the experiment and writes trials.csv, aggregate.csv, and
/// manifest.json under config.output_dir. The per-trial CSV is byte-stable
/// for a fixed config and seed; wall-clock timings therefore appear only in
/// the aggregate CSV.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Per-trial CSV body (with header), used by run_experiment and tests.
std::string trials_to_csv(const std::vector<TrialRecord>& records);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);

/// Locale-independent shortest-exact formatting (17 significant digits).
std::string format_real(double v);

}  // namespace mmce

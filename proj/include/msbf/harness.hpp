// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo experiment runner: configuration, trial fan-out, CSV and JSON
// summary output.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msbf/ao.hpp"

namespace msbf {

enum class Experiment { kConvergence, kRegionSweep, kPowerSweep, kSingle };
enum class EvalChannel { kHybrid, kExact, kBoth };

struct ExperimentConfig {
  Experiment experiment = Experiment::kSingle;
  double carrier_frequency_hz = 30e9;
  int M = 16;
  int N = 4;
  int K = 16;
  int Np = 6;
  double A_over_lambda = 20.0;
  std::vector<double> region_sweep{10.0, 20.0, 30.0, 40.0};  // A / lambda
  std::vector<double> power_sweep_dbm{0.0, 10.0, 20.0, 30.0};
  double P_dbm = 10.0;
  double noise_dbm = -80.0;
  double rho = 30.0;
  double tau0 = 0.1;
  double eps1 = 1e-3;
  double eps2 = 1e-3;
  double eps3 = 1e-3;
  int max_iter = 200;
  int trials = 1000;
  std::uint64_t base_seed = 1;
  std::vector<Scheme> schemes{Scheme::kProposed, Scheme::kSparseUpa, Scheme::kDenseUpa};
  std::string output = "results.csv";
  std::string summary_output;  // empty: derived from `output`
  EvalChannel eval_channel = EvalChannel::kHybrid;
  int workers = 0;  // 0: hardware concurrency
  double exhaustive_grid_step_lambda = 0.01;
  long exhaustive_max_points = 250000;
  int admm_max_iter = 300;
  QuadraticWeight analog_weight = QuadraticWeight::kSurrogate;
  StepRule step_rule = StepRule::kUnitDirection;
  bool relative_stop = false;
  bool monotone_guard = true;
  bool record_wall_time = false;

  [[nodiscard]] double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }
  /// A / lambda values this experiment visits.
  [[nodiscard]] std::vector<double> aperture_points() const;
  [[nodiscard]] std::vector<double> power_points_dbm() const;
  [[nodiscard]] std::string summary_path() const;
  /// Throws ConfigError naming the offending key.
  void validate() const;
  [[nodiscard]] AOConfig ao_config(Scheme scheme, double p_dbm) const;
  [[nodiscard]] ScenarioConfig scenario_config() const;
};

/// Full-scale defaults ("full") or the minutes-scale preset ("desk").
ExperimentConfig preset(const std::string& name);

/// Applies one key = value assignment. Throws ConfigError on unknown keys or
/// malformed values; the message names the key.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Parses flat "key = value" text; '#' starts a comment. A "preset" key, if
/// present, must come first and resets the defaults.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Canonical key = value dump of every field.
std::string format_config(const ExperimentConfig& config);

std::string experiment_name(Experiment e);

struct ResultRow {
  std::string experiment;
  std::string scheme;
  int trial = 0;
  std::uint64_t seed = 0;
  double sweep_value = 0.0;
  int iteration = 0;
  double sum_rate = 0.0;
  std::optional<double> sum_rate_exact;
  std::optional<double> wall_ms;
};

struct SummaryPoint {
  double sweep_value = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double mean_strict = 0.0;  // unit-modulus re-evaluation
  std::optional<double> mean_exact;
  int count = 0;
};

struct ExperimentResult {
  std::string experiment;
  int trials = 0;
  std::vector<ResultRow> rows;  // sorted by (sweep point, scheme, trial, iteration)
  std::map<std::string, std::vector<SummaryPoint>> summary;
  /// Mean sum-rate per iteration (runs that stopped early carry their last
  /// value forward); filled for convergence experiments.
  std::map<std::string, std::vector<double>> mean_trace;
  std::vector<std::uint64_t> scenario_digests;  // per trial
  int admm_soft_stops = 0;
};

/// Runs every (trial, sweep point, scheme) combination. Trial t uses seed
/// base_seed + t for both the scenario and the initial beamformers, so all
/// schemes and sweep points in a trial see the same users.
ExperimentResult run_experiment(const ExperimentConfig& config);

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::string summary_json(const ExperimentResult& result);
void write_summary(const ExperimentResult& result, const std::string& path);

inline constexpr const char* kCsvHeader =
    "experiment,scheme,trial,seed,sweep_value,iteration,sum_rate,sum_rate_exact,wall_ms";

}  // namespace msbf

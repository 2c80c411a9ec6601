#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtmusic/estimators.hpp"
#include "mtmusic/order.hpp"
#include "mtmusic/scenario.hpp"
#include "mtmusic/subspace.hpp"

namespace mtmusic {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::size_t kDefaultTrials = 200;
inline constexpr std::size_t kPaperTrials = 10000;

struct ScenarioSpec {
  std::string name = "inline";
  UlaGeometry geometry;
  SourceConfig sources;
  NoiseConfig noise;
  std::vector<double> gsnr_grid_db;
  std::vector<std::size_t> n_grid;
  std::size_t trials = kDefaultTrials;
  std::uint64_t master_seed = 1;
  /// GSNR at which snapshot sweeps are run for this scenario, when known.
  std::optional<double> threshold_gsnr_db;
};

struct BenchConfig {
  ScenarioSpec scenario;
  std::vector<std::string> estimators;
  double grid_step_deg = kDefaultGridStepDeg;
  std::optional<SmoothingConfig> smoothing;
  TauSelection tau_selection;
  std::string outputs = "out";
  /// Trial-level worker threads; 0 means the OpenMP default.
  int workers = 1;

  void validate() const;
};

struct BenchRow {
  std::string estimator;
  double gsnr_db = 0.0;
  std::size_t n_snapshots = 0;
  double avg_rmse_deg = 0.0;
  double order_error_rate = 0.0;
  double mean_tau = 0.0;
  double mean_iterations = 0.0;
  std::size_t excluded = 0;
  std::size_t trials = 0;

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

inline constexpr const char* kBenchCsvHeader =
    "estimator,gsnr_db,n,avg_rmse_deg,order_error_rate,mean_tau,mean_iterations,excluded,trials";

/// Names accepted by preset_config / the "scenario" field.
std::vector<std::string> preset_names();

/// Full config for a named preset (all estimators, desk-scale defaults).
/// Throws UnknownPreset.
BenchConfig preset_config(const std::string& name);

/// Parses and validates a JSON config document. Throws SchemaError,
/// UnknownEstimator or UnknownPreset.
BenchConfig parse_config_text(const std::string& json_text);
BenchConfig parse_config(const std::string& path);

/// 10^4 trials and the 0.0018 degree grid.
void apply_paper_fidelity(BenchConfig& cfg);

/// Seed of one trial in the sweep; distinct for every (cell, trial) pair.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t global_trial);

/// Outcome of one trial for one estimator.
struct TrialOutcome {
  bool doa_ok = false;
  std::vector<double> squared_errors;
  bool order_ok = false;
  bool order_correct = false;
  double tau = 0.0;
  double iterations = 0.0;
};

/// Runs the per-trial pipeline for one batch and one estimator.
TrialOutcome run_trial(const BenchConfig& cfg, const SnapshotBatch& batch,
                       const std::string& estimator);

BenchReport run_bench(const BenchConfig& cfg);

std::string report_to_csv(const BenchReport& report);
BenchReport report_from_csv(const std::string& csv);

enum class PlotMetric { Rmse, OrderError };

/// Standalone SVG line chart, one series per estimator. Throws EmptyReport.
std::string render_plot(const BenchReport& report, PlotMetric metric);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace mtmusic

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scorebo/acquisition.hpp"
#include "scorebo/benchmarks.hpp"
#include "scorebo/hyper_posterior.hpp"

namespace scorebo {

enum class Inference { MCMC, MAP };

struct ExperimentConfig {
  std::string label = "run";
  std::string task = "Branin";
  Suite suite = Suite::BO;
  std::optional<double> noise_std;
  std::uint64_t task_seed = 0;  // GP-sample tasks only
  KernelKind kernel = KernelKind::Matern52;

  AcquisitionSpec acquisition;
  PriorKind prior = PriorKind::LogNormalWide;
  Inference inference = Inference::MCMC;
  MCMCConfig mcmc;
  /// Warmup length for refits that start from the previous chain; 0 keeps mcmc.warmup.
  std::size_t warm_start_warmup = 0;
  int map_restarts = 4;

  std::vector<std::uint64_t> seeds{0};
  int budget = 0;          // 0: 25 (D + 3)
  int initial_design = 0;  // 0: max(6, 2D)
  int validation_size = 1000;
  bool record_wall_time = false;
  int workers = 1;
  std::string output_dir = "results";

  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Accepts either a config document or a run manifest (uses its "config" entry).
ExperimentConfig load_config(const std::filesystem::path& file);

Task build_task(const ExperimentConfig& cfg);
int resolved_budget(const ExperimentConfig& cfg, Eigen::Index dim);
int resolved_initial_design(const ExperimentConfig& cfg, Eigen::Index dim);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::filesystem::path csv;
  double wall_time_s = 0;
};

struct RunSummary {
  std::vector<SeedOutcome> seeds;
  std::filesystem::path manifest;
  bool all_ok() const;
};

/// One seed of the loop; returns the CSV text.
std::string run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

/// All seeds (in parallel worker slots), one CSV per seed plus a manifest.
RunSummary run_experiment(const ExperimentConfig& cfg);

/// One SVG per call with per-method mean and standard-error band, methods
/// grouped by the CSV name prefix before "_seed".
std::filesystem::path emit_plots(const std::filesystem::path& result_dir, const std::string& metric);

/// Preset experiments for the active-learning or optimization suites.
std::vector<ExperimentConfig> suite_presets(Suite suite);

std::string version_string();

}  // namespace scorebo

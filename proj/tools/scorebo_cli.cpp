#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "scorebo/harness.hpp"

namespace fs = std::filesystem;
using namespace scorebo;

namespace {

int report(const RunSummary& s) {
  for (const auto& o : s.seeds) {
    if (o.ok)
      std::cout << "seed " << o.seed << ": ok -> " << o.csv.string() << "\n";
    else
      std::cout << "seed " << o.seed << ": FAILED: " << o.error << "\n";
  }
  std::cout << "manifest: " << s.manifest.string() << "\n";
  return s.all_ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fully Bayesian GP active learning and optimization runner"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a config or manifest JSON");
  std::string config_path, out_dir;
  std::vector<std::uint64_t> seeds;
  int workers = 0;
  run->add_option("--config", config_path, "Config or manifest file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seeds, "Seed(s), replacing the configured list");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--workers", workers, "Parallel seed slots");

  auto* bench = app.add_subcommand("bench", "Run a preset suite");
  std::string suite = "bo";
  int bench_seeds = 0, bench_budget = 0;
  bool dry_run = false;
  bench->add_option("--suite", suite, "al or bo")->check(CLI::IsMember({"al", "bo"}));
  bench->add_option("--seeds", bench_seeds, "Number of seeds per method (default 25)");
  bench->add_option("--budget", bench_budget, "Iterations (default 25 (D + 3))");
  bench->add_option("--out", out_dir, "Output root");
  bench->add_option("--workers", workers, "Parallel seed slots");
  bench->add_flag("--dry-run", dry_run, "Only write the preset configs");

  auto* plot = app.add_subcommand("plot", "Render mean and standard-error curves to SVG");
  std::string plot_dir, metric;
  plot->add_option("--dir", plot_dir, "Directory of result CSVs")->required()->check(CLI::ExistingDirectory);
  plot->add_option("--metric", metric, "Column to plot")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(config_path);
      if (!seeds.empty()) cfg.seeds = seeds;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (workers > 0) cfg.workers = workers;
      return report(run_experiment(cfg));
    }
    if (*bench) {
      int code = 0;
      for (ExperimentConfig cfg : suite_presets(suite == "al" ? Suite::AL : Suite::BO)) {
        if (bench_seeds > 0) {
          cfg.seeds.clear();
          for (int s = 0; s < bench_seeds; ++s) cfg.seeds.push_back(std::uint64_t(s));
        }
        if (bench_budget > 0) cfg.budget = bench_budget;
        if (!out_dir.empty()) cfg.output_dir = (fs::path(out_dir) / fs::path(cfg.output_dir).filename()).string();
        if (workers > 0) cfg.workers = workers;
        fs::create_directories(cfg.output_dir);
        const fs::path cfg_file = fs::path(cfg.output_dir) / (cfg.label + ".json");
        std::ofstream(cfg_file) << to_json(cfg).dump(2) << "\n";
        std::cout << "config: " << cfg_file.string() << "\n";
        if (!dry_run) code = std::max(code, report(run_experiment(cfg)));
      }
      return code;
    }
    if (*plot) {
      std::cout << emit_plots(plot_dir, metric).string() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

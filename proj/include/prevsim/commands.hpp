#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "prevsim/config.hpp"
#include "prevsim/roc.hpp"

namespace prevsim {

/// Reads a predictions file with header columns `score` and `label` (0/1).
ScoredPredictions load_predictions(const std::filesystem::path& path);

/// Metric report for one set of predictions: header `metric,value,status`,
/// one row per threshold metric at `threshold`, then AUC.
std::string metrics_report(const ScoredPredictions& sp, double threshold,
                           const std::vector<double>& betas, const MetricOptions& options = {});

void cmd_metrics(const std::filesystem::path& predictions, double threshold,
                 const std::vector<double>& betas, std::ostream& out);

struct SweepOutputs {
  std::vector<std::filesystem::path> files;
  std::size_t scenarios = 0;
  std::size_t records = 0;
};

/// Runs the sweep described by `cfg` and writes records.csv, ranks.csv,
/// rank_variance.csv, threshold_series.csv (FullGrid only), ols.csv,
/// tests.csv, correlations.csv, summary.json and manifest.json into
/// cfg.output_dir. Every file is written atomically.
SweepOutputs cmd_sweep(const RunConfig& cfg);

/// Writes a synthetic dataset CSV with label column "label" (1 positive).
void cmd_synth(std::size_t n, std::size_t features, double prevalence, double separation,
               Seed seed, const std::filesystem::path& out);

}  // namespace prevsim

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prevsim/dataset.hpp"
#include "prevsim/metrics.hpp"
#include "prevsim/models.hpp"
#include "prevsim/roc.hpp"

namespace prevsim {

enum class ThresholdMode { CutoffOnly, FullGrid };

inline constexpr double kCutoff = 0.5;
inline constexpr std::uint64_t kDefaultSeed = 20230611;

struct SweepConfig {
  std::size_t step = 30;
  std::size_t max_down = 76;
  std::size_t max_up = 79;
  double stop_tpr_low = 0.01;
  double stop_tnr_low = 0.01;
  double test_fraction = 0.2;
  std::size_t cv_folds = 10;
  std::vector<ModelSpec> models = default_model_specs();
  std::vector<double> betas{0.5, 2.0};
  Seed seed{kDefaultSeed};
  ThresholdMode threshold_mode = ThresholdMode::CutoffOnly;
  /// Model whose test TPR/TNR drives the early stop; nullopt disables it.
  std::optional<ModelKind> champion = ModelKind::GradientBoosting;
  MetricOptions metric_options{};
  /// Worker threads for iteration evaluation; 0 means hardware concurrency.
  std::size_t workers = 0;

  void validate() const;
};

/// Iteration index: negative in the prevalence-reducing phase, 0 for the
/// original data, positive in the increasing phase.
struct ChainEntry {
  int iteration = 0;
  Dataset data;
};

struct PhaseSummary {
  std::size_t requested = 0;
  std::size_t completed = 0;
  std::string stop_reason;
};

struct DatasetChain {
  std::vector<ChainEntry> entries;  // ascending iteration
  PhaseSummary down;
  PhaseSummary up;
};

/// Builds the constant-n chain. Each step is swap_step applied to the
/// predecessor with seed derive_seed(cfg.seed, iteration). A phase ends early
/// (with a recorded reason) when the shrinking class cannot supply a step.
DatasetChain dataset_chain(const Dataset& ds, const SweepConfig& cfg);

struct ModelEvaluation {
  ModelKind model = ModelKind::LogisticRegression;
  HyperParams chosen{};
  double auc = 0.0;
  ConfusionMatrix at_cutoff{};
  /// Evaluation thresholds in descending order; {0.5} in CutoffOnly mode,
  /// otherwise {0.5} united with thresholds(test scores).
  std::vector<double> grid_thresholds;
  std::vector<ConfusionMatrix> grid;
};

struct ScenarioResult {
  int iteration = 0;
  std::size_t n = 0;
  std::size_t positives = 0;
  double test_prevalence = 0.0;
  std::vector<ModelEvaluation> models;
};

struct SweepResult {
  std::vector<ScenarioResult> scenarios;  // ascending iteration
  PhaseSummary down;
  PhaseSummary up;
  std::vector<double> betas;
  MetricOptions metric_options{};
};

/// One observation. threshold is empty for AUC ("ALL").
struct EvalRecord {
  int iteration = 0;
  double test_prevalence = 0.0;
  ModelKind model = ModelKind::LogisticRegression;
  MetricId metric = MetricKind::AUC;
  std::optional<double> threshold;
  double value = 0.0;
};

/// Scores one scenario: split, train every model, score the test set.
ScenarioResult evaluate_scenario(int iteration, const Dataset& ds, const SweepConfig& cfg);

SweepResult run_sweep(const Dataset& ds, const SweepConfig& cfg);

/// Emits records in a fixed order: iteration, then model (config order), then
/// AUC, then each grid threshold (descending) with every threshold metric.
void for_each_record(const SweepResult& result, const std::function<void(const EvalRecord&)>& sink);
std::vector<EvalRecord> records(const SweepResult& result);

}  // namespace prevsim

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prevsim/metrics.hpp"
#include "prevsim/models.hpp"
#include "prevsim/ols.hpp"
#include "prevsim/stats_tests.hpp"
#include "prevsim/sweep.hpp"

namespace prevsim {

/// Fractional ranks: the best value gets 1 and tied values share the mean of
/// the positions they span. +inf counts as the best possible HigherIsBetter
/// value. NaN entries are left unranked (NaN in the output) and the remaining
/// entries are ranked among themselves.
std::vector<double> fractional_ranks(std::span<const double> values, Orientation orientation);

/// Ranks models by one metric. Models whose value is NaN are dropped.
std::map<ModelKind, double> rank_models(const std::map<ModelKind, double>& values,
                                        Orientation orientation);

struct RankEntry {
  int iteration = 0;
  double test_prevalence = 0.0;
  MetricId metric = MetricKind::AUC;
  ModelKind model = ModelKind::LogisticRegression;
  double rank = 0.0;
};

/// Ranks per (iteration, metric) over the cutoff (0.5) and AUC records.
std::vector<RankEntry> rank_table(std::span<const EvalRecord> records);

struct VarianceEntry {
  MetricId metric = MetricKind::AUC;
  ModelKind model = ModelKind::LogisticRegression;
  double rank_variance = 0.0;
  double value_variance = 0.0;
  std::size_t observations = 0;
};

struct VarianceReport {
  /// Metric-major, metrics in canonical order, models in first-seen order.
  std::vector<VarianceEntry> entries;

  const VarianceEntry* find(MetricId metric, ModelKind model) const;
};

/// Sample variance across iterations of each model's rank and raw value, per
/// metric. Requires at least two iterations. Non-finite values are skipped in
/// the value variance.
VarianceReport rank_variance(std::span<const EvalRecord> records);

/// Metric values of one model on every threshold of one iteration.
struct IterationGrid {
  int iteration = 0;
  std::vector<double> thresholds;
  std::vector<double> values;
  /// The value does not depend on the threshold (AUC).
  bool threshold_free = false;
};

/// Gathers FullGrid records for one (model, metric). For AUC the grid of the
/// model's other records is reused so the series has the same length.
/// Throws Errc::MissingRecords if an iteration has no cutoff record.
std::vector<IterationGrid> collect_grids(std::span<const EvalRecord> records, ModelKind model,
                                         MetricId metric);
/// Same grids taken straight from a sweep result, without materializing records.
std::vector<IterationGrid> collect_grids(const SweepResult& result, ModelKind model,
                                         MetricId metric);

struct SeriesPoint {
  std::size_t threshold_count = 0;
  double variance = 0.0;
};

/// Per iteration, thresholds are ordered by |t - cutoff| (ties: lower t first)
/// and the metric is averaged over the first m of them (finite values only);
/// the series holds the sample variance of that average across iterations for
/// m = 1..max threshold count. Iterations with fewer thresholds contribute
/// their full average once exhausted.
std::vector<SeriesPoint> threshold_expansion_series(std::span<const IterationGrid> grids,
                                                    double cutoff = kCutoff);

std::vector<SeriesPoint> threshold_expansion_series(std::span<const EvalRecord> records,
                                                    ModelKind model, MetricId metric);
std::vector<SeriesPoint> threshold_expansion_series(const SweepResult& result, ModelKind model,
                                                    MetricId metric);

/// Slope of variance on threshold count.
OlsFit series_regression(std::span<const SeriesPoint> series);

/// Metric groups compared by the variance tests.
std::vector<MetricId> prevalence_sensitive_metrics(std::span<const double> betas);
std::vector<MetricId> prevalence_robust_metrics();

struct GroupTestReport {
  std::vector<TestResult> results;
  /// Groups dropped because their variance was zero.
  std::vector<std::string> excluded_groups;
  double sensitive_rank_variance = 0.0;
  double robust_rank_variance = 0.0;
};

/// F, Bartlett and Levene tests on rank observations centred per (metric,
/// model) series. The F-test pools each metric group; Bartlett and Levene use
/// one group per (metric group, model).
GroupTestReport variance_group_tests(std::span<const RankEntry> ranks,
                                     std::span<const MetricId> sensitive,
                                     std::span<const MetricId> robust);

enum class PrevalenceBehavior { Monotone, Concave, Convex, Independent };

std::string_view behavior_name(PrevalenceBehavior behavior);

struct BehaviorFit {
  MetricId metric = MetricKind::AUC;
  PrevalenceBehavior behavior = PrevalenceBehavior::Independent;
  double linear = 0.0;
  double quadratic = 0.0;
  double linear_p = 1.0;
  double quadratic_p = 1.0;
};

/// Heuristic classification from value = b0 + b1 (phi - mean) + b2 (phi - mean)^2
/// pooled over all non-random-guess models at the cutoff: a significant
/// (p < 0.01) quadratic term with its vertex inside the observed prevalence
/// range gives Concave (b2 < 0) or Convex (b2 > 0); otherwise a significant
/// linear term gives Monotone; otherwise Independent.
std::vector<BehaviorFit> classify_prevalence_behavior(std::span<const EvalRecord> records);

}  // namespace prevsim

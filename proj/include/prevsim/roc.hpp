#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prevsim/metrics.hpp"

namespace prevsim {

/// Positive-class scores with the true labels.
struct ScoredPredictions {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return scores.size(); }
  std::size_t positives() const noexcept;

  /// Equal non-zero lengths, labels in {0,1}, finite scores.
  void validate() const;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  bool operator==(const RocPoint&) const = default;
};

struct RocCurve {
  std::vector<RocPoint> points;
};

/// Distinct scores in descending order, preceded by a sentinel strictly above
/// the largest score.
std::vector<double> thresholds(const ScoredPredictions& sp);

/// A case is predicted positive iff score >= t.
ConfusionMatrix apply_threshold(const ScoredPredictions& sp, double t);

/// apply_threshold for many thresholds at once, O((n + T) log n).
std::vector<ConfusionMatrix> apply_thresholds(const ScoredPredictions& sp,
                                              std::span<const double> ts);

/// One point per entry of thresholds(sp). Requires both classes.
RocCurve roc_curve(const ScoredPredictions& sp);

double auc_trapezoid(const RocCurve& curve);

/// Mean over all (positive, negative) pairs of 1 / 0.5 / 0 for a win / tie /
/// loss of the positive score. Quadratic; intended as the reference value.
double auc_mann_whitney(const ScoredPredictions& sp);

/// auc_trapezoid(roc_curve(sp)).
double auc(const ScoredPredictions& sp);

}  // namespace prevsim

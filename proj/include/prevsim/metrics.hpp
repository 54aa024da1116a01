#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prevsim {

/// Outcome counts of a binary classification at one threshold.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;

  std::uint64_t n() const noexcept { return tp + fn + tn + fp; }
  std::uint64_t positives() const noexcept { return tp + fn; }
  std::uint64_t negatives() const noexcept { return tn + fp; }

  /// The same outcome with the roles of the two classes exchanged.
  ConfusionMatrix swapped_classes() const noexcept { return {tn, fp, tp, fn}; }

  bool operator==(const ConfusionMatrix&) const = default;
};

/// (n, prevalence, TPR, TNR): the rate parameterization of a ConfusionMatrix.
struct RateQuad {
  std::uint64_t n = 0;
  double phi = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
};

enum class MetricKind : std::uint8_t {
  TP,
  FN,
  TN,
  FP,
  TPR,
  TNR,
  PPV,
  NPV,
  Accuracy,
  BA,
  BI,
  F1,
  MCC,
  Gmean,
  FowlkesMallows,
  Markedness,
  DiagOddsRatio,
  JaccardIndex,
  CohensKappa,
  FBeta,
  AUC,
};

enum class Orientation { HigherIsBetter, LowerIsBetter };

class MetricId {
 public:
  constexpr MetricId(MetricKind kind) : kind_(kind) {}  // NOLINT(google-explicit-constructor)
  static MetricId fbeta(double beta);

  constexpr MetricKind kind() const noexcept { return kind_; }
  /// Only meaningful for FBeta.
  constexpr double beta() const noexcept { return beta_; }

  /// FN and FP are LowerIsBetter; every other metric is HigherIsBetter.
  Orientation orientation() const noexcept;
  bool is_count() const noexcept;
  /// Everything except AUC can be evaluated from a RateQuad.
  bool rate_expressible() const noexcept;

  /// Stable text name used in reports, e.g. "MCC" or "FBeta_0.5".
  std::string name() const;
  /// Inverse of name(); throws Errc::InvalidArgument for unknown names.
  static MetricId parse(std::string_view text);

  friend bool operator==(const MetricId&, const MetricId&) = default;
  friend auto operator<=>(const MetricId& a, const MetricId& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return std::partial_ordering(c);
    return a.beta_ <=> b.beta_;
  }

 private:
  constexpr MetricId(MetricKind kind, double beta) : kind_(kind), beta_(beta) {}

  MetricKind kind_;
  double beta_ = 0.0;
};

enum class ValueStatus : std::uint8_t {
  Ok,
  /// A rate had an empty denominator and was reported as 0.
  ZeroDenominator,
  /// The value is mathematically undefined (DOR 0/0); value is NaN.
  Undefined,
};

struct MetricValue {
  double value = 0.0;
  ValueStatus status = ValueStatus::Ok;
};

struct MetricOptions {
  /// Adds 0.5 to every cell before computing the diagnostic odds ratio.
  bool dor_continuity_correction = false;
};

inline constexpr double kDefaultBetas[] = {0.5, 2.0};

ConfusionMatrix from_predictions(std::span<const std::uint8_t> labels,
                                 std::span<const std::uint8_t> predicted);

/// Requires both classes present.
RateQuad to_rates(const ConfusionMatrix& cm);

/// Count-form evaluation. Degenerate denominators never throw: rates with an
/// empty denominator are 0 (ZeroDenominator), MCC and Kappa with a zero
/// denominator are 0, DOR with a zero denominator is +inf and with 0/0 is
/// Undefined. AUC throws (it needs scores).
MetricValue evaluate(const ConfusionMatrix& cm, MetricId id, const MetricOptions& options = {});
double metric(const ConfusionMatrix& cm, MetricId id, const MetricOptions& options = {});

/// Rate-form evaluation, same conventions as the count form.
MetricValue evaluate_from_rates(const RateQuad& rq, MetricId id);
double metric_from_rates(const RateQuad& rq, MetricId id);

/// All threshold-based metrics in canonical order: the fixed set plus one
/// FBeta per beta. AUC is not included.
std::vector<MetricId> threshold_metrics(std::span<const double> betas);

std::map<MetricId, MetricValue> all_metrics(const ConfusionMatrix& cm,
                                            std::span<const double> betas = kDefaultBetas,
                                            const MetricOptions& options = {});

}  // namespace prevsim

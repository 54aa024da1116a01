#include "prevsim/roc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "prevsim/error.hpp"

namespace prevsim {
namespace {

void require_both_classes(const ScoredPredictions& sp, const char* what) {
  const auto pos = sp.positives();
  if (pos == 0 || pos == sp.size()) {
    throw Error(Errc::SingleClass, std::string(what) + " needs both classes present");
  }
}

/// Counts of cases with score >= t, via binary search on ascending scores.
std::uint64_t count_at_least(const std::vector<double>& ascending, double t) {
  const auto it = std::lower_bound(ascending.begin(), ascending.end(), t);
  return static_cast<std::uint64_t>(ascending.end() - it);
}

}  // namespace

std::size_t ScoredPredictions::positives() const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

void ScoredPredictions::validate() const {
  if (scores.size() != labels.size()) {
    throw Error(Errc::InvalidArgument, "scores and labels differ in length");
  }
  if (scores.empty()) throw Error(Errc::InvalidArgument, "no scored predictions");
  for (auto l : labels) {
    if (l > 1) throw Error(Errc::InvalidArgument, "labels must be 0 or 1");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error(Errc::InvalidArgument, "scores must be finite");
  }
}

std::vector<double> thresholds(const ScoredPredictions& sp) {
  sp.validate();
  std::vector<double> ts = sp.scores;
  std::sort(ts.begin(), ts.end(), std::greater<>());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  ts.insert(ts.begin(), std::nextafter(ts.front(), std::numeric_limits<double>::infinity()));
  return ts;
}

ConfusionMatrix apply_threshold(const ScoredPredictions& sp, double t) {
  sp.validate();
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const bool predicted = sp.scores[i] >= t;
    if (sp.labels[i]) {
      ++(predicted ? cm.tp : cm.fn);
    } else {
      ++(predicted ? cm.fp : cm.tn);
    }
  }
  return cm;
}

std::vector<ConfusionMatrix> apply_thresholds(const ScoredPredictions& sp,
                                              std::span<const double> ts) {
  sp.validate();
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < sp.size(); ++i) (sp.labels[i] ? pos : neg).push_back(sp.scores[i]);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::vector<ConfusionMatrix> out;
  out.reserve(ts.size());
  for (double t : ts) {
    const auto tp = count_at_least(pos, t);
    const auto fp = count_at_least(neg, t);
    out.push_back({tp, pos.size() - tp, neg.size() - fp, fp});
  }
  return out;
}

RocCurve roc_curve(const ScoredPredictions& sp) {
  sp.validate();
  require_both_classes(sp, "ROC curve");
  const auto ts = thresholds(sp);
  const auto cms = apply_thresholds(sp, ts);
  RocCurve curve;
  curve.points.reserve(cms.size());
  for (const auto& cm : cms) {
    curve.points.push_back({static_cast<double>(cm.fp) / static_cast<double>(cm.negatives()),
                            static_cast<double>(cm.tp) / static_cast<double>(cm.positives())});
  }
  return curve;
}

double auc_trapezoid(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

double auc_mann_whitney(const ScoredPredictions& sp) {
  sp.validate();
  require_both_classes(sp, "AUC");
  double credit = 0.0;
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    if (!sp.labels[i]) continue;
    for (std::size_t j = 0; j < sp.size(); ++j) {
      if (sp.labels[j]) continue;
      ++pairs;
      if (sp.scores[i] > sp.scores[j]) {
        credit += 1.0;
      } else if (sp.scores[i] == sp.scores[j]) {
        credit += 0.5;
      }
    }
  }
  return credit / static_cast<double>(pairs);
}

double auc(const ScoredPredictions& sp) { return auc_trapezoid(roc_curve(sp)); }

}  // namespace prevsim

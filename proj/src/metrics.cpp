#include "prevsim/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "prevsim/csv.hpp"
#include "prevsim/error.hpp"

namespace prevsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct NamedKind {
  MetricKind kind;
  const char* name;
};

constexpr std::array<NamedKind, 20> kNames{{
    {MetricKind::TP, "TP"},
    {MetricKind::FN, "FN"},
    {MetricKind::TN, "TN"},
    {MetricKind::FP, "FP"},
    {MetricKind::TPR, "TPR"},
    {MetricKind::TNR, "TNR"},
    {MetricKind::PPV, "PPV"},
    {MetricKind::NPV, "NPV"},
    {MetricKind::Accuracy, "Accuracy"},
    {MetricKind::BA, "BA"},
    {MetricKind::BI, "BI"},
    {MetricKind::F1, "F1"},
    {MetricKind::MCC, "MCC"},
    {MetricKind::Gmean, "Gmean"},
    {MetricKind::FowlkesMallows, "FowlkesMallows"},
    {MetricKind::Markedness, "Markedness"},
    {MetricKind::DiagOddsRatio, "DiagOddsRatio"},
    {MetricKind::JaccardIndex, "JaccardIndex"},
    {MetricKind::CohensKappa, "CohensKappa"},
    {MetricKind::AUC, "AUC"},
}};

constexpr std::string_view kFBetaPrefix = "FBeta_";

MetricValue ok(double v) { return {v, ValueStatus::Ok}; }

/// num / den with the zero-denominator convention.
MetricValue ratio(double num, double den) {
  if (den == 0.0) return {0.0, ValueStatus::ZeroDenominator};
  return ok(num / den);
}

ValueStatus worst(ValueStatus a, ValueStatus b) { return a > b ? a : b; }

MetricValue odds_ratio(double num, double den) {
  if (den == 0.0) {
    return num == 0.0 ? MetricValue{kNaN, ValueStatus::Undefined} : ok(kInf);
  }
  return ok(num / den);
}

MetricValue f_beta(MetricValue ppv, MetricValue tpr, double beta) {
  const double b2 = beta * beta;
  auto v = ratio((1.0 + b2) * ppv.value * tpr.value, b2 * ppv.value + tpr.value);
  v.status = worst(v.status, worst(ppv.status, tpr.status));
  return v;
}

MetricValue geometric(MetricValue a, MetricValue b) {
  return {std::sqrt(a.value * b.value), worst(a.status, b.status)};
}

}  // namespace

MetricId MetricId::fbeta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(Errc::InvalidArgument, "FBeta requires a positive finite beta");
  }
  return MetricId(MetricKind::FBeta, beta);
}

Orientation MetricId::orientation() const noexcept {
  return kind_ == MetricKind::FN || kind_ == MetricKind::FP ? Orientation::LowerIsBetter
                                                            : Orientation::HigherIsBetter;
}

bool MetricId::is_count() const noexcept {
  return kind_ == MetricKind::TP || kind_ == MetricKind::FN || kind_ == MetricKind::TN ||
         kind_ == MetricKind::FP;
}

bool MetricId::rate_expressible() const noexcept { return kind_ != MetricKind::AUC; }

std::string MetricId::name() const {
  if (kind_ == MetricKind::FBeta) return std::string(kFBetaPrefix) + csv::format_double(beta_);
  for (const auto& entry : kNames) {
    if (entry.kind == kind_) return entry.name;
  }
  return "?";
}

MetricId MetricId::parse(std::string_view text) {
  if (text.starts_with(kFBetaPrefix)) {
    const auto beta = csv::parse_double(text.substr(kFBetaPrefix.size()));
    if (beta) return fbeta(*beta);
  }
  for (const auto& entry : kNames) {
    if (text == entry.name) return MetricId(entry.kind);
  }
  throw Error(Errc::InvalidArgument, "unknown metric '" + std::string(text) + "'");
}

ConfusionMatrix from_predictions(std::span<const std::uint8_t> labels,
                                 std::span<const std::uint8_t> predicted) {
  if (labels.size() != predicted.size()) {
    throw Error(Errc::InvalidArgument, "labels and predictions differ in length");
  }
  if (labels.empty()) throw Error(Errc::InvalidArgument, "no predictions to tally");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1 || predicted[i] > 1) {
      throw Error(Errc::InvalidArgument, "labels and predictions must be 0 or 1");
    }
    if (labels[i]) {
      ++(predicted[i] ? cm.tp : cm.fn);
    } else {
      ++(predicted[i] ? cm.fp : cm.tn);
    }
  }
  return cm;
}

RateQuad to_rates(const ConfusionMatrix& cm) {
  if (cm.positives() == 0 || cm.negatives() == 0) {
    throw Error(Errc::SingleClass, "rate form needs both classes present");
  }
  const auto n = static_cast<double>(cm.n());
  return {cm.n(), static_cast<double>(cm.positives()) / n,
          static_cast<double>(cm.tp) / static_cast<double>(cm.positives()),
          static_cast<double>(cm.tn) / static_cast<double>(cm.negatives())};
}

MetricValue evaluate(const ConfusionMatrix& cm, MetricId id, const MetricOptions& options) {
  const double tp = static_cast<double>(cm.tp);
  const double fn = static_cast<double>(cm.fn);
  const double tn = static_cast<double>(cm.tn);
  const double fp = static_cast<double>(cm.fp);
  const double n = tp + fn + tn + fp;

  const auto tpr = [&] { return ratio(tp, tp + fn); };
  const auto tnr = [&] { return ratio(tn, tn + fp); };
  const auto ppv = [&] { return ratio(tp, tp + fp); };
  const auto npv = [&] { return ratio(tn, tn + fn); };

  switch (id.kind()) {
    case MetricKind::TP: return ok(tp);
    case MetricKind::FN: return ok(fn);
    case MetricKind::TN: return ok(tn);
    case MetricKind::FP: return ok(fp);
    case MetricKind::TPR: return tpr();
    case MetricKind::TNR: return tnr();
    case MetricKind::PPV: return ppv();
    case MetricKind::NPV: return npv();
    case MetricKind::Accuracy: return ratio(tp + tn, n);
    case MetricKind::BA: {
      const auto a = tpr(), b = tnr();
      return {(a.value + b.value) / 2.0, worst(a.status, b.status)};
    }
    case MetricKind::BI: {
      const auto a = tpr(), b = tnr();
      return {a.value + b.value - 1.0, worst(a.status, b.status)};
    }
    case MetricKind::Markedness: {
      const auto a = ppv(), b = npv();
      return {a.value + b.value - 1.0, worst(a.status, b.status)};
    }
    case MetricKind::F1: return ratio(2.0 * tp, 2.0 * tp + fp + fn);
    case MetricKind::FBeta: return f_beta(ppv(), tpr(), id.beta());
    case MetricKind::MCC: {
      // Products of four counts stay exact in double well past any dataset here.
      const double den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
      if (den == 0.0) return {0.0, ValueStatus::ZeroDenominator};
      return ok((tp * tn - fp * fn) / den);
    }
    case MetricKind::Gmean: return geometric(tpr(), tnr());
    case MetricKind::FowlkesMallows: return geometric(ppv(), tpr());
    case MetricKind::JaccardIndex: return ratio(tp, tp + fn + fp);
    case MetricKind::DiagOddsRatio: {
      const double c = options.dor_continuity_correction ? 0.5 : 0.0;
      return odds_ratio((tp + c) * (tn + c), (fp + c) * (fn + c));
    }
    case MetricKind::CohensKappa: {
      if (n == 0.0) return {0.0, ValueStatus::ZeroDenominator};
      const double accuracy = (tp + tn) / n;
      const double expected = ((tp + fn) * (tp + fp) + (tn + fp) * (tn + fn)) / (n * n);
      return ratio(accuracy - expected, 1.0 - expected);
    }
    case MetricKind::AUC:
      throw Error(Errc::InvalidArgument, "AUC needs scores, not a confusion matrix");
  }
  throw Error(Errc::InvalidArgument, "unknown metric");
}

double metric(const ConfusionMatrix& cm, MetricId id, const MetricOptions& options) {
  return evaluate(cm, id, options).value;
}

MetricValue evaluate_from_rates(const RateQuad& rq, MetricId id) {
  const double phi = rq.phi;
  const double tpr = rq.tpr;
  const double tnr = rq.tnr;
  const double n = static_cast<double>(rq.n);
  // Shares of the whole population in each cell.
  const double tp = tpr * phi;
  const double fn = (1.0 - tpr) * phi;
  const double tn = tnr * (1.0 - phi);
  const double fp = (1.0 - tnr) * (1.0 - phi);

  const auto ppv = [&] { return ratio(tp, tp + fp); };
  const auto npv = [&] { return ratio(tn, tn + fn); };

  switch (id.kind()) {
    case MetricKind::TP: return ok(tp * n);
    case MetricKind::FN: return ok(fn * n);
    case MetricKind::TN: return ok(tn * n);
    case MetricKind::FP: return ok(fp * n);
    case MetricKind::TPR: return ok(tpr);
    case MetricKind::TNR: return ok(tnr);
    case MetricKind::PPV: return ppv();
    case MetricKind::NPV: return npv();
    case MetricKind::Accuracy: return ok(tpr * phi + tnr * (1.0 - phi));
    case MetricKind::BA: return ok((tpr + tnr) / 2.0);
    case MetricKind::BI: return ok(tpr + tnr - 1.0);
    case MetricKind::Markedness: {
      const auto a = ppv(), b = npv();
      return {a.value + b.value - 1.0, worst(a.status, b.status)};
    }
    case MetricKind::F1: {
      if (tpr == 0.0) return ok(0.0);
      return ok(2.0 / (2.0 + ((1.0 - tnr) * (1.0 - phi) / phi + 1.0 - tpr) / tpr));
    }
    case MetricKind::FBeta: return f_beta(ppv(), ok(tpr), id.beta());
    case MetricKind::MCC: {
      const double a = tpr * phi / (1.0 - phi) + 1.0 - tnr;
      const double b = tnr * (1.0 - phi) / phi + 1.0 - tpr;
      const double den = std::sqrt(a * b);
      if (den == 0.0) return {0.0, ValueStatus::ZeroDenominator};
      return ok((tpr + tnr - 1.0) / den);
    }
    case MetricKind::Gmean: return ok(std::sqrt(tpr * tnr));
    // Square root included, matching sqrt(PPV * TPR).
    case MetricKind::FowlkesMallows: return geometric(ppv(), ok(tpr));
    case MetricKind::JaccardIndex: return ratio(tpr * phi, phi + (1.0 - tnr) * (1.0 - phi));
    case MetricKind::DiagOddsRatio: return odds_ratio(tpr * tnr, (1.0 - tnr) * (1.0 - tpr));
    case MetricKind::CohensKappa: {
      const double accuracy = tpr * phi + tnr * (1.0 - phi);
      // Chance agreement: P(actual) * P(predicted) summed over both classes, no 1/n factor.
      const double expected = phi * (tpr * phi + (1.0 - tnr) * (1.0 - phi)) +
                              (1.0 - phi) * (tnr * (1.0 - phi) + (1.0 - tpr) * phi);
      return ratio(accuracy - expected, 1.0 - expected);
    }
    case MetricKind::AUC:
      throw Error(Errc::InvalidArgument, "AUC has no rate form");
  }
  throw Error(Errc::InvalidArgument, "unknown metric");
}

double metric_from_rates(const RateQuad& rq, MetricId id) {
  return evaluate_from_rates(rq, id).value;
}

std::vector<MetricId> threshold_metrics(std::span<const double> betas) {
  std::vector<MetricId> ids;
  for (const auto& entry : kNames) {
    if (entry.kind != MetricKind::AUC) ids.emplace_back(entry.kind);
  }
  for (double beta : betas) ids.push_back(MetricId::fbeta(beta));
  return ids;
}

std::map<MetricId, MetricValue> all_metrics(const ConfusionMatrix& cm,
                                            std::span<const double> betas,
                                            const MetricOptions& options) {
  std::map<MetricId, MetricValue> out;
  for (const auto id : threshold_metrics(betas)) out.emplace(id, evaluate(cm, id, options));
  return out;
}

}  // namespace prevsim

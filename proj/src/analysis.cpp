#include "prevsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "prevsim/error.hpp"

namespace prevsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Records that feed rankings: AUC plus everything at the cutoff.
bool is_ranked_record(const EvalRecord& r) {
  return !r.threshold || *r.threshold == kCutoff;
}

template <typename Key>
std::size_t index_of(std::vector<Key>& keys, const Key& key) {
  const auto it = std::find(keys.begin(), keys.end(), key);
  if (it != keys.end()) return static_cast<std::size_t>(it - keys.begin());
  keys.push_back(key);
  return keys.size() - 1;
}

double variance_or_nan(const std::vector<double>& values) {
  return values.size() < 2 ? kNaN : sample_variance(values);
}

std::string group_label(std::string_view group, ModelKind model) {
  return std::string(group) + "/" + std::string(model_name(model));
}

}  // namespace

std::vector<double> fractional_ranks(std::span<const double> values, Orientation orientation) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isnan(values[i])) order.push_back(i);
  }
  const bool higher = orientation == Orientation::HigherIsBetter;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(values.size(), kNaN);
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean of ranks i+1..j+1.
    const double shared = static_cast<double>(i + j + 2) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

std::map<ModelKind, double> rank_models(const std::map<ModelKind, double>& values,
                                        Orientation orientation) {
  std::vector<ModelKind> models;
  std::vector<double> v;
  for (const auto& [model, value] : values) {
    models.push_back(model);
    v.push_back(value);
  }
  const auto ranks = fractional_ranks(v, orientation);
  std::map<ModelKind, double> out;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!std::isnan(ranks[i])) out[models[i]] = ranks[i];
  }
  return out;
}

std::vector<RankEntry> rank_table(std::span<const EvalRecord> records) {
  struct Group {
    int iteration;
    double prevalence;
    MetricId metric;
    std::vector<ModelKind> models;
    std::vector<double> values;
  };
  std::map<std::pair<int, MetricId>, Group> groups;
  for (const auto& r : records) {
    if (!is_ranked_record(r)) continue;
    auto [it, inserted] = groups.try_emplace({r.iteration, r.metric},
                                             Group{r.iteration, r.test_prevalence, r.metric, {}, {}});
    it->second.models.push_back(r.model);
    it->second.values.push_back(r.value);
  }
  std::vector<RankEntry> out;
  for (const auto& [key, g] : groups) {
    const auto ranks = fractional_ranks(g.values, g.metric.orientation());
    for (std::size_t i = 0; i < g.models.size(); ++i) {
      if (std::isnan(ranks[i])) continue;
      out.push_back({g.iteration, g.prevalence, g.metric, g.models[i], ranks[i]});
    }
  }
  return out;
}

const VarianceEntry* VarianceReport::find(MetricId metric, ModelKind model) const {
  for (const auto& e : entries) {
    if (e.metric == metric && e.model == model) return &e;
  }
  return nullptr;
}

VarianceReport rank_variance(std::span<const EvalRecord> records) {
  std::vector<int> iterations;
  std::vector<ModelKind> models;
  for (const auto& r : records) {
    if (!is_ranked_record(r)) continue;
    index_of(iterations, r.iteration);
    index_of(models, r.model);
  }
  if (iterations.size() < 2) {
    throw Error(Errc::InsufficientData, "rank variance needs at least two iterations");
  }

  struct Series {
    std::vector<double> ranks;
    std::vector<double> values;
  };
  std::map<MetricId, std::vector<Series>> per_metric;
  for (const auto& r : records) {
    if (!is_ranked_record(r)) continue;
    auto& series = per_metric[r.metric];
    series.resize(models.size());
    if (std::isfinite(r.value)) series[index_of(models, r.model)].values.push_back(r.value);
  }
  for (const auto& e : rank_table(records)) {
    per_metric[e.metric][index_of(models, e.model)].ranks.push_back(e.rank);
  }

  VarianceReport report;
  for (const auto& [metric, series] : per_metric) {
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto& s = series[m];
      if (s.ranks.empty() && s.values.empty()) continue;
      report.entries.push_back({metric, models[m], variance_or_nan(s.ranks),
                                variance_or_nan(s.values), s.ranks.size()});
    }
  }
  return report;
}

std::vector<IterationGrid> collect_grids(std::span<const EvalRecord> records, ModelKind model,
                                         MetricId metric) {
  const bool is_auc = metric.kind() == MetricKind::AUC;
  std::vector<int> iterations;
  std::vector<IterationGrid> grids;
  std::vector<double> auc_values;
  std::vector<MetricId> reference;  // the metric whose thresholds an AUC grid borrows
  for (const auto& r : records) {
    if (r.model != model) continue;
    const auto at = index_of(iterations, r.iteration);
    if (at == grids.size()) {
      grids.push_back({r.iteration, {}, {}, is_auc});
      auc_values.push_back(kNaN);
    }
    auto& g = grids[at];
    if (!r.threshold) {
      if (r.metric.kind() == MetricKind::AUC) auc_values[at] = r.value;
      continue;
    }
    if (is_auc) {
      if (reference.empty()) reference.push_back(r.metric);
      if (r.metric == reference.front()) g.thresholds.push_back(*r.threshold);
    } else if (r.metric == metric) {
      g.thresholds.push_back(*r.threshold);
      g.values.push_back(r.value);
    }
  }
  for (std::size_t i = 0; i < grids.size(); ++i) {
    auto& g = grids[i];
    if (std::find(g.thresholds.begin(), g.thresholds.end(), kCutoff) == g.thresholds.end()) {
      throw Error(Errc::MissingRecords, "iteration " + std::to_string(g.iteration) +
                                            " has no cutoff record for " + metric.name());
    }
    if (is_auc) g.values.assign(g.thresholds.size(), auc_values[i]);
  }
  std::sort(grids.begin(), grids.end(),
            [](const IterationGrid& a, const IterationGrid& b) { return a.iteration < b.iteration; });
  return grids;
}

std::vector<IterationGrid> collect_grids(const SweepResult& result, ModelKind model,
                                         MetricId metric) {
  const bool is_auc = metric.kind() == MetricKind::AUC;
  std::vector<IterationGrid> grids;
  for (const auto& s : result.scenarios) {
    const auto it = std::find_if(s.models.begin(), s.models.end(),
                                 [&](const ModelEvaluation& m) { return m.model == model; });
    if (it == s.models.end()) {
      throw Error(Errc::MissingRecords, "iteration " + std::to_string(s.iteration) +
                                            " has no results for " +
                                            std::string(model_name(model)));
    }
    IterationGrid g{s.iteration, it->grid_thresholds, {}, is_auc};
    g.values.reserve(it->grid.size());
    for (const auto& cm : it->grid) {
      g.values.push_back(is_auc ? it->auc : prevsim::metric(cm, metric, result.metric_options));
    }
    grids.push_back(std::move(g));
  }
  return grids;
}

std::vector<SeriesPoint> threshold_expansion_series(std::span<const IterationGrid> grids,
                                                    double cutoff) {
  // Running averages over thresholds nearest the cutoff first.
  std::vector<std::vector<double>> averages;
  std::size_t longest = 0;
  for (const auto& g : grids) {
    if (g.thresholds.size() != g.values.size()) {
      throw Error(Errc::InvalidArgument, "grid thresholds and values differ in length");
    }
    std::vector<std::size_t> order(g.thresholds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double da = std::abs(g.thresholds[a] - cutoff);
      const double db = std::abs(g.thresholds[b] - cutoff);
      if (da != db) return da < db;
      return g.thresholds[a] < g.thresholds[b];
    });
    auto& avg = averages.emplace_back();
    avg.reserve(order.size());
    double sum = 0.0;
    std::size_t count = 0;
    for (auto i : order) {
      if (g.threshold_free) {
        avg.push_back(g.values[i]);
        continue;
      }
      if (std::isfinite(g.values[i])) {
        sum += g.values[i];
        ++count;
      }
      avg.push_back(count == 0 ? kNaN : sum / static_cast<double>(count));
    }
    longest = std::max(longest, avg.size());
  }

  std::vector<SeriesPoint> series;
  series.reserve(longest);
  std::vector<double> column;
  for (std::size_t m = 1; m <= longest; ++m) {
    column.clear();
    for (const auto& avg : averages) {
      if (avg.empty()) continue;
      const double v = avg[std::min(m, avg.size()) - 1];
      if (std::isfinite(v)) column.push_back(v);
    }
    series.push_back({m, variance_or_nan(column)});
  }
  return series;
}

std::vector<SeriesPoint> threshold_expansion_series(std::span<const EvalRecord> records,
                                                    ModelKind model, MetricId metric) {
  const auto grids = collect_grids(records, model, metric);
  return threshold_expansion_series(grids, kCutoff);
}

std::vector<SeriesPoint> threshold_expansion_series(const SweepResult& result, ModelKind model,
                                                    MetricId metric) {
  const auto grids = collect_grids(result, model, metric);
  return threshold_expansion_series(grids, kCutoff);
}

OlsFit series_regression(std::span<const SeriesPoint> series) {
  std::vector<double> x, y;
  for (const auto& p : series) {
    if (!std::isfinite(p.variance)) continue;
    x.push_back(static_cast<double>(p.threshold_count));
    y.push_back(p.variance);
  }
  return ols_simple(y, x);
}

std::vector<MetricId> prevalence_sensitive_metrics(std::span<const double> betas) {
  std::vector<MetricId> out{MetricKind::F1};
  for (double b : betas) out.push_back(MetricId::fbeta(b));
  for (auto k : {MetricKind::JaccardIndex, MetricKind::TPR, MetricKind::TNR,
                 MetricKind::FowlkesMallows}) {
    out.emplace_back(k);
  }
  return out;
}

std::vector<MetricId> prevalence_robust_metrics() {
  return {MetricKind::BA,  MetricKind::BI,         MetricKind::CohensKappa,  MetricKind::MCC,
          MetricKind::AUC, MetricKind::Markedness, MetricKind::DiagOddsRatio};
}

GroupTestReport variance_group_tests(std::span<const RankEntry> ranks,
                                     std::span<const MetricId> sensitive,
                                     std::span<const MetricId> robust) {
  // Centre every (metric, model) series so that only spread around its own
  // mean enters the comparison.
  std::map<std::pair<MetricId, ModelKind>, std::vector<double>> series;
  std::vector<ModelKind> models;
  for (const auto& r : ranks) {
    series[{r.metric, r.model}].push_back(r.rank);
    index_of(models, r.model);
  }
  for (auto& [key, values] : series) {
    const double m = mean(values);
    for (auto& v : values) v -= m;
  }

  auto gather = [&](std::span<const MetricId> metrics, std::optional<ModelKind> model) {
    std::vector<double> out;
    for (const auto& metric : metrics) {
      for (const auto& [key, values] : series) {
        if (key.first != metric || (model && key.second != *model)) continue;
        out.insert(out.end(), values.begin(), values.end());
      }
    }
    return out;
  };

  GroupTestReport report;
  const auto pooled_sensitive = gather(sensitive, std::nullopt);
  const auto pooled_robust = gather(robust, std::nullopt);
  if (pooled_sensitive.size() < 2 || pooled_robust.size() < 2) {
    throw Error(Errc::InsufficientData, "variance group tests need rank observations in both groups");
  }
  report.sensitive_rank_variance = sample_variance(pooled_sensitive);
  report.robust_rank_variance = sample_variance(pooled_robust);

  if (report.robust_rank_variance > 0.0) {
    report.results.push_back(f_test(pooled_sensitive, pooled_robust));
  } else {
    report.excluded_groups.push_back("robust (F-test)");
  }

  std::vector<std::vector<double>> groups;
  for (const auto& [name, metrics] :
       {std::pair{std::string_view("sensitive"), sensitive}, std::pair{std::string_view("robust"), robust}}) {
    for (auto model : models) {
      auto g = gather(metrics, model);
      if (g.size() < 2 || sample_variance(g) == 0.0) {
        report.excluded_groups.push_back(group_label(name, model));
        continue;
      }
      groups.push_back(std::move(g));
    }
  }
  if (groups.size() >= 2) {
    report.results.push_back(bartlett_test(groups));
    report.results.push_back(levene_test(groups));
  }
  return report;
}

std::string_view behavior_name(PrevalenceBehavior behavior) {
  switch (behavior) {
    case PrevalenceBehavior::Monotone: return "monotone";
    case PrevalenceBehavior::Concave: return "concave";
    case PrevalenceBehavior::Convex: return "convex";
    case PrevalenceBehavior::Independent: return "independent";
  }
  return "?";
}

std::vector<BehaviorFit> classify_prevalence_behavior(std::span<const EvalRecord> records) {
  std::map<MetricId, std::pair<std::vector<double>, std::vector<double>>> points;
  for (const auto& r : records) {
    if (!is_ranked_record(r) || r.model == ModelKind::RandomGuess || !std::isfinite(r.value)) {
      continue;
    }
    auto& [phi, value] = points[r.metric];
    phi.push_back(r.test_prevalence);
    value.push_back(r.value);
  }
  std::vector<BehaviorFit> out;
  for (const auto& [metric, pv] : points) {
    const auto& [phi, value] = pv;
    if (phi.size() < 4) continue;
    const double centre = mean(phi);
    const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
    Matrix design(phi.size(), 3);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double c = phi[i] - centre;
      design(i, 0) = 1.0;
      design(i, 1) = c;
      design(i, 2) = c * c;
    }
    OlsFit fit;
    try {
      fit = ols(value, design);
    } catch (const Error& e) {
      if (e.code() != Errc::RankDeficient) throw;
      continue;
    }
    BehaviorFit b;
    b.metric = metric;
    b.linear = fit.coefficients[1];
    b.quadratic = fit.coefficients[2];
    b.linear_p = fit.p_values[1];
    b.quadratic_p = fit.p_values[2];
    const double vertex = b.quadratic != 0.0 ? centre - b.linear / (2.0 * b.quadratic) : kNaN;
    if (b.quadratic_p < 0.01 && vertex > *lo && vertex < *hi) {
      b.behavior = b.quadratic < 0.0 ? PrevalenceBehavior::Concave : PrevalenceBehavior::Convex;
    } else if (b.linear_p < 0.01) {
      b.behavior = PrevalenceBehavior::Monotone;
    }
    out.push_back(b);
  }
  return out;
}

}  // namespace prevsim

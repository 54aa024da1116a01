#include "prevsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "prevsim/analysis.hpp"
#include "prevsim/csv.hpp"
#include "prevsim/dataset.hpp"
#include "prevsim/error.hpp"

namespace prevsim {
namespace {

using Json = nlohmann::ordered_json;

std::string_view status_name(ValueStatus s) {
  switch (s) {
    case ValueStatus::Ok: return "ok";
    case ValueStatus::ZeroDenominator: return "zero_denominator";
    case ValueStatus::Undefined: return "undefined";
  }
  return "?";
}

std::size_t column_index(const csv::Row& header, std::string_view name,
                         const std::filesystem::path& path) {
  std::size_t found = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != name) continue;
    if (found != header.size()) {
      throw Error(Errc::MalformedCsv, path.string() + ": column '" + std::string(name) + "' repeated");
    }
    found = i;
  }
  if (found == header.size()) {
    throw Error(Errc::MalformedCsv, path.string() + ": missing column '" + std::string(name) + "'");
  }
  return found;
}

std::string threshold_text(const std::optional<double>& t) {
  return t ? csv::format_double(*t) : "ALL";
}

/// NaN and infinities have no JSON form; they become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json phase_json(const PhaseSummary& p) {
  return {{"requested", p.requested}, {"completed", p.completed}, {"stop_reason", p.stop_reason}};
}

Dataset input_dataset(const RunConfig& cfg) {
  if (!cfg.dataset.empty()) return load_csv(cfg.dataset, cfg.label_column, cfg.positive_label);
  return synth_dataset(cfg.synth_n, cfg.synth_features, cfg.synth_prevalence, cfg.synth_separation,
                       cfg.sweep.seed);
}

}  // namespace

ScoredPredictions load_predictions(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const auto score_col = column_index(table.header, "score", path);
  const auto label_col = column_index(table.header, "label", path);
  ScoredPredictions sp;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto where = path.string() + " row " + std::to_string(r + 2);
    const auto score = csv::parse_double(row[score_col]);
    if (!score || !std::isfinite(*score)) {
      throw Error(Errc::UnparsableNumeric, where + ": score '" + row[score_col] + "' is not a number");
    }
    const auto& label = row[label_col];
    if (label != "0" && label != "1") {
      throw Error(Errc::MalformedCsv, where + ": label '" + label + "' is not 0 or 1");
    }
    sp.scores.push_back(*score);
    sp.labels.push_back(label == "1" ? 1 : 0);
  }
  if (sp.scores.empty()) throw Error(Errc::EmptyDataset, path.string() + " has no predictions");
  return sp;
}

std::string metrics_report(const ScoredPredictions& sp, double threshold,
                           const std::vector<double>& betas, const MetricOptions& options) {
  sp.validate();
  const auto cm = apply_threshold(sp, threshold);
  std::string out = "metric,value,status\n";
  for (const auto& id : threshold_metrics(betas)) {
    const auto v = evaluate(cm, id, options);
    out += csv::join({id.name(), csv::format_double(v.value), std::string(status_name(v.status))});
    out += '\n';
  }
  const auto pos = sp.positives();
  if (pos == 0 || pos == sp.size()) {
    out += "AUC,nan,undefined\n";
  } else {
    out += "AUC," + csv::format_double(auc(sp)) + ",ok\n";
  }
  return out;
}

void cmd_metrics(const std::filesystem::path& predictions, double threshold,
                 const std::vector<double>& betas, std::ostream& out) {
  out << metrics_report(load_predictions(predictions), threshold, betas);
}

SweepOutputs cmd_sweep(const RunConfig& cfg) {
  if (const auto problems = validate_config(cfg); !problems.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& p : problems) message += "\n  " + p;
    throw Error(Errc::InvalidConfig, message);
  }
  const std::filesystem::path dir = cfg.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());

  const auto data = input_dataset(cfg);
  const auto result = run_sweep(data, cfg.sweep);
  const bool full = cfg.sweep.threshold_mode == ThresholdMode::FullGrid;

  SweepOutputs outputs;
  outputs.scenarios = result.scenarios.size();

  // records.csv can be very large in full mode, so it is streamed; the ranked
  // subset (cutoff and AUC) is kept for the downstream tables.
  std::vector<EvalRecord> ranked;
  {
    csv::AtomicWriter writer(dir / "records.csv");
    auto& out = writer.stream();
    out << "iteration,test_prevalence,model,metric,threshold,value\n";
    for_each_record(result, [&](const EvalRecord& r) {
      out << r.iteration << ',' << csv::format_double(r.test_prevalence) << ','
          << model_name(r.model) << ',' << r.metric.name() << ',' << threshold_text(r.threshold)
          << ',' << csv::format_double(r.value) << '\n';
      ++outputs.records;
      if (!r.threshold || *r.threshold == kCutoff) ranked.push_back(r);
    });
    writer.commit();
    outputs.files.push_back(dir / "records.csv");
  }

  auto write = [&](const std::string& name, const std::string& contents) {
    csv::write_atomic(dir / name, contents);
    outputs.files.push_back(dir / name);
  };

  const auto ranks = rank_table(ranked);
  {
    std::ostringstream out;
    out << "iteration,test_prevalence,metric,model,rank\n";
    for (const auto& r : ranks) {
      out << r.iteration << ',' << csv::format_double(r.test_prevalence) << ',' << r.metric.name()
          << ',' << model_name(r.model) << ',' << csv::format_double(r.rank) << '\n';
    }
    write("ranks.csv", out.str());
  }

  std::optional<VarianceReport> variance;
  if (result.scenarios.size() >= 2) variance = rank_variance(ranked);
  {
    std::ostringstream out;
    out << "metric,model,rank_variance,value_variance,observations\n";
    if (variance) {
      for (const auto& e : variance->entries) {
        out << e.metric.name() << ',' << model_name(e.model) << ','
            << csv::format_double(e.rank_variance) << ',' << csv::format_double(e.value_variance)
            << ',' << e.observations << '\n';
      }
    }
    write("rank_variance.csv", out.str());
  }

  std::vector<MetricId> series_metrics = threshold_metrics(cfg.sweep.betas);
  series_metrics.push_back(MetricKind::AUC);
  std::ostringstream ols_out;
  ols_out << "metric,model,points,intercept,slope,slope_se,slope_t,slope_p\n";
  std::size_t negative_significant = 0, fitted = 0;
  if (full && result.scenarios.size() >= 2) {
    std::ostringstream series_out;
    series_out << "metric,model,threshold_count,variance\n";
    for (const auto& id : series_metrics) {
      for (const auto& spec : cfg.sweep.models) {
        const auto series = threshold_expansion_series(result, spec.kind, id);
        for (const auto& p : series) {
          series_out << id.name() << ',' << model_name(spec.kind) << ',' << p.threshold_count << ','
                     << csv::format_double(p.variance) << '\n';
        }
        try {
          const auto fit = series_regression(series);
          ols_out << id.name() << ',' << model_name(spec.kind) << ','
                  << fit.degrees_of_freedom + 2 << ',' << csv::format_double(fit.coefficients[0])
                  << ',' << csv::format_double(fit.coefficients[1]) << ','
                  << csv::format_double(fit.standard_errors[1]) << ','
                  << csv::format_double(fit.t_statistics[1]) << ','
                  << csv::format_double(fit.p_values[1]) << '\n';
          // DOR and AUC stay out of the tally.
          if (id.kind() != MetricKind::DiagOddsRatio && id.kind() != MetricKind::AUC) {
            ++fitted;
            if (fit.coefficients[1] < 0.0 && fit.p_values[1] < 0.05) ++negative_significant;
          }
        } catch (const Error& e) {
          if (e.code() != Errc::RankDeficient && e.code() != Errc::InsufficientData) throw;
        }
      }
    }
    write("threshold_series.csv", series_out.str());
  }
  write("ols.csv", ols_out.str());

  std::optional<GroupTestReport> tests;
  std::string tests_error;
  {
    std::ostringstream out;
    out << "test,statistic,p_value,df1,df2\n";
    try {
      const auto sensitive = prevalence_sensitive_metrics(cfg.sweep.betas);
      const auto robust = prevalence_robust_metrics();
      tests = variance_group_tests(ranks, sensitive, robust);
      for (const auto& t : tests->results) {
        out << t.test_name << ',' << csv::format_double(t.statistic) << ','
            << csv::format_double(t.p_value);
        for (std::size_t i = 0; i < 2; ++i) {
          out << ',';
          if (i < t.degrees_of_freedom.size()) out << csv::format_double(t.degrees_of_freedom[i]);
        }
        out << '\n';
      }
    } catch (const Error& e) {
      tests_error = e.what();
    }
    write("tests.csv", out.str());
  }

  const auto chain = dataset_chain(data, cfg.sweep);
  {
    const auto base = correlation_matrix(data);
    std::ostringstream out;
    out << "iteration,prevalence,max_abs_deviation\n";
    for (const auto& e : chain.entries) {
      out << e.iteration << ',' << csv::format_double(prevalence(e.data)) << ','
          << csv::format_double(max_abs_deviation(base, correlation_matrix(e.data))) << '\n';
    }
    write("correlations.csv", out.str());
  }

  {
    Json summary;
    summary["seed"] = cfg.sweep.seed.value;
    summary["dataset"] = cfg.dataset.empty() ? "synthetic" : cfg.dataset;
    summary["rows"] = data.rows();
    summary["scenarios"] = result.scenarios.size();
    summary["records"] = outputs.records;
    summary["reducing_phase"] = phase_json(result.down);
    summary["increasing_phase"] = phase_json(result.up);
    if (!result.scenarios.empty()) {
      auto [lo, hi] = std::minmax_element(
          result.scenarios.begin(), result.scenarios.end(),
          [](const auto& a, const auto& b) { return a.test_prevalence < b.test_prevalence; });
      summary["test_prevalence_range"] = {lo->test_prevalence, hi->test_prevalence};
    }
    if (tests) {
      Json t;
      t["sensitive_rank_variance"] = number(tests->sensitive_rank_variance);
      t["robust_rank_variance"] = number(tests->robust_rank_variance);
      for (const auto& r : tests->results) t[r.test_name] = number(r.p_value);
      t["excluded_groups"] = tests->excluded_groups;
      summary["variance_tests"] = t;
    } else {
      summary["variance_tests"] = {{"error", tests_error}};
    }
    if (full) {
      summary["threshold_slopes"] = {{"fitted", fitted},
                                     {"negative_significant", negative_significant}};
    }
    Json behavior = Json::object();
    if (result.scenarios.size() >= 4) {
      for (const auto& b : classify_prevalence_behavior(ranked)) {
        behavior[b.metric.name()] = {{"class", behavior_name(b.behavior)},
                                     {"linear", number(b.linear)},
                                     {"quadratic", number(b.quadratic)},
                                     {"linear_p", number(b.linear_p)},
                                     {"quadratic_p", number(b.quadratic_p)}};
      }
    }
    summary["prevalence_behavior"] = behavior;
    write("summary.json", summary.dump(2) + "\n");
  }

  {
    Json manifest;
    manifest["tool"] = "prevsim";
    manifest["seed"] = cfg.sweep.seed.value;
    manifest["config"] = format_config(cfg);
    Json files = Json::array();
    for (const auto& f : outputs.files) files.push_back(f.filename().string());
    files.push_back("manifest.json");
    manifest["files"] = files;
    write("manifest.json", manifest.dump(2) + "\n");
  }
  return outputs;
}

void cmd_synth(std::size_t n, std::size_t features, double prevalence, double separation,
               Seed seed, const std::filesystem::path& out) {
  write_csv(synth_dataset(n, features, prevalence, separation, seed), out);
}

}  // namespace prevsim

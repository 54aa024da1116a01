#include "prevsim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "prevsim/csv.hpp"
#include "prevsim/error.hpp"

namespace prevsim {
namespace {

struct Attempt {
  std::optional<ScenarioResult> result;
  std::string error;
};

Attempt attempt_scenario(int iteration, const Dataset& ds, const SweepConfig& cfg) {
  Attempt a;
  try {
    a.result = evaluate_scenario(iteration, ds, cfg);
  } catch (const Error& e) {
    if (e.code() != Errc::SingleClass && e.code() != Errc::DegenerateSplit) throw;
    a.error = e.what();
  }
  return a;
}

/// Evaluates entries in `batch`-sized groups so the stop decision never depends
/// on scheduling: every iteration up to the first stopping one is kept.
std::vector<Attempt> evaluate_batch(std::span<const ChainEntry* const> entries,
                                    const SweepConfig& cfg, std::size_t workers) {
  std::vector<Attempt> out(entries.size());
  if (workers <= 1 || entries.size() <= 1) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out[i] = attempt_scenario(entries[i]->iteration, entries[i]->data, cfg);
    }
    return out;
  }
  std::vector<std::exception_ptr> errors(entries.size());
  std::vector<std::thread> threads;
  threads.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    threads.emplace_back([&, i] {
      try {
        out[i] = attempt_scenario(entries[i]->iteration, entries[i]->data, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

const ModelEvaluation* find_model(const ScenarioResult& s, ModelKind kind) {
  for (const auto& m : s.models) {
    if (m.model == kind) return &m;
  }
  return nullptr;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

/// Reason to stop after this scenario, or empty.
std::string stop_reason(const ScenarioResult& s, const SweepConfig& cfg, bool reducing) {
  if (!cfg.champion) return {};
  const auto* champ = find_model(s, *cfg.champion);
  if (champ == nullptr) return {};
  const auto& cm = champ->at_cutoff;
  if (reducing) {
    const double tpr = metric(cm, MetricKind::TPR);
    if (tpr < cfg.stop_tpr_low) {
      return std::string(model_name(*cfg.champion)) + " TPR " + fmt(tpr) + " below " +
             fmt(cfg.stop_tpr_low) + " at iteration " + std::to_string(s.iteration);
    }
  } else {
    const double tnr = metric(cm, MetricKind::TNR);
    if (tnr < cfg.stop_tnr_low) {
      return std::string(model_name(*cfg.champion)) + " TNR " + fmt(tnr) + " below " +
             fmt(cfg.stop_tnr_low) + " at iteration " + std::to_string(s.iteration);
    }
  }
  return {};
}

void run_phase(std::vector<const ChainEntry*> entries, bool reducing, const SweepConfig& cfg,
               std::size_t workers, PhaseSummary& summary, std::vector<ScenarioResult>& out) {
  const std::size_t batch = std::max<std::size_t>(1, workers);
  std::size_t done = 0;
  for (std::size_t start = 0; start < entries.size(); start += batch) {
    const auto count = std::min(batch, entries.size() - start);
    auto attempts = evaluate_batch(std::span(entries).subspan(start, count), cfg, workers);
    for (auto& a : attempts) {
      if (!a.result) {
        summary.stop_reason = a.error;
        summary.completed = done;
        return;
      }
      auto reason = stop_reason(*a.result, cfg, reducing);
      out.push_back(std::move(*a.result));
      ++done;
      if (!reason.empty()) {
        summary.stop_reason = std::move(reason);
        summary.completed = done;
        return;
      }
    }
  }
  summary.completed = done;
}

}  // namespace

void SweepConfig::validate() const {
  if (step < 1) throw Error(Errc::InvalidConfig, "step must be at least 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(Errc::InvalidConfig, "test_fraction must lie in (0, 1)");
  }
  if (cv_folds < 2) throw Error(Errc::InvalidConfig, "cv_folds must be at least 2");
  for (double t : {stop_tpr_low, stop_tnr_low}) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::InvalidConfig, "stop thresholds must lie in [0, 1]");
  }
  if (models.empty()) throw Error(Errc::InvalidConfig, "at least one model is required");
  for (std::size_t i = 0; i < models.size(); ++i) {
    models[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (models[j].kind == models[i].kind) {
        throw Error(Errc::InvalidConfig,
                    "model " + std::string(model_name(models[i].kind)) + " listed twice");
      }
    }
  }
  for (double b : betas) {
    if (!(b > 0.0) || !std::isfinite(b)) throw Error(Errc::InvalidConfig, "betas must be positive");
  }
}

DatasetChain dataset_chain(const Dataset& ds, const SweepConfig& cfg) {
  cfg.validate();
  DatasetChain chain;
  chain.down.requested = cfg.max_down;
  chain.up.requested = cfg.max_up;

  std::vector<ChainEntry> down;
  const Dataset* previous = &ds;
  for (std::size_t i = 1; i <= cfg.max_down; ++i) {
    const int it = -static_cast<int>(i);
    try {
      down.push_back({it, swap_step(*previous, cfg.step, SwapDirection::ReducePrevalence,
                                    derive_seed(cfg.seed, it))});
    } catch (const Error& e) {
      if (e.code() != Errc::ClassExhausted) throw;
      chain.down.stop_reason = "iteration " + std::to_string(it) + ": " + e.what();
      break;
    }
    previous = &down.back().data;
  }
  chain.down.completed = down.size();

  std::vector<ChainEntry> up;
  previous = &ds;
  for (std::size_t i = 1; i <= cfg.max_up; ++i) {
    const int it = static_cast<int>(i);
    try {
      up.push_back({it, swap_step(*previous, cfg.step, SwapDirection::IncreasePrevalence,
                                  derive_seed(cfg.seed, it))});
    } catch (const Error& e) {
      if (e.code() != Errc::ClassExhausted) throw;
      chain.up.stop_reason = "iteration " + std::to_string(it) + ": " + e.what();
      break;
    }
    previous = &up.back().data;
  }
  chain.up.completed = up.size();

  chain.entries.reserve(down.size() + 1 + up.size());
  for (auto it = down.rbegin(); it != down.rend(); ++it) chain.entries.push_back(std::move(*it));
  chain.entries.push_back({0, ds});
  for (auto& e : up) chain.entries.push_back(std::move(e));
  return chain;
}

ScenarioResult evaluate_scenario(int iteration, const Dataset& ds, const SweepConfig& cfg) {
  const Seed seed = derive_seed(cfg.seed, iteration);
  const auto split = train_test_split(ds, cfg.test_fraction, seed);
  ScenarioResult result;
  result.iteration = iteration;
  result.n = ds.rows();
  result.positives = ds.positives();
  result.test_prevalence = prevalence(split.test);

  for (const auto& spec : cfg.models) {
    ScoredPredictions sp;
    sp.labels = split.test.labels();
    ModelEvaluation eval;
    eval.model = spec.kind;
    if (spec.kind == ModelKind::RandomGuess) {
      eval.chosen = spec.grid.front();
      sp.scores = random_guess_scores(result.test_prevalence, split.test.rows(), seed);
    } else {
      const auto model = train(spec, split.train, cfg.cv_folds, seed);
      eval.chosen = model.chosen();
      sp.scores = predict_proba(model, split.test.features());
    }
    const auto pos = sp.positives();
    eval.auc = (pos == 0 || pos == sp.size()) ? std::numeric_limits<double>::quiet_NaN() : auc(sp);

    eval.grid_thresholds = {kCutoff};
    if (cfg.threshold_mode == ThresholdMode::FullGrid) {
      auto ts = thresholds(sp);
      if (!std::binary_search(ts.begin(), ts.end(), kCutoff, std::greater<>())) {
        ts.insert(std::lower_bound(ts.begin(), ts.end(), kCutoff, std::greater<>()), kCutoff);
      }
      eval.grid_thresholds = std::move(ts);
    }
    eval.grid = apply_thresholds(sp, eval.grid_thresholds);
    const auto cut = std::find(eval.grid_thresholds.begin(), eval.grid_thresholds.end(), kCutoff);
    eval.at_cutoff = eval.grid[static_cast<std::size_t>(cut - eval.grid_thresholds.begin())];
    result.models.push_back(std::move(eval));
  }
  return result;
}

SweepResult run_sweep(const Dataset& ds, const SweepConfig& cfg) {
  auto chain = dataset_chain(ds, cfg);
  std::size_t workers = cfg.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

  SweepResult result;
  result.betas = cfg.betas;
  result.metric_options = cfg.metric_options;
  result.down = chain.down;
  result.up = chain.up;

  const ChainEntry* origin = nullptr;
  std::vector<const ChainEntry*> down, up;
  for (const auto& e : chain.entries) {
    if (e.iteration < 0) down.push_back(&e);
    if (e.iteration == 0) origin = &e;
    if (e.iteration > 0) up.push_back(&e);
  }
  std::reverse(down.begin(), down.end());  // -1, -2, ...

  std::vector<ScenarioResult> origin_result, down_results, up_results;
  origin_result.push_back(evaluate_scenario(0, origin->data, cfg));
  PhaseSummary down_summary = result.down, up_summary = result.up;
  run_phase(down, true, cfg, workers, down_summary, down_results);
  run_phase(up, false, cfg, workers, up_summary, up_results);
  if (down_summary.stop_reason.empty()) down_summary.stop_reason = chain.down.stop_reason;
  if (up_summary.stop_reason.empty()) up_summary.stop_reason = chain.up.stop_reason;
  result.down = down_summary;
  result.up = up_summary;

  for (auto it = down_results.rbegin(); it != down_results.rend(); ++it) {
    result.scenarios.push_back(std::move(*it));
  }
  result.scenarios.push_back(std::move(origin_result.front()));
  for (auto& s : up_results) result.scenarios.push_back(std::move(s));
  return result;
}

void for_each_record(const SweepResult& result,
                     const std::function<void(const EvalRecord&)>& sink) {
  const auto metrics = threshold_metrics(result.betas);
  EvalRecord rec;
  for (const auto& s : result.scenarios) {
    rec.iteration = s.iteration;
    rec.test_prevalence = s.test_prevalence;
    for (const auto& m : s.models) {
      rec.model = m.model;
      rec.metric = MetricKind::AUC;
      rec.threshold.reset();
      rec.value = m.auc;
      sink(rec);
      for (std::size_t t = 0; t < m.grid_thresholds.size(); ++t) {
        rec.threshold = m.grid_thresholds[t];
        for (const auto& id : metrics) {
          rec.metric = id;
          rec.value = metric(m.grid[t], id, result.metric_options);
          sink(rec);
        }
      }
    }
  }
}

std::vector<EvalRecord> records(const SweepResult& result) {
  std::vector<EvalRecord> out;
  for_each_record(result, [&](const EvalRecord& r) { out.push_back(r); });
  return out;
}

}  // namespace prevsim

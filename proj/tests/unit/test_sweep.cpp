#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "prevsim/error.hpp"
#include "prevsim/sweep.hpp"

using namespace prevsim;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.step = 10;
  cfg.max_down = 3;
  cfg.max_up = 3;
  cfg.cv_folds = 3;
  cfg.workers = 1;
  cfg.seed = Seed{77};
  cfg.models = {
      {ModelKind::LogisticRegression, {{}}},
      {ModelKind::LDA, {{}}},
      {ModelKind::KNN, {{.neighbors = 5}, {.neighbors = 9}}},
      {ModelKind::DecisionTree, {{.max_depth = 3}}},
      {ModelKind::RandomForest, {{.max_depth = 3, .trees = 8}}},
      {ModelKind::GradientBoosting, {{.rounds = 20, .learning_rate = 0.1}}},
      {ModelKind::RandomGuess, {{}}},
  };
  return cfg;
}

const Dataset& small_data() {
  static const Dataset ds = synth_dataset(400, 3, 0.45, 1.0, Seed{77});
  return ds;
}

using RecordKey = std::tuple<int, ModelKind, std::string, double>;

std::map<RecordKey, double> keyed(const std::vector<EvalRecord>& recs) {
  std::map<RecordKey, double> out;
  for (const auto& r : recs) {
    out[{r.iteration, r.model, r.metric.name(), r.threshold.value_or(-1.0)}] = r.value;
  }
  return out;
}

}  // namespace

TEST(Config, Validation) {
  EXPECT_NO_THROW(SweepConfig{}.validate());
  auto cfg = SweepConfig{};
  cfg.step = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = SweepConfig{};
  cfg.test_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = SweepConfig{};
  cfg.cv_folds = 1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = SweepConfig{};
  cfg.models.push_back(ModelSpec::defaults(ModelKind::LDA));
  EXPECT_THROW(cfg.validate(), Error);
  cfg = SweepConfig{};
  cfg.betas = {0.0};
  EXPECT_THROW(cfg.validate(), Error);
  cfg = SweepConfig{};
  cfg.models.clear();
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Chain, ConstantSizeAndMonotonePrevalence) {
  const auto ds = synth_dataset(6214, 2, 2775.0 / 6214.0, 1.0, Seed{1});
  SweepConfig cfg;
  cfg.max_down = 76;
  cfg.max_up = 79;
  const auto chain = dataset_chain(ds, cfg);
  ASSERT_EQ(chain.entries.size(), 156u);
  EXPECT_EQ(chain.down.completed, 76u);
  EXPECT_EQ(chain.up.completed, 79u);
  for (std::size_t k = 0; k < chain.entries.size(); ++k) {
    const auto& e = chain.entries[k];
    EXPECT_EQ(e.data.rows(), 6214u);
    EXPECT_EQ(e.iteration, static_cast<int>(k) - 76);
    EXPECT_EQ(e.data.positives(), static_cast<std::size_t>(2775 + 30 * e.iteration));
    if (k > 0) {
      EXPECT_NEAR(prevalence(e.data) - prevalence(chain.entries[k - 1].data), 30.0 / 6214.0,
                  1e-12);
    }
  }
  EXPECT_EQ(chain.entries.front().data.positives(), 495u);
  EXPECT_NEAR(prevalence(chain.entries.front().data), 0.08, 0.001);
  EXPECT_EQ(chain.entries.back().data.positives(), 5145u);
  EXPECT_NEAR(prevalence(chain.entries.back().data), 0.83, 0.003);
}

TEST(Chain, Deterministic) {
  const auto cfg = small_config();
  const auto a = dataset_chain(small_data(), cfg);
  const auto b = dataset_chain(small_data(), cfg);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    EXPECT_EQ(a.entries[k].data.labels(), b.entries[k].data.labels());
    EXPECT_EQ(a.entries[k].data.features(), b.entries[k].data.features());
  }
}

TEST(Chain, ExhaustedPhaseIsTruncatedWithReason) {
  const auto ds = synth_dataset(100, 2, 0.25, 1.0, Seed{2});
  auto cfg = small_config();
  cfg.max_down = 5;
  cfg.max_up = 1;
  const auto chain = dataset_chain(ds, cfg);
  EXPECT_EQ(chain.down.requested, 5u);
  EXPECT_EQ(chain.down.completed, 2u);
  EXPECT_NE(chain.down.stop_reason.find("iteration -3"), std::string::npos);
  EXPECT_EQ(chain.up.completed, 1u);
  EXPECT_TRUE(chain.up.stop_reason.empty());
  EXPECT_EQ(chain.entries.front().iteration, -2);
}

TEST(Sweep, OriginOnly) {
  auto cfg = small_config();
  cfg.max_down = 0;
  cfg.max_up = 0;
  const auto result = run_sweep(small_data(), cfg);
  ASSERT_EQ(result.scenarios.size(), 1u);
  EXPECT_EQ(result.scenarios[0].iteration, 0);
  std::set<int> iterations;
  for (const auto& r : records(result)) iterations.insert(r.iteration);
  EXPECT_EQ(iterations, std::set<int>{0});
}

TEST(Sweep, ScenariosAndRecordCompleteness) {
  const auto cfg = small_config();
  const auto result = run_sweep(small_data(), cfg);
  ASSERT_EQ(result.scenarios.size(), 7u);
  for (std::size_t k = 0; k < result.scenarios.size(); ++k) {
    const auto& s = result.scenarios[k];
    EXPECT_EQ(s.iteration, static_cast<int>(k) - 3);
    EXPECT_EQ(s.n, 400u);
    EXPECT_EQ(s.models.size(), 7u);
  }
  const auto recs = records(result);
  const auto metrics = threshold_metrics(cfg.betas);
  EXPECT_EQ(recs.size(), 7u * 7u * (1 + metrics.size()));

  std::map<std::tuple<int, ModelKind, std::string>, int> seen;
  for (const auto& r : recs) {
    if (r.metric.kind() == MetricKind::AUC) {
      EXPECT_FALSE(r.threshold.has_value());
    } else {
      ASSERT_TRUE(r.threshold.has_value());
      EXPECT_EQ(*r.threshold, 0.5);
    }
    ++seen[{r.iteration, r.model, r.metric.name()}];
  }
  for (const auto& [key, count] : seen) EXPECT_EQ(count, 1);
  EXPECT_EQ(seen.size(), recs.size());
}

TEST(Sweep, RecordOrder) {
  const auto cfg = small_config();
  auto one = cfg;
  one.max_down = 1;
  one.max_up = 0;
  const auto recs = records(run_sweep(small_data(), one));
  const auto per_model = 1 + threshold_metrics(cfg.betas).size();
  ASSERT_EQ(recs.size(), 2 * 7 * per_model);
  EXPECT_EQ(recs.front().iteration, -1);
  EXPECT_EQ(recs.back().iteration, 0);
  for (std::size_t m = 0; m < 7; ++m) {
    const auto& head = recs[m * per_model];
    EXPECT_EQ(head.model, cfg.models[m].kind);
    EXPECT_EQ(head.metric, MetricId(MetricKind::AUC));
    EXPECT_EQ(recs[m * per_model + 1].metric, MetricId(MetricKind::TP));
  }
}

TEST(Sweep, CutoffMatrixMatchesRecords) {
  auto cfg = small_config();
  cfg.max_down = cfg.max_up = 0;
  const auto result = run_sweep(small_data(), cfg);
  for (const auto& m : result.scenarios[0].models) {
    EXPECT_EQ(m.at_cutoff.n(), 80u);
    EXPECT_EQ(m.grid.size(), 1u);
    EXPECT_EQ(m.grid[0], m.at_cutoff);
  }
}

TEST(Sweep, FullGridThresholds) {
  auto cfg = small_config();
  cfg.max_down = cfg.max_up = 0;
  cfg.threshold_mode = ThresholdMode::FullGrid;
  const auto result = run_sweep(small_data(), cfg);
  auto cutoff_cfg = cfg;
  cutoff_cfg.threshold_mode = ThresholdMode::CutoffOnly;
  const auto cutoff = run_sweep(small_data(), cutoff_cfg);
  for (std::size_t i = 0; i < result.scenarios[0].models.size(); ++i) {
    const auto& m = result.scenarios[0].models[i];
    EXPECT_TRUE(std::is_sorted(m.grid_thresholds.rbegin(), m.grid_thresholds.rend()));
    EXPECT_EQ(std::adjacent_find(m.grid_thresholds.begin(), m.grid_thresholds.end()),
              m.grid_thresholds.end());
    EXPECT_EQ(std::count(m.grid_thresholds.begin(), m.grid_thresholds.end(), 0.5), 1);
    EXPECT_EQ(m.grid.size(), m.grid_thresholds.size());
    EXPECT_EQ(m.grid.front().tp + m.grid.front().fp, 0u);
    EXPECT_EQ(m.at_cutoff, cutoff.scenarios[0].models[i].at_cutoff);
    EXPECT_EQ(m.auc, cutoff.scenarios[0].models[i].auc);
  }
}

TEST(Sweep, WorkerCountDoesNotChangeResults) {
  auto cfg = small_config();
  const auto serial = keyed(records(run_sweep(small_data(), cfg)));
  cfg.workers = 3;
  const auto parallel = keyed(records(run_sweep(small_data(), cfg)));
  ASSERT_EQ(serial.size(), parallel.size());
  for (const auto& [key, value] : serial) {
    const auto it = parallel.find(key);
    ASSERT_NE(it, parallel.end());
    if (std::isnan(value)) {
      EXPECT_TRUE(std::isnan(it->second));
    } else {
      EXPECT_EQ(it->second, value);
    }
  }
}

TEST(Sweep, ChampionStopEndsPhase) {
  auto cfg = small_config();
  cfg.stop_tpr_low = 1.0;  // any TPR below 1 stops the reducing phase
  cfg.stop_tnr_low = 0.0;
  const auto result = run_sweep(small_data(), cfg);
  EXPECT_EQ(result.down.completed, 1u);
  EXPECT_NE(result.down.stop_reason.find("GradientBoosting TPR"), std::string::npos);
  EXPECT_NE(result.down.stop_reason.find("iteration -1"), std::string::npos);
  EXPECT_EQ(result.up.completed, 3u);
  EXPECT_EQ(result.scenarios.front().iteration, -1);

  cfg.champion.reset();
  EXPECT_EQ(run_sweep(small_data(), cfg).down.completed, 3u);
}

TEST(Sweep, TestPrevalenceTracksChain) {
  const auto result = run_sweep(small_data(), small_config());
  for (const auto& s : result.scenarios) {
    EXPECT_NEAR(s.test_prevalence, static_cast<double>(s.positives) / 400.0, 0.12);
  }
  EXPECT_LT(result.scenarios.front().positives, result.scenarios.back().positives);
}

#include "prevsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "prevsim/csv.hpp"
#include "prevsim/error.hpp"

namespace prevsim {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_integer(const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(Errc::InvalidConfig, "'" + text + "' is not a non-negative integer");
  }
  return value;
}

double parse_real(const std::string& text) {
  const auto v = csv::parse_double(text);
  if (!v) throw Error(Errc::InvalidConfig, "'" + text + "' is not a number");
  return *v;
}

bool parse_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw Error(Errc::InvalidConfig, "'" + text + "' is not true or false");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& text, F parse_one) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_one(item));
  return out;
}

std::string join_reals(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += csv::format_double(values[i]);
  }
  return out;
}

template <typename T>
std::string join_ints(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  return out;
}

/// Grid axes as they appear in the file; grids are their cartesian products.
struct GridAxes {
  std::vector<int> knn_neighbors;
  std::vector<int> tree_depths;
  std::vector<int> forest_trees;
  std::vector<int> forest_depths;
  std::vector<int> boosting_rounds;
  std::vector<double> boosting_rates;
};

template <typename T>
void push_unique(std::vector<T>& values, T v) {
  if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
}

GridAxes axes_of(const std::vector<ModelSpec>& specs) {
  GridAxes axes;
  for (auto kind : kAllModelKinds) {
    const ModelSpec* spec = nullptr;
    for (const auto& s : specs) {
      if (s.kind == kind) spec = &s;
    }
    const ModelSpec fallback = ModelSpec::defaults(kind);
    if (spec == nullptr) spec = &fallback;
    for (const auto& hp : spec->grid) {
      switch (kind) {
        case ModelKind::KNN: push_unique(axes.knn_neighbors, hp.neighbors); break;
        case ModelKind::DecisionTree: push_unique(axes.tree_depths, hp.max_depth); break;
        case ModelKind::RandomForest:
          push_unique(axes.forest_trees, hp.trees);
          push_unique(axes.forest_depths, hp.max_depth);
          break;
        case ModelKind::GradientBoosting:
          push_unique(axes.boosting_rounds, hp.rounds);
          push_unique(axes.boosting_rates, hp.learning_rate);
          break;
        default: break;
      }
    }
  }
  return axes;
}

std::vector<ModelSpec> specs_from(const std::vector<ModelKind>& kinds, const GridAxes& axes) {
  std::vector<ModelSpec> specs;
  for (auto kind : kinds) {
    ModelSpec spec{kind, {}};
    switch (kind) {
      case ModelKind::KNN:
        for (int k : axes.knn_neighbors) spec.grid.push_back({.neighbors = k});
        break;
      case ModelKind::DecisionTree:
        for (int d : axes.tree_depths) spec.grid.push_back({.max_depth = d});
        break;
      case ModelKind::RandomForest:
        for (int t : axes.forest_trees) {
          for (int d : axes.forest_depths) spec.grid.push_back({.max_depth = d, .trees = t});
        }
        break;
      case ModelKind::GradientBoosting:
        for (int r : axes.boosting_rounds) {
          for (double lr : axes.boosting_rates) {
            spec.grid.push_back({.rounds = r, .learning_rate = lr});
          }
        }
        break;
      default: spec.grid.push_back({}); break;
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

struct Key {
  std::string_view name;
  std::string_view comment;
};

constexpr Key kKeys[] = {
    {"dataset", "CSV input; empty means a synthetic dataset from the synth.* keys"},
    {"label_column", "label column of the input CSV"},
    {"positive_label", "label value treated as the positive class"},
    {"output_dir", "directory receiving every report"},
    {"synth.n", "rows of the synthetic dataset"},
    {"synth.features", "Gaussian features of the synthetic dataset"},
    {"synth.prevalence", "share of positives in the synthetic dataset"},
    {"synth.separation", "mean shift of every feature for positives"},
    {"seed", "root of all randomness"},
    {"step", "rows swapped between the classes per iteration"},
    {"max_down", "cap on prevalence-reducing iterations"},
    {"max_up", "cap on prevalence-increasing iterations"},
    {"stop_tpr_low", "reducing phase stops once the champion's test TPR falls below this"},
    {"stop_tnr_low", "increasing phase stops once the champion's test TNR falls below this"},
    {"champion", "model driving the early stop, or none"},
    {"test_fraction", "holdout share of each scenario"},
    {"cv_folds", "cross-validation folds for grid selection"},
    {"betas", "one FBeta metric per value"},
    {"threshold_mode", "cutoff (0.5 only) or full (every distinct test score)"},
    {"dor_continuity_correction", "add 0.5 to every cell before the diagnostic odds ratio"},
    {"workers", "threads evaluating iterations; 0 uses every core"},
    {"models", "models to train, in report order"},
    {"knn.neighbors", "KNN grid"},
    {"tree.max_depth", "DecisionTree grid"},
    {"forest.trees", "RandomForest grid (crossed with forest.max_depth)"},
    {"forest.max_depth", "RandomForest grid"},
    {"boosting.rounds", "GradientBoosting grid (crossed with boosting.learning_rate)"},
    {"boosting.learning_rate", "GradientBoosting grid"},
};

std::map<std::string, std::string> values_of(const RunConfig& cfg) {
  const auto& s = cfg.sweep;
  const auto axes = axes_of(s.models);
  std::string models;
  for (std::size_t i = 0; i < s.models.size(); ++i) {
    if (i) models += ", ";
    models += model_name(s.models[i].kind);
  }
  return {
      {"dataset", cfg.dataset},
      {"label_column", cfg.label_column},
      {"positive_label", cfg.positive_label},
      {"output_dir", cfg.output_dir},
      {"synth.n", std::to_string(cfg.synth_n)},
      {"synth.features", std::to_string(cfg.synth_features)},
      {"synth.prevalence", csv::format_double(cfg.synth_prevalence)},
      {"synth.separation", csv::format_double(cfg.synth_separation)},
      {"seed", std::to_string(s.seed.value)},
      {"step", std::to_string(s.step)},
      {"max_down", std::to_string(s.max_down)},
      {"max_up", std::to_string(s.max_up)},
      {"stop_tpr_low", csv::format_double(s.stop_tpr_low)},
      {"stop_tnr_low", csv::format_double(s.stop_tnr_low)},
      {"champion", s.champion ? std::string(model_name(*s.champion)) : "none"},
      {"test_fraction", csv::format_double(s.test_fraction)},
      {"cv_folds", std::to_string(s.cv_folds)},
      {"betas", join_reals(s.betas)},
      {"threshold_mode", s.threshold_mode == ThresholdMode::FullGrid ? "full" : "cutoff"},
      {"dor_continuity_correction", s.metric_options.dor_continuity_correction ? "true" : "false"},
      {"workers", std::to_string(s.workers)},
      {"models", models},
      {"knn.neighbors", join_ints(axes.knn_neighbors)},
      {"tree.max_depth", join_ints(axes.tree_depths)},
      {"forest.trees", join_ints(axes.forest_trees)},
      {"forest.max_depth", join_ints(axes.forest_depths)},
      {"boosting.rounds", join_ints(axes.boosting_rounds)},
      {"boosting.learning_rate", join_reals(axes.boosting_rates)},
  };
}

}  // namespace

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.dataset.empty()) {
    if (cfg.synth_n < 10) problems.push_back("synth.n must be at least 10");
    if (cfg.synth_features < 1) problems.push_back("synth.features must be at least 1");
    if (!(cfg.synth_prevalence > 0.0 && cfg.synth_prevalence < 1.0)) {
      problems.push_back("synth.prevalence must lie in (0, 1)");
    }
    if (!std::isfinite(cfg.synth_separation)) problems.push_back("synth.separation must be finite");
  }
  if (cfg.output_dir.empty()) problems.push_back("output_dir must not be empty");
  if (cfg.label_column.empty()) problems.push_back("label_column must not be empty");
  try {
    cfg.sweep.validate();
  } catch (const Error& e) {
    problems.emplace_back(e.what());
  }
  if (cfg.sweep.champion) {
    bool listed = false;
    for (const auto& m : cfg.sweep.models) listed = listed || m.kind == *cfg.sweep.champion;
    if (!listed) {
      problems.push_back("champion " + std::string(model_name(*cfg.sweep.champion)) +
                         " is not among the models");
    }
  }
  return problems;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::vector<std::string> problems;
  std::set<std::string> seen;
  std::optional<std::vector<ModelKind>> kinds;
  GridAxes axes = axes_of(cfg.sweep.models);

  const std::map<std::string, std::function<void(const std::string&)>, std::less<>> setters = {
      {"dataset", [&](const std::string& v) { cfg.dataset = v; }},
      {"label_column", [&](const std::string& v) { cfg.label_column = v; }},
      {"positive_label", [&](const std::string& v) { cfg.positive_label = v; }},
      {"output_dir", [&](const std::string& v) { cfg.output_dir = v; }},
      {"synth.n", [&](const std::string& v) { cfg.synth_n = parse_integer<std::size_t>(v); }},
      {"synth.features",
       [&](const std::string& v) { cfg.synth_features = parse_integer<std::size_t>(v); }},
      {"synth.prevalence", [&](const std::string& v) { cfg.synth_prevalence = parse_real(v); }},
      {"synth.separation", [&](const std::string& v) { cfg.synth_separation = parse_real(v); }},
      {"seed", [&](const std::string& v) { cfg.sweep.seed = Seed{parse_integer<std::uint64_t>(v)}; }},
      {"step", [&](const std::string& v) { cfg.sweep.step = parse_integer<std::size_t>(v); }},
      {"max_down", [&](const std::string& v) { cfg.sweep.max_down = parse_integer<std::size_t>(v); }},
      {"max_up", [&](const std::string& v) { cfg.sweep.max_up = parse_integer<std::size_t>(v); }},
      {"stop_tpr_low", [&](const std::string& v) { cfg.sweep.stop_tpr_low = parse_real(v); }},
      {"stop_tnr_low", [&](const std::string& v) { cfg.sweep.stop_tnr_low = parse_real(v); }},
      {"champion",
       [&](const std::string& v) {
         if (v == "none") {
           cfg.sweep.champion.reset();
         } else {
           cfg.sweep.champion = parse_model_kind(v);
         }
       }},
      {"test_fraction", [&](const std::string& v) { cfg.sweep.test_fraction = parse_real(v); }},
      {"cv_folds", [&](const std::string& v) { cfg.sweep.cv_folds = parse_integer<std::size_t>(v); }},
      {"betas", [&](const std::string& v) { cfg.sweep.betas = parse_list<double>(v, parse_real); }},
      {"threshold_mode",
       [&](const std::string& v) {
         if (v == "cutoff") {
           cfg.sweep.threshold_mode = ThresholdMode::CutoffOnly;
         } else if (v == "full") {
           cfg.sweep.threshold_mode = ThresholdMode::FullGrid;
         } else {
           throw Error(Errc::InvalidConfig, "'" + v + "' is not cutoff or full");
         }
       }},
      {"dor_continuity_correction",
       [&](const std::string& v) { cfg.sweep.metric_options.dor_continuity_correction = parse_bool(v); }},
      {"workers", [&](const std::string& v) { cfg.sweep.workers = parse_integer<std::size_t>(v); }},
      {"models",
       [&](const std::string& v) {
         kinds = parse_list<ModelKind>(v, [](const std::string& s) { return parse_model_kind(s); });
       }},
      {"knn.neighbors",
       [&](const std::string& v) { axes.knn_neighbors = parse_list<int>(v, parse_integer<int>); }},
      {"tree.max_depth",
       [&](const std::string& v) { axes.tree_depths = parse_list<int>(v, parse_integer<int>); }},
      {"forest.trees",
       [&](const std::string& v) { axes.forest_trees = parse_list<int>(v, parse_integer<int>); }},
      {"forest.max_depth",
       [&](const std::string& v) { axes.forest_depths = parse_list<int>(v, parse_integer<int>); }},
      {"boosting.rounds",
       [&](const std::string& v) { axes.boosting_rounds = parse_list<int>(v, parse_integer<int>); }},
      {"boosting.learning_rate",
       [&](const std::string& v) { axes.boosting_rates = parse_list<double>(v, parse_real); }},
  };

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where + "expected key = value");
      continue;
    }
    const auto key = trim(std::string_view(content).substr(0, eq));
    const auto value = trim(std::string_view(content).substr(eq + 1));
    const auto setter = setters.find(key);
    if (setter == setters.end()) {
      problems.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (!seen.insert(key).second) {
      problems.push_back(where + "key '" + key + "' repeated");
      continue;
    }
    try {
      setter->second(value);
    } catch (const Error& e) {
      problems.push_back(where + key + ": " + e.what());
    }
  }

  cfg.sweep.models = specs_from(kinds.value_or(std::vector<ModelKind>(std::begin(kAllModelKinds),
                                                                      std::end(kAllModelKinds))),
                                axes);
  if (problems.empty()) {
    for (auto& p : validate_config(cfg)) problems.push_back(std::move(p));
  }
  if (!problems.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& p : problems) message += "\n  " + p;
    throw Error(Errc::InvalidConfig, message);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingFile, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string format_config(const RunConfig& cfg) {
  const auto values = values_of(cfg);
  std::string out =
      "# prevsim sweep configuration\n"
      "# one `key = value` per line; `#` starts a comment line; lists are comma separated\n";
  for (const auto& key : kKeys) {
    out += "\n# ";
    out += key.comment;
    out += "\n";
    out += key.name;
    out += " = ";
    out += values.at(std::string(key.name));
    out += "\n";
  }
  return out;
}

std::string print_defaults() { return format_config(RunConfig{}); }

}  // namespace prevsim

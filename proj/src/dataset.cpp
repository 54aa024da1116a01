#include "prevsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "prevsim/csv.hpp"
#include "prevsim/error.hpp"

namespace prevsim {

Dataset::Dataset(std::string name, std::vector<std::string> feature_names, Matrix features,
                 std::vector<std::uint8_t> labels)
    : name_(std::move(name)),
      feature_names_(std::move(feature_names)),
      features_(std::move(features)),
      labels_(std::move(labels)) {
  if (features_.rows() != labels_.size()) {
    throw Error(Errc::WidthMismatch, "dataset has " + std::to_string(features_.rows()) +
                                         " feature rows but " + std::to_string(labels_.size()) +
                                         " labels");
  }
  if (features_.cols() != feature_names_.size() && !(labels_.empty() && features_.empty())) {
    throw Error(Errc::WidthMismatch, "feature width does not match the number of feature names");
  }
  for (auto label : labels_) {
    if (label > 1) throw Error(Errc::InvalidArgument, "labels must be 0 or 1");
    positives_ += label;
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<std::uint8_t> labels;
  labels.reserve(indices.size());
  for (auto i : indices) labels.push_back(labels_.at(i));
  return Dataset(name_, feature_names_, features_.select_rows(indices), std::move(labels));
}

void Dataset::require_both_classes(const char* context) const {
  if (rows() < 2 || positives_ == 0 || positives_ == rows()) {
    throw Error(Errc::SingleClass,
                std::string(context) + " needs at least one positive and one negative case");
  }
}

namespace {

struct ColumnPlan {
  std::size_t source = 0;
  bool numeric = true;
  std::vector<std::string> categories;  // sorted, text columns only
};

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& positive_label) {
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::MissingFile, "dataset file not found: " + path.string());
  }
  const auto table = csv::read_file(path);

  std::size_t label_index = table.header.size();
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] != label_column) continue;
    if (label_index != table.header.size()) {
      throw Error(Errc::AmbiguousLabelColumn,
                  "label column '" + label_column + "' appears more than once");
    }
    label_index = c;
  }
  if (label_index == table.header.size()) {
    throw Error(Errc::MissingLabelColumn, "label column '" + label_column + "' not found");
  }
  if (table.rows.empty()) throw Error(Errc::EmptyDataset, "dataset has no rows");

  std::vector<std::uint8_t> labels;
  labels.reserve(table.rows.size());
  std::set<std::string> negatives;
  for (const auto& row : table.rows) {
    const auto& cell = row[label_index];
    if (cell == positive_label) {
      labels.push_back(1);
    } else {
      negatives.insert(cell);
      if (negatives.size() > 1) {
        throw Error(Errc::TooManyLabelValues,
                    "label column has more than two distinct values (positive '" + positive_label +
                        "', others '" + *negatives.begin() + "', '" + *negatives.rbegin() + "')");
      }
      labels.push_back(0);
    }
  }

  std::vector<ColumnPlan> plans;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == label_index) continue;
    ColumnPlan plan;
    plan.source = c;
    std::size_t parsed = 0;
    for (const auto& row : table.rows) parsed += csv::parse_double(row[c]).has_value();
    plan.numeric = 2 * parsed >= table.rows.size();
    if (!plan.numeric) {
      std::set<std::string> cats;
      for (const auto& row : table.rows) cats.insert(row[c]);
      plan.categories.assign(cats.begin(), cats.end());
    }
    plans.push_back(std::move(plan));
  }

  std::vector<std::string> names;
  for (const auto& plan : plans) {
    if (plan.numeric) {
      names.push_back(table.header[plan.source]);
    } else {
      for (const auto& cat : plan.categories) names.push_back(table.header[plan.source] + "=" + cat);
    }
  }

  Matrix features(table.rows.size(), names.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::size_t out = 0;
    for (const auto& plan : plans) {
      const auto& cell = table.rows[r][plan.source];
      if (plan.numeric) {
        const auto value = csv::parse_double(cell);
        if (!value || !std::isfinite(*value)) {
          throw Error(Errc::UnparsableNumeric, "cannot parse '" + cell + "' in numeric column '" +
                                                   table.header[plan.source] + "' at data row " +
                                                   std::to_string(r + 1));
        }
        features(r, out++) = *value;
      } else {
        const auto it = std::lower_bound(plan.categories.begin(), plan.categories.end(), cell);
        const auto hit = static_cast<std::size_t>(it - plan.categories.begin());
        for (std::size_t k = 0; k < plan.categories.size(); ++k) {
          features(r, out++) = k == hit ? 1.0 : 0.0;
        }
      }
    }
  }
  return Dataset(path.stem().string(), std::move(names), std::move(features), std::move(labels));
}

void write_csv(const Dataset& ds, const std::filesystem::path& path,
               const std::string& label_column, const std::string& positive_label,
               const std::string& negative_label) {
  std::string out;
  auto header = ds.feature_names();
  header.push_back(label_column);
  out += csv::join(header);
  out.push_back('\n');
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (double v : ds.features().row(r)) {
      out += csv::format_double(v);
      out.push_back(',');
    }
    out += csv::escape(ds.labels()[r] ? positive_label : negative_label);
    out.push_back('\n');
  }
  csv::write_atomic(path, out);
}

double prevalence(const Dataset& ds) {
  if (ds.rows() == 0) throw Error(Errc::EmptyDataset, "prevalence of an empty dataset");
  return static_cast<double>(ds.positives()) / static_cast<double>(ds.rows());
}

Split train_test_split(const Dataset& ds, double test_fraction, Seed seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(Errc::DegenerateSplit, "test fraction must lie strictly between 0 and 1");
  }
  const auto n = ds.rows();
  const auto test_size =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (test_size == 0 || test_size >= n) {
    throw Error(Errc::DegenerateSplit, "test fraction " + std::to_string(test_fraction) +
                                           " of " + std::to_string(n) +
                                           " rows leaves an empty partition");
  }
  Rng rng(seed, Stream::Split);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_size));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(test_size), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {ds.subset(train), ds.subset(test)};
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, Seed seed) {
  if (k < 2 || k > n) {
    throw Error(Errc::InvalidArgument, "fold count " + std::to_string(k) +
                                           " must lie in [2, " + std::to_string(n) + "]");
  }
  Rng rng(seed, Stream::Folds);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

Dataset swap_step(const Dataset& ds, std::size_t k, SwapDirection direction, Seed seed) {
  if (k == 0) return ds;
  const std::uint8_t shrinking = direction == SwapDirection::ReducePrevalence ? 1 : 0;
  std::vector<std::size_t> shrink_rows, grow_rows;
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    (ds.labels()[r] == shrinking ? shrink_rows : grow_rows).push_back(r);
  }
  if (shrink_rows.size() <= k) {
    throw Error(Errc::ClassExhausted,
                std::string(shrinking ? "positive" : "negative") + " class has " +
                    std::to_string(shrink_rows.size()) + " rows; a step of " + std::to_string(k) +
                    " needs at least " + std::to_string(k + 1));
  }
  if (grow_rows.empty()) {
    throw Error(Errc::ClassExhausted, "no rows of the growing class to resample");
  }

  Rng rng(seed, Stream::Swap);
  std::vector<bool> dropped(ds.rows(), false);
  for (auto pick : rng.sample_without_replacement(shrink_rows.size(), k)) {
    dropped[shrink_rows[pick]] = true;
  }
  std::vector<std::size_t> keep;
  keep.reserve(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    if (!dropped[r]) keep.push_back(r);
  }
  for (std::size_t i = 0; i < k; ++i) {
    keep.push_back(grow_rows[static_cast<std::size_t>(rng.below(grow_rows.size()))]);
  }
  return ds.subset(keep);
}

CorrelationMatrix correlation_matrix(const Dataset& ds) {
  const auto n = ds.rows();
  if (n < 2) throw Error(Errc::InsufficientData, "correlation needs at least two rows");
  const auto d = ds.cols() + 1;

  // Column-major copy with the label as the final column.
  std::vector<std::vector<double>> columns(d, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = ds.features().row(r);
    for (std::size_t c = 0; c + 1 < d; ++c) columns[c][r] = row[c];
    columns[d - 1][r] = ds.labels()[r];
  }
  std::vector<double> norms(d);
  for (auto& col : columns) {
    const double m = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    for (auto& v : col) v -= m;
  }
  for (std::size_t c = 0; c < d; ++c) {
    norms[c] = std::sqrt(std::inner_product(columns[c].begin(), columns[c].end(),
                                            columns[c].begin(), 0.0));
  }

  CorrelationMatrix out;
  out.dimension = d;
  out.names = ds.feature_names();
  out.names.push_back("label");
  out.entries.assign(d * d, 0.0);
  out.constant.resize(d);
  for (std::size_t c = 0; c < d; ++c) out.constant[c] = norms[c] == 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (out.constant[i]) continue;
    out.entries[i * d + i] = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      if (out.constant[j]) continue;
      double r = std::inner_product(columns[i].begin(), columns[i].end(), columns[j].begin(), 0.0) /
                 (norms[i] * norms[j]);
      r = std::clamp(r, -1.0, 1.0);
      out.entries[i * d + j] = r;
      out.entries[j * d + i] = r;
    }
  }
  return out;
}

double max_abs_deviation(const CorrelationMatrix& a, const CorrelationMatrix& b) {
  if (a.dimension != b.dimension) {
    throw Error(Errc::WidthMismatch, "correlation matrices differ in dimension");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    worst = std::max(worst, std::abs(a.entries[i] - b.entries[i]));
  }
  return worst;
}

Dataset synth_dataset(std::size_t n, std::size_t n_features, double prevalence,
                      double separation, Seed seed) {
  if (n < 10) throw Error(Errc::InvalidArgument, "synthetic dataset needs n >= 10");
  if (n_features == 0) throw Error(Errc::InvalidArgument, "synthetic dataset needs a feature");
  if (!(prevalence > 0.0 && prevalence < 1.0)) {
    throw Error(Errc::InvalidArgument, "prevalence must lie strictly between 0 and 1");
  }
  const auto positives =
      static_cast<std::size_t>(std::llround(prevalence * static_cast<double>(n)));
  if (positives == 0 || positives == n) {
    throw Error(Errc::SingleClass, "prevalence " + std::to_string(prevalence) + " with n = " +
                                       std::to_string(n) + " leaves a class empty");
  }
  Rng rng(seed, Stream::Synth);
  std::vector<std::uint8_t> labels(n, 0);
  for (auto i : rng.sample_without_replacement(n, positives)) labels[i] = 1;

  Matrix features(n, n_features);
  for (std::size_t r = 0; r < n; ++r) {
    const double shift = labels[r] ? separation : 0.0;
    for (std::size_t c = 0; c < n_features; ++c) features(r, c) = rng.normal() + shift;
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < n_features; ++c) names.push_back("x" + std::to_string(c + 1));
  return Dataset("synthetic", std::move(names), std::move(features), std::move(labels));
}

}  // namespace prevsim

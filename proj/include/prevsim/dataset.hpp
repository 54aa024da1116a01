#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prevsim/matrix.hpp"
#include "prevsim/random.hpp"

namespace prevsim {

/// Feature matrix with binary labels. Immutable once constructed; the
/// constructor enforces that labels are 0/1 and that every row has one value
/// per feature name.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::vector<std::string> feature_names, Matrix features,
          std::vector<std::uint8_t> labels);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const Matrix& features() const noexcept { return features_; }
  const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return feature_names_.size(); }
  std::size_t positives() const noexcept { return positives_; }
  std::size_t negatives() const noexcept { return rows() - positives_; }

  /// Rows in the order given (indices may repeat).
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Throws Errc::SingleClass unless both classes are present and rows >= 2.
  void require_both_classes(const char* context) const;

 private:
  std::string name_;
  std::vector<std::string> feature_names_;
  Matrix features_;
  std::vector<std::uint8_t> labels_;
  std::size_t positives_ = 0;
};

/// Reads a CSV with a header row. Numeric columns are parsed as reals; text
/// columns are one-hot encoded (one column per category, categories in
/// lexicographic byte order, named "<column>=<category>"). A column is text
/// when fewer than half of its cells parse as numbers; otherwise any
/// unparsable cell is an error. The label maps to 1 iff it equals
/// positive_label.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& positive_label);

/// Writes features followed by the label column. Reals are written in
/// shortest round-trip form.
void write_csv(const Dataset& ds, const std::filesystem::path& path,
               const std::string& label_column = "label",
               const std::string& positive_label = "1",
               const std::string& negative_label = "0");

double prevalence(const Dataset& ds);

struct Split {
  Dataset train;
  Dataset test;
};

/// Uniform random partition with |test| = round(test_fraction * n). Rows keep
/// their original relative order inside each part.
Split train_test_split(const Dataset& ds, double test_fraction, Seed seed);

/// k disjoint folds covering [0, n), sizes differing by at most one. Indices
/// are ascending within each fold.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, Seed seed);

enum class SwapDirection { ReducePrevalence, IncreasePrevalence };

/// One constant-n prevalence step: removes k uniformly chosen rows of the
/// shrinking class and appends k rows drawn with replacement from the growing
/// class. Surviving rows keep their order; new rows go at the end.
Dataset swap_step(const Dataset& ds, std::size_t k, SwapDirection direction, Seed seed);

/// Pearson correlations over all feature columns plus the label (last).
struct CorrelationMatrix {
  std::size_t dimension = 0;
  std::vector<std::string> names;
  std::vector<double> entries;  // row-major dimension x dimension
  std::vector<bool> constant;   // columns with zero variance (correlations reported as 0)

  double at(std::size_t i, std::size_t j) const { return entries[i * dimension + j]; }
};

CorrelationMatrix correlation_matrix(const Dataset& ds);

/// Largest absolute entry-wise difference between two matrices of equal size.
double max_abs_deviation(const CorrelationMatrix& a, const CorrelationMatrix& b);

/// Two-class Gaussian data: every feature is N(0, 1) for negatives and
/// N(separation, 1) for positives. round(prevalence * n) rows are positive,
/// chosen uniformly at random.
Dataset synth_dataset(std::size_t n, std::size_t n_features, double prevalence,
                      double separation, Seed seed);

}  // namespace prevsim

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prevsim/dataset.hpp"
#include "prevsim/matrix.hpp"
#include "prevsim/random.hpp"

namespace prevsim {

enum class ModelKind : std::uint8_t {
  LogisticRegression,
  LDA,
  KNN,
  DecisionTree,
  RandomForest,
  GradientBoosting,
  RandomGuess,
};

inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::LogisticRegression, ModelKind::LDA,          ModelKind::KNN,
    ModelKind::DecisionTree,       ModelKind::RandomForest, ModelKind::GradientBoosting,
    ModelKind::RandomGuess,
};

std::string_view model_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// One grid point. Fields irrelevant to a kind stay zero.
struct HyperParams {
  int neighbors = 0;         // KNN
  int max_depth = 0;         // DecisionTree, RandomForest
  int trees = 0;             // RandomForest
  int rounds = 0;            // GradientBoosting
  double learning_rate = 0;  // GradientBoosting

  bool operator==(const HyperParams&) const = default;
};

std::string describe(ModelKind kind, const HyperParams& hp);

struct ModelSpec {
  ModelKind kind = ModelKind::LogisticRegression;
  std::vector<HyperParams> grid;

  /// Default grids: KNN k in {5, 15, 31}; trees depth {3, 5}; forest 50 trees
  /// at depth {3, 5}; boosting 100 rounds at rate 0.1; single point otherwise.
  static ModelSpec defaults(ModelKind kind);

  /// Non-empty grid with positive values in every field the kind uses.
  void validate() const;
};

std::vector<ModelSpec> default_model_specs();

/// Minimum rows in a tree leaf.
inline constexpr std::size_t kMinLeafSize = 5;

/// Fitted model interface. Implementations are immutable after fitting.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::size_t width() const = 0;
  /// Rows of `features` must have width() columns; scores lie in [0, 1].
  virtual std::vector<double> predict(const Matrix& features) const = 0;
};

/// Fits one grid point; `substream` separates the random streams of CV folds.
/// Throws Errc::SingleClass unless both classes are present (RandomGuess
/// excepted).
std::shared_ptr<const Classifier> fit_classifier(ModelKind kind, const HyperParams& hp,
                                                 const Dataset& train, Seed seed,
                                                 std::uint32_t substream = 0);

class TrainedModel {
 public:
  TrainedModel(ModelKind kind, HyperParams chosen, std::vector<double> cv_accuracy,
               std::shared_ptr<const Classifier> impl);

  ModelKind kind() const noexcept { return kind_; }
  const HyperParams& chosen() const noexcept { return chosen_; }
  /// Mean CV accuracy per grid point (empty when the grid had one point).
  const std::vector<double>& cv_accuracy() const noexcept { return cv_accuracy_; }
  std::size_t width() const { return impl_->width(); }
  const Classifier& classifier() const { return *impl_; }

 private:
  ModelKind kind_;
  HyperParams chosen_;
  std::vector<double> cv_accuracy_;
  std::shared_ptr<const Classifier> impl_;
};

/// k-fold CV over the grid (accuracy at threshold 0.5, first grid point wins
/// ties), then refits the winner on all of `train`.
TrainedModel train(const ModelSpec& spec, const Dataset& train, std::size_t folds, Seed seed);

/// Throws Errc::WidthMismatch if the feature width differs from training.
std::vector<double> predict_proba(const TrainedModel& model, const Matrix& features);

/// round(test_prevalence * n) cases, chosen without replacement, get scores
/// uniform in (0.51, 0.99); the rest get scores uniform in (0.01, 0.49).
std::vector<double> random_guess_scores(double test_prevalence, std::size_t n, Seed seed);

namespace detail {

/// Mean logistic log-loss with an L2 penalty on every weight except the
/// intercept (last element). Writes the gradient into `gradient`.
double logistic_loss(std::span<const double> weights, const Matrix& x,
                     std::span<const std::uint8_t> y, double l2, std::span<double> gradient);

/// Logistic regression with explicit weights (standardized space, intercept
/// last); used by tests to pin predictions.
std::shared_ptr<const Classifier> make_logistic(std::vector<double> mean, std::vector<double> scale,
                                                std::vector<double> weights);

}  // namespace detail

}  // namespace prevsim

#include <algorithm>
#include <cmath>
#include <sstream>

#include "internal.hpp"
#include "prevsim/csv.hpp"
#include "prevsim/error.hpp"

namespace prevsim {
namespace models {

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.mean.assign(x.cols(), 0.0);
  s.scale.assign(x.cols(), 1.0);
  if (x.rows() == 0) return s;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) s.mean[c] += x(r, c);
  }
  for (auto& m : s.mean) m /= n;
  std::vector<double> ss(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double d = x(r, c) - s.mean[c];
      ss[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const double sd = std::sqrt(ss[c] / n);
    s.scale[c] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply_row(std::span<const double> in, std::span<double> out) const {
  for (std::size_t c = 0; c < in.size(); ++c) out[c] = (in[c] - mean[c]) / scale[c];
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) apply_row(x.row(r), out.row(r));
  return out;
}

void require_width(const Classifier& model, const Matrix& features) {
  if (features.rows() > 0 && features.cols() != model.width()) {
    throw Error(Errc::WidthMismatch, "model expects " + std::to_string(model.width()) +
                                         " features, got " + std::to_string(features.cols()));
  }
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

class ConstantClassifier final : public Classifier {
 public:
  ConstantClassifier(std::size_t width, double p) : width_(width), p_(p) {}
  std::size_t width() const override { return width_; }
  std::vector<double> predict(const Matrix& features) const override {
    require_width(*this, features);
    return std::vector<double>(features.rows(), p_);
  }

 private:
  std::size_t width_;
  double p_;
};

class RandomGuessClassifier final : public Classifier {
 public:
  RandomGuessClassifier(std::size_t width, double prevalence, Seed seed)
      : width_(width), prevalence_(prevalence), seed_(seed) {}
  std::size_t width() const override { return width_; }
  std::vector<double> predict(const Matrix& features) const override {
    require_width(*this, features);
    return random_guess_scores(prevalence_, features.rows(), seed_);
  }

 private:
  std::size_t width_;
  double prevalence_;
  Seed seed_;
};

}  // namespace

std::shared_ptr<const Classifier> make_constant(std::size_t width, double probability) {
  return std::make_shared<ConstantClassifier>(width, probability);
}

std::shared_ptr<const Classifier> fit_random_guess(const Dataset& train, Seed seed) {
  return std::make_shared<RandomGuessClassifier>(train.cols(), prevalence(train), seed);
}

}  // namespace models

namespace {

struct NamedModel {
  ModelKind kind;
  std::string_view name;
};

constexpr NamedModel kModelNames[] = {
    {ModelKind::LogisticRegression, "LogisticRegression"},
    {ModelKind::LDA, "LDA"},
    {ModelKind::KNN, "KNN"},
    {ModelKind::DecisionTree, "DecisionTree"},
    {ModelKind::RandomForest, "RandomForest"},
    {ModelKind::GradientBoosting, "GradientBoosting"},
    {ModelKind::RandomGuess, "RandomGuess"},
};

double cutoff_accuracy(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    correct += static_cast<std::uint8_t>(scores[i] >= 0.5) == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

bool has_both_classes(const Dataset& ds) {
  return ds.rows() >= 2 && ds.positives() > 0 && ds.negatives() > 0;
}

}  // namespace

std::string_view model_name(ModelKind kind) {
  for (const auto& entry : kModelNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  for (const auto& entry : kModelNames) {
    if (entry.name == text) return entry.kind;
  }
  throw Error(Errc::InvalidArgument, "unknown model '" + std::string(text) + "'");
}

std::string describe(ModelKind kind, const HyperParams& hp) {
  std::ostringstream out;
  switch (kind) {
    case ModelKind::KNN: out << "k=" << hp.neighbors; break;
    case ModelKind::DecisionTree: out << "depth=" << hp.max_depth; break;
    case ModelKind::RandomForest: out << "trees=" << hp.trees << ";depth=" << hp.max_depth; break;
    case ModelKind::GradientBoosting:
      out << "rounds=" << hp.rounds << ";rate=" << csv::format_double(hp.learning_rate);
      break;
    default: out << "-"; break;
  }
  return out.str();
}

ModelSpec ModelSpec::defaults(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  switch (kind) {
    case ModelKind::KNN:
      for (int k : {5, 15, 31}) spec.grid.push_back({.neighbors = k});
      break;
    case ModelKind::DecisionTree:
      for (int depth : {3, 5}) spec.grid.push_back({.max_depth = depth});
      break;
    case ModelKind::RandomForest:
      for (int depth : {3, 5}) spec.grid.push_back({.max_depth = depth, .trees = 50});
      break;
    case ModelKind::GradientBoosting:
      spec.grid.push_back({.rounds = 100, .learning_rate = 0.1});
      break;
    default:
      spec.grid.push_back({});
      break;
  }
  return spec;
}

void ModelSpec::validate() const {
  const auto name = std::string(model_name(kind));
  if (grid.empty()) throw Error(Errc::InvalidArgument, name + " has an empty grid");
  for (const auto& hp : grid) {
    bool ok = true;
    switch (kind) {
      case ModelKind::KNN: ok = hp.neighbors > 0; break;
      case ModelKind::DecisionTree: ok = hp.max_depth > 0; break;
      case ModelKind::RandomForest: ok = hp.max_depth > 0 && hp.trees > 0; break;
      case ModelKind::GradientBoosting:
        ok = hp.rounds > 0 && hp.learning_rate > 0.0 && std::isfinite(hp.learning_rate);
        break;
      default: break;
    }
    if (!ok) {
      throw Error(Errc::InvalidArgument,
                  name + " grid point " + describe(kind, hp) + " has a non-positive value");
    }
  }
}

std::vector<ModelSpec> default_model_specs() {
  std::vector<ModelSpec> specs;
  for (auto kind : kAllModelKinds) specs.push_back(ModelSpec::defaults(kind));
  return specs;
}

std::shared_ptr<const Classifier> fit_classifier(ModelKind kind, const HyperParams& hp,
                                                 const Dataset& train, Seed seed,
                                                 std::uint32_t substream) {
  if (kind == ModelKind::RandomGuess) {
    if (train.rows() == 0) throw Error(Errc::EmptyDataset, "cannot fit on an empty dataset");
    return models::fit_random_guess(train, seed);
  }
  train.require_both_classes(model_name(kind).data());
  switch (kind) {
    case ModelKind::LogisticRegression: return models::fit_logistic(train);
    case ModelKind::LDA: return models::fit_lda(train);
    case ModelKind::KNN: return models::fit_knn(train, hp.neighbors);
    case ModelKind::DecisionTree: return models::fit_tree(train, hp.max_depth);
    case ModelKind::RandomForest: {
      Rng rng(seed, Stream::Model, substream);
      return models::fit_forest(train, hp.trees, hp.max_depth, rng);
    }
    case ModelKind::GradientBoosting:
      return models::fit_boosting(train, hp.rounds, hp.learning_rate);
    case ModelKind::RandomGuess: break;
  }
  throw Error(Errc::InvalidArgument, "unknown model kind");
}

TrainedModel::TrainedModel(ModelKind kind, HyperParams chosen, std::vector<double> cv_accuracy,
                           std::shared_ptr<const Classifier> impl)
    : kind_(kind), chosen_(chosen), cv_accuracy_(std::move(cv_accuracy)), impl_(std::move(impl)) {
  if (!impl_) throw Error(Errc::InvalidArgument, "trained model without an implementation");
}

TrainedModel train(const ModelSpec& spec, const Dataset& data, std::size_t folds, Seed seed) {
  spec.validate();
  data.require_both_classes("training");
  if (folds < 2) throw Error(Errc::InvalidArgument, "cross-validation needs at least 2 folds");

  std::size_t best = 0;
  std::vector<double> cv_accuracy;
  // A single grid point needs no selection, so its CV would not change the result.
  if (spec.grid.size() > 1) {
    const auto fold_sets = kfold_indices(data.rows(), folds, seed);
    std::vector<Dataset> fold_train, fold_test;
    for (std::size_t f = 0; f < fold_sets.size(); ++f) {
      std::vector<bool> held(data.rows(), false);
      for (auto i : fold_sets[f]) held[i] = true;
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < data.rows(); ++i) {
        if (!held[i]) rest.push_back(i);
      }
      fold_train.push_back(data.subset(rest));
      fold_test.push_back(data.subset(fold_sets[f]));
    }
    for (std::size_t g = 0; g < spec.grid.size(); ++g) {
      double total = 0.0;
      for (std::size_t f = 0; f < fold_sets.size(); ++f) {
        const auto& tr = fold_train[f];
        // Folds of very imbalanced data can lose a class; predict its base rate.
        const auto model =
            has_both_classes(tr)
                ? fit_classifier(spec.kind, spec.grid[g], tr, seed,
                                 static_cast<std::uint32_t>(1 + g * fold_sets.size() + f))
                : models::make_constant(tr.cols(), prevalence(tr));
        const auto scores = model->predict(fold_test[f].features());
        total += cutoff_accuracy(scores, fold_test[f].labels());
      }
      cv_accuracy.push_back(total / static_cast<double>(fold_sets.size()));
      if (cv_accuracy[g] > cv_accuracy[best]) best = g;
    }
  }
  auto impl = fit_classifier(spec.kind, spec.grid[best], data, seed, 0);
  return TrainedModel(spec.kind, spec.grid[best], std::move(cv_accuracy), std::move(impl));
}

std::vector<double> predict_proba(const TrainedModel& model, const Matrix& features) {
  if (features.cols() != model.width()) {
    throw Error(Errc::WidthMismatch, "model expects " + std::to_string(model.width()) +
                                         " features, got " + std::to_string(features.cols()));
  }
  return model.classifier().predict(features);
}

std::vector<double> random_guess_scores(double test_prevalence, std::size_t n, Seed seed) {
  if (!(test_prevalence >= 0.0 && test_prevalence <= 1.0)) {
    throw Error(Errc::InvalidArgument, "prevalence must lie in [0, 1]");
  }
  Rng rng(seed, Stream::RandomGuess);
  const auto k = static_cast<std::size_t>(std::llround(test_prevalence * static_cast<double>(n)));
  std::vector<bool> positive(n, false);
  for (auto i : rng.sample_without_replacement(n, std::min(k, n))) positive[i] = true;
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = positive[i] ? rng.uniform_open(0.51, 0.99) : rng.uniform_open(0.01, 0.49);
  }
  return scores;
}

}  // namespace prevsim

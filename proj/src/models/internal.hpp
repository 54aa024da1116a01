#pragma once

#include <memory>
#include <span>
#include <vector>

#include "prevsim/dataset.hpp"
#include "prevsim/models.hpp"

namespace prevsim::models {

/// Per-column mean and standard deviation (1 for constant columns).
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
  void apply_row(std::span<const double> in, std::span<double> out) const;
};

void require_width(const Classifier& model, const Matrix& features);

double sigmoid(double z);

std::shared_ptr<const Classifier> fit_logistic(const Dataset& train);
std::shared_ptr<const Classifier> fit_lda(const Dataset& train);
std::shared_ptr<const Classifier> fit_knn(const Dataset& train, int neighbors);
std::shared_ptr<const Classifier> fit_tree(const Dataset& train, int max_depth);
std::shared_ptr<const Classifier> fit_forest(const Dataset& train, int trees, int max_depth,
                                             Rng& rng);
std::shared_ptr<const Classifier> fit_boosting(const Dataset& train, int rounds,
                                               double learning_rate);
std::shared_ptr<const Classifier> fit_random_guess(const Dataset& train, Seed seed);
std::shared_ptr<const Classifier> make_constant(std::size_t width, double probability);

}  // namespace prevsim::models

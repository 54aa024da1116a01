#include <cmath>

#include "internal.hpp"
#include "prevsim/error.hpp"

namespace prevsim {
namespace {

constexpr double kL2 = 1e-6;
constexpr double kGradTol = 1e-8;
constexpr int kMaxIter = 500;

/// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

class Logistic final : public Classifier {
 public:
  Logistic(models::Standardizer standardizer, std::vector<double> weights)
      : standardizer_(std::move(standardizer)), weights_(std::move(weights)) {}

  std::size_t width() const override { return standardizer_.mean.size(); }

  std::vector<double> predict(const Matrix& features) const override {
    models::require_width(*this, features);
    std::vector<double> z(width());
    std::vector<double> out(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
      standardizer_.apply_row(features.row(r), z);
      double eta = weights_.back();
      for (std::size_t c = 0; c < z.size(); ++c) eta += weights_[c] * z[c];
      out[r] = models::sigmoid(eta);
    }
    return out;
  }

 private:
  models::Standardizer standardizer_;
  std::vector<double> weights_;
};

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

namespace detail {

double logistic_loss(std::span<const double> weights, const Matrix& x,
                     std::span<const std::uint8_t> y, double l2, std::span<double> gradient) {
  const std::size_t d = x.cols();
  if (weights.size() != d + 1 || gradient.size() != d + 1 || y.size() != x.rows()) {
    throw Error(Errc::InvalidArgument, "logistic loss dimensions disagree");
  }
  std::fill(gradient.begin(), gradient.end(), 0.0);
  double loss = 0.0;
  const auto n = static_cast<double>(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double eta = weights[d];
    for (std::size_t c = 0; c < d; ++c) eta += weights[c] * row[c];
    loss += softplus(eta) - (y[r] ? eta : 0.0);
    const double residual = models::sigmoid(eta) - y[r];
    for (std::size_t c = 0; c < d; ++c) gradient[c] += residual * row[c];
    gradient[d] += residual;
  }
  loss /= n;
  for (auto& g : gradient) g /= n;
  for (std::size_t c = 0; c < d; ++c) {
    loss += 0.5 * l2 * weights[c] * weights[c];
    gradient[c] += l2 * weights[c];
  }
  return loss;
}

std::shared_ptr<const Classifier> make_logistic(std::vector<double> mean, std::vector<double> scale,
                                                std::vector<double> weights) {
  if (mean.size() != scale.size() || weights.size() != mean.size() + 1) {
    throw Error(Errc::InvalidArgument, "logistic parameters disagree in size");
  }
  models::Standardizer s{std::move(mean), std::move(scale)};
  return std::make_shared<Logistic>(std::move(s), std::move(weights));
}

}  // namespace detail

namespace models {

std::shared_ptr<const Classifier> fit_logistic(const Dataset& train) {
  auto standardizer = Standardizer::fit(train.features());
  const Matrix x = standardizer.apply(train.features());
  const auto& y = train.labels();
  const std::size_t p = x.cols() + 1;

  std::vector<double> w(p, 0.0), g(p), trial(p), trial_g(p);
  double loss = detail::logistic_loss(w, x, y, kL2, g);
  double step = 1.0;
  for (int it = 0; it < kMaxIter; ++it) {
    const double gg = squared_norm(g);
    if (std::sqrt(gg) < kGradTol) break;
    step *= 2.0;
    double trial_loss = 0.0;
    for (;;) {
      for (std::size_t j = 0; j < p; ++j) trial[j] = w[j] - step * g[j];
      trial_loss = detail::logistic_loss(trial, x, y, kL2, trial_g);
      if (trial_loss <= loss - 0.5 * step * gg || step < 1e-12) break;
      step *= 0.5;
    }
    if (trial_loss > loss) break;
    w.swap(trial);
    g.swap(trial_g);
    loss = trial_loss;
  }
  return std::make_shared<Logistic>(std::move(standardizer), std::move(w));
}

}  // namespace models
}  // namespace prevsim

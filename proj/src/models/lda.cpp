#include <Eigen/Dense>
#include <cmath>

#include "internal.hpp"
#include "prevsim/error.hpp"

namespace prevsim::models {
namespace {

class Lda final : public Classifier {
 public:
  Lda(std::vector<double> weights, double intercept)
      : weights_(std::move(weights)), intercept_(intercept) {}

  std::size_t width() const override { return weights_.size(); }

  std::vector<double> predict(const Matrix& features) const override {
    require_width(*this, features);
    std::vector<double> out(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
      const auto row = features.row(r);
      double eta = intercept_;
      for (std::size_t c = 0; c < row.size(); ++c) eta += weights_[c] * row[c];
      out[r] = sigmoid(eta);
    }
    return out;
  }

 private:
  std::vector<double> weights_;
  double intercept_;
};

}  // namespace

std::shared_ptr<const Classifier> fit_lda(const Dataset& train) {
  const auto& x = train.features();
  const auto d = static_cast<Eigen::Index>(x.cols());
  Eigen::VectorXd mu[2] = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  double count[2] = {0.0, 0.0};
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const int k = train.labels()[r];
    mu[k] += Eigen::Map<const Eigen::VectorXd>(x.row(r).data(), d);
    count[k] += 1.0;
  }
  mu[0] /= count[0];
  mu[1] /= count[1];

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const Eigen::VectorXd centred =
        Eigen::Map<const Eigen::VectorXd>(x.row(r).data(), d) - mu[train.labels()[r]];
    s.selfadjointView<Eigen::Lower>().rankUpdate(centred);
  }
  s = s.selfadjointView<Eigen::Lower>();
  const double dof = static_cast<double>(x.rows()) - 2.0;
  if (dof > 0.0) s /= dof;
  // Small ridge keeps collinear or constant features solvable.
  const double trace = s.trace();
  const double ridge = trace > 0.0 ? 1e-6 * trace / static_cast<double>(d) : 1e-6;
  s.diagonal().array() += ridge;

  const Eigen::VectorXd w = s.ldlt().solve(mu[1] - mu[0]);
  const double b = -0.5 * (mu[1] + mu[0]).dot(w) + std::log(count[1] / count[0]);
  return std::make_shared<Lda>(std::vector<double>(w.data(), w.data() + d), b);
}

}  // namespace prevsim::models

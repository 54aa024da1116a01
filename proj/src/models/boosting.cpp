#include <algorithm>
#include <cmath>
#include <numeric>

#include "internal.hpp"
#include "prevsim/error.hpp"

namespace prevsim::models {
namespace {

struct Stump {
  int feature = -1;  // -1: no split, `left` applies everywhere
  double threshold = 0.0;
  double left = 0.0;
  double right = 0.0;

  double value(std::span<const double> row) const {
    if (feature < 0) return left;
    return row[static_cast<std::size_t>(feature)] <= threshold ? left : right;
  }
};

class Boosting final : public Classifier {
 public:
  Boosting(std::size_t width, double base, double rate, std::vector<Stump> stumps)
      : width_(width), base_(base), rate_(rate), stumps_(std::move(stumps)) {}

  std::size_t width() const override { return width_; }

  std::vector<double> predict(const Matrix& features) const override {
    require_width(*this, features);
    std::vector<double> out(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
      double f = base_;
      for (const auto& s : stumps_) f += rate_ * s.value(features.row(r));
      out[r] = sigmoid(f);
    }
    return out;
  }

 private:
  std::size_t width_;
  double base_;
  double rate_;
  std::vector<Stump> stumps_;
};

double newton_value(double residual_sum, double hessian_sum) {
  return residual_sum / std::max(hessian_sum, 1e-12);
}

}  // namespace

std::shared_ptr<const Classifier> fit_boosting(const Dataset& train, int rounds,
                                               double learning_rate) {
  if (rounds <= 0 || !(learning_rate > 0.0)) {
    throw Error(Errc::InvalidArgument, "boosting needs positive rounds and learning rate");
  }
  const auto& x = train.features();
  const auto& y = train.labels();
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();

  std::vector<std::vector<std::size_t>> order(d, std::vector<std::size_t>(n));
  for (std::size_t f = 0; f < d; ++f) {
    std::iota(order[f].begin(), order[f].end(), std::size_t{0});
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }

  const double p0 = prevalence(train);
  const double base = std::log(p0 / (1.0 - p0));
  std::vector<double> f(n, base), residual(n), hessian(n);
  std::vector<Stump> stumps;
  stumps.reserve(static_cast<std::size_t>(rounds));

  for (int round = 0; round < rounds; ++round) {
    double total_r = 0.0, total_h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(f[i]);
      residual[i] = y[i] - p;
      hessian[i] = p * (1.0 - p);
      total_r += residual[i];
      total_h += hessian[i];
    }

    // Least-squares stump on the residuals: maximise sL^2/nL + sR^2/nR.
    Stump stump;
    double best_gain = total_r * total_r / static_cast<double>(n) + 1e-12;
    std::size_t best_cut = 0;
    for (std::size_t feat = 0; feat < d; ++feat) {
      const auto& idx = order[feat];
      double left_r = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        left_r += residual[idx[i - 1]];
        if (i < kMinLeafSize || n - i < kMinLeafSize) continue;
        const double lo = x(idx[i - 1], feat);
        const double hi = x(idx[i], feat);
        if (!(lo < hi)) continue;
        const double right_r = total_r - left_r;
        const auto nl = static_cast<double>(i);
        const double gain = left_r * left_r / nl + right_r * right_r / (static_cast<double>(n) - nl);
        if (gain > best_gain) {
          best_gain = gain;
          best_cut = i;
          stump.feature = static_cast<int>(feat);
          stump.threshold = lo + (hi - lo) / 2.0;
        }
      }
    }

    if (stump.feature < 0) {
      stump.left = newton_value(total_r, total_h);
    } else {
      const auto& idx = order[static_cast<std::size_t>(stump.feature)];
      double lr = 0.0, lh = 0.0;
      for (std::size_t i = 0; i < best_cut; ++i) {
        lr += residual[idx[i]];
        lh += hessian[idx[i]];
      }
      stump.left = newton_value(lr, lh);
      stump.right = newton_value(total_r - lr, total_h - lh);
    }
    for (std::size_t i = 0; i < n; ++i) f[i] += learning_rate * stump.value(x.row(i));
    stumps.push_back(stump);
  }
  return std::make_shared<Boosting>(d, base, learning_rate, std::move(stumps));
}

}  // namespace prevsim::models

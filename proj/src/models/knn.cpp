#include <algorithm>
#include <utility>

#include "internal.hpp"
#include "prevsim/error.hpp"

namespace prevsim::models {
namespace {

class Knn final : public Classifier {
 public:
  Knn(Standardizer standardizer, Matrix points, std::vector<std::uint8_t> labels, std::size_t k)
      : standardizer_(std::move(standardizer)),
        points_(std::move(points)),
        labels_(std::move(labels)),
        k_(std::min(k, labels_.size())) {}

  std::size_t width() const override { return points_.cols(); }

  std::vector<double> predict(const Matrix& features) const override {
    require_width(*this, features);
    const std::size_t n = points_.rows();
    const std::size_t d = points_.cols();
    std::vector<double> q(d);
    std::vector<std::pair<double, std::size_t>> dist(n);
    std::vector<double> out(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
      standardizer_.apply_row(features.row(r), q);
      for (std::size_t i = 0; i < n; ++i) {
        const auto p = points_.row(i);
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double diff = p[c] - q[c];
          s += diff * diff;
        }
        dist[i] = {s, i};
      }
      // Pair ordering breaks distance ties by the lower training index.
      std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_ - 1), dist.end());
      std::size_t pos = 0;
      for (std::size_t i = 0; i < k_; ++i) pos += labels_[dist[i].second];
      out[r] = static_cast<double>(pos) / static_cast<double>(k_);
    }
    return out;
  }

 private:
  Standardizer standardizer_;
  Matrix points_;
  std::vector<std::uint8_t> labels_;
  std::size_t k_;
};

}  // namespace

std::shared_ptr<const Classifier> fit_knn(const Dataset& train, int neighbors) {
  if (neighbors <= 0) throw Error(Errc::InvalidArgument, "KNN needs k > 0");
  auto s = Standardizer::fit(train.features());
  Matrix points = s.apply(train.features());
  return std::make_shared<Knn>(std::move(s), std::move(points), train.labels(),
                               static_cast<std::size_t>(neighbors));
}

}  // namespace prevsim::models

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "internal.hpp"
#include "prevsim/error.hpp"

namespace prevsim::models {
namespace {

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  double probability = 0.0;
};

class Tree {
 public:
  explicit Tree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  double score(std::span<const double> row) const {
    std::size_t at = 0;
    while (nodes_[at].feature >= 0) {
      const auto& node = nodes_[at];
      at = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes_[at].probability;
  }

 private:
  std::vector<Node> nodes_;
};

/// n * Gini impurity, so the impurities of two children add.
double gini_sum(double pos, double n) {
  if (n <= 0.0) return 0.0;
  const double p = pos / n;
  return n * 2.0 * p * (1.0 - p);
}

/// Row indices sorted by each feature, shared by every tree of one fit.
std::vector<std::vector<std::size_t>> presort(const Matrix& x) {
  std::vector<std::vector<std::size_t>> order(x.cols(), std::vector<std::size_t>(x.rows()));
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::iota(order[f].begin(), order[f].end(), std::size_t{0});
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }
  return order;
}

/// Grows one CART tree breadth-first. Each level scans the presorted feature
/// orders once, so the cost is O(rows * features) per level. `weight[i]` is
/// the number of copies of row i in the sample (bootstrap counts).
class LevelBuilder {
 public:
  LevelBuilder(const Matrix& x, std::span<const std::uint8_t> y,
               const std::vector<std::vector<std::size_t>>& order, int max_depth, std::size_t mtry,
               Rng* rng)
      : x_(x), y_(y), order_(order), max_depth_(max_depth), mtry_(mtry), rng_(rng) {}

  Tree build(const std::vector<std::uint32_t>& weight) {
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    const std::size_t n = x_.rows();
    std::vector<Node> nodes(1);
    std::vector<std::size_t> node_of(n, kNone);
    double total = 0.0, pos = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight[i] == 0) continue;
      node_of[i] = 0;
      total += weight[i];
      pos += weight[i] * y_[i];
    }
    std::vector<Active> active;
    active.emplace_back(0, total, pos);

    for (int depth = 0; !active.empty(); ++depth) {
      for (auto& a : active) {
        nodes[a.node].probability = (a.pos + 1.0) / (a.n + 2.0);
        a.splittable = depth < max_depth_ && a.n >= 2.0 * kMinLeafSize && a.pos > 0.0 &&
                       a.pos < a.n;
        a.best = Candidate{};
        a.features = a.splittable ? candidate_features() : std::vector<std::size_t>{};
      }
      find_splits(active, node_of, weight);

      std::vector<Active> next;
      std::vector<std::size_t> slot(nodes.size(), kNone);  // node -> index into `active`
      for (std::size_t k = 0; k < active.size(); ++k) slot[active[k].node] = k;
      for (auto& a : active) {
        if (!a.splittable || a.best.feature < 0 ||
            gini_sum(a.pos, a.n) - a.best.impurity <= 1e-12) {
          continue;
        }
        const std::size_t left = nodes.size();
        auto& node = nodes[a.node];
        node.feature = a.best.feature;
        node.threshold = a.best.threshold;
        node.left = left;
        node.right = left + 1;
        a.left_child = left;
        nodes.resize(left + 2);
        next.emplace_back(left, a.best.left_n, a.best.left_pos);
        next.emplace_back(left + 1, a.n - a.best.left_n, a.pos - a.best.left_pos);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (node_of[i] == kNone) continue;
        const auto& a = active[slot[node_of[i]]];
        if (a.left_child == kNone) {
          node_of[i] = kNone;
          continue;
        }
        const auto& node = nodes[a.node];
        node_of[i] = x_(i, static_cast<std::size_t>(node.feature)) <= node.threshold
                         ? node.left
                         : node.right;
      }
      active = std::move(next);
    }
    return Tree(std::move(nodes));
  }

 private:
  struct Candidate {
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
    double left_n = 0.0;
    double left_pos = 0.0;
  };

  struct Active {
    Active(std::size_t node_id, double rows, double positives)
        : node(node_id), n(rows), pos(positives) {}

    std::size_t node;
    double n;
    double pos;
    bool splittable = false;
    std::vector<std::size_t> features;
    Candidate best;
    std::size_t left_child = std::numeric_limits<std::size_t>::max();
  };

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> features(x_.cols());
    std::iota(features.begin(), features.end(), std::size_t{0});
    if (rng_ == nullptr || mtry_ >= features.size()) return features;
    auto picked = rng_->sample_without_replacement(features.size(), mtry_);
    std::sort(picked.begin(), picked.end());
    return picked;
  }

  void find_splits(std::vector<Active>& active, const std::vector<std::size_t>& node_of,
                   const std::vector<std::uint32_t>& weight) {
    struct Scan {
      bool on = false;
      bool started = false;
      double last = 0.0;
      double left_n = 0.0;
      double left_pos = 0.0;
    };
    std::size_t max_node = 0;
    for (const auto& a : active) max_node = std::max(max_node, a.node);
    std::vector<std::size_t> slot(max_node + 1, std::numeric_limits<std::size_t>::max());
    for (std::size_t k = 0; k < active.size(); ++k) slot[active[k].node] = k;

    std::vector<Scan> scans(active.size());
    const double min_leaf = static_cast<double>(kMinLeafSize);
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      bool any = false;
      for (std::size_t k = 0; k < active.size(); ++k) {
        const auto& feats = active[k].features;
        scans[k] = Scan{};
        scans[k].on = std::binary_search(feats.begin(), feats.end(), f);
        any = any || scans[k].on;
      }
      if (!any) continue;
      for (auto i : order_[f]) {
        const auto node = node_of[i];
        if (node > max_node) continue;
        const auto k = slot[node];
        if (k >= active.size()) continue;
        auto& s = scans[k];
        if (!s.on) continue;
        const double v = x_(i, f);
        auto& a = active[k];
        if (s.started && s.last < v && s.left_n >= min_leaf && a.n - s.left_n >= min_leaf) {
          const double impurity =
              gini_sum(s.left_pos, s.left_n) + gini_sum(a.pos - s.left_pos, a.n - s.left_n);
          if (impurity < a.best.impurity) {
            a.best = {static_cast<int>(f), s.last + (v - s.last) / 2.0, impurity, s.left_n,
                      s.left_pos};
          }
        }
        s.started = true;
        s.last = v;
        s.left_n += weight[i];
        s.left_pos += static_cast<double>(weight[i]) * y_[i];
      }
    }
  }

  const Matrix& x_;
  std::span<const std::uint8_t> y_;
  const std::vector<std::vector<std::size_t>>& order_;
  int max_depth_;
  std::size_t mtry_;
  Rng* rng_;
};

class Forest final : public Classifier {
 public:
  Forest(std::size_t width, std::vector<Tree> trees) : width_(width), trees_(std::move(trees)) {}

  std::size_t width() const override { return width_; }

  std::vector<double> predict(const Matrix& features) const override {
    require_width(*this, features);
    std::vector<double> out(features.rows(), 0.0);
    for (std::size_t r = 0; r < features.rows(); ++r) {
      double sum = 0.0;
      for (const auto& tree : trees_) sum += tree.score(features.row(r));
      out[r] = sum / static_cast<double>(trees_.size());
    }
    return out;
  }

 private:
  std::size_t width_;
  std::vector<Tree> trees_;
};

}  // namespace

std::shared_ptr<const Classifier> fit_tree(const Dataset& train, int max_depth) {
  if (max_depth <= 0) throw Error(Errc::InvalidArgument, "tree depth must be positive");
  const auto order = presort(train.features());
  LevelBuilder builder(train.features(), train.labels(), order, max_depth, train.cols(), nullptr);
  std::vector<Tree> trees;
  trees.push_back(builder.build(std::vector<std::uint32_t>(train.rows(), 1)));
  return std::make_shared<Forest>(train.cols(), std::move(trees));
}

std::shared_ptr<const Classifier> fit_forest(const Dataset& train, int trees, int max_depth,
                                             Rng& rng) {
  if (trees <= 0 || max_depth <= 0) {
    throw Error(Errc::InvalidArgument, "forest needs positive trees and depth");
  }
  const auto mtry = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(train.cols())))));
  const auto order = presort(train.features());
  LevelBuilder builder(train.features(), train.labels(), order, max_depth, mtry, &rng);
  std::vector<Tree> fitted;
  fitted.reserve(static_cast<std::size_t>(trees));
  const auto n = train.rows();
  std::vector<std::uint32_t> weight(n);
  for (int t = 0; t < trees; ++t) {
    std::fill(weight.begin(), weight.end(), 0u);
    for (std::size_t draw = 0; draw < n; ++draw) ++weight[static_cast<std::size_t>(rng.below(n))];
    fitted.push_back(builder.build(weight));
  }
  return std::make_shared<Forest>(train.cols(), std::move(fitted));
}

}  // namespace prevsim::models

/* Copyright 2026 The emoforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

// Binary axis-aligned trees shared by the forest (Gini, class
// distributions at the leaves) and boosting (squared error, scalar leaves).
//
// Splits are x[feature] <= threshold -> left. Thresholds sit at the midpoint
// of consecutive distinct values. Among equally good splits the lowest
// feature index wins, then the lowest threshold.

#include "emoforge/models/classifier.hpp"

namespace emoforge {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double improvement = 0.0;  // weighted impurity decrease achieved by the split
  std::vector<double> value;  // class distribution, or a single regression output

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t feature_dim)
      : nodes_(std::move(nodes)), feature_dim_(feature_dim) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t feature_dim() const { return feature_dim_; }

  template <typename Row>
  const TreeNode& leaf_for(const Row& x) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
      const auto& n = nodes_[i];
      i = static_cast<std::size_t>(x[n.feature] <= n.threshold ? n.left : n.right);
    }
    return nodes_[i];
  }

  template <typename Row>
  const std::vector<double>& predict_row(const Row& x) const {
    return leaf_for(x).value;
  }

  std::size_t depth() const { return nodes_.empty() ? 0 : depth_of(0); }

  /// Sum of split improvements per feature.
  std::vector<double> improvements() const {
    std::vector<double> out(feature_dim_, 0.0);
    for (const auto& n : nodes_) {
      if (!n.is_leaf()) out[static_cast<std::size_t>(n.feature)] += n.improvement;
    }
    return out;
  }

  Json to_json() const {
    Json nodes = Json::array();
    for (const auto& n : nodes_) {
      nodes.push_back(Json::array({n.feature, n.threshold, n.left, n.right, n.improvement, n.value}));
    }
    return nodes;
  }

  static DecisionTree from_json(const Json& j, std::size_t feature_dim) {
    std::vector<TreeNode> nodes;
    for (const auto& row : j) {
      TreeNode n;
      n.feature = row.at(0).get<std::int32_t>();
      n.threshold = row.at(1).get<double>();
      n.left = row.at(2).get<std::int32_t>();
      n.right = row.at(3).get<std::int32_t>();
      n.improvement = row.at(4).get<double>();
      n.value = row.at(5).get<std::vector<double>>();
      nodes.push_back(std::move(n));
    }
    const auto count = static_cast<std::int32_t>(nodes.size());
    for (const auto& n : nodes) {
      if (n.is_leaf()) continue;
      require(n.feature < static_cast<std::int32_t>(feature_dim) && n.left > 0 && n.left < count && n.right > 0 &&
                  n.right < count,
              ErrorKind::kFormat, "corrupt tree node");
    }
    require(!nodes.empty(), ErrorKind::kFormat, "empty tree");
    return DecisionTree(std::move(nodes), feature_dim);
  }

 private:
  std::size_t depth_of(std::size_t i) const {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_of(static_cast<std::size_t>(n.left)), depth_of(static_cast<std::size_t>(n.right)));
  }

  std::vector<TreeNode> nodes_;
  std::size_t feature_dim_ = 0;
};

/// Per-feature sample orders (ascending value, ties by sample index), computed
/// once and shared by every tree grown on the same matrix.
struct SortedColumns {
  std::vector<std::vector<std::uint32_t>> order;

  explicit SortedColumns(const Matrix& X) : order(static_cast<std::size_t>(X.cols())) {
    for (Eigen::Index f = 0; f < X.cols(); ++f) {
      auto& o = order[static_cast<std::size_t>(f)];
      o.resize(static_cast<std::size_t>(X.rows()));
      for (std::uint32_t i = 0; i < o.size(); ++i) o[i] = i;
      std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) { return X(a, f) < X(b, f); });
    }
  }
};

/// Gini: node score is sum_c w_c^2 / W, so a split's gain equals the
/// decrease of W * gini impurity.
struct GiniCriterion {
  std::span<const std::size_t> labels;
  std::size_t num_classes;

  struct Stats {
    std::vector<double> w;
    double total = 0.0;
    double squares = 0.0;

    void add(std::size_t cls, double weight) {
      squares += weight * (2.0 * w[cls] + weight);
      w[cls] += weight;
      total += weight;
    }
    void remove(std::size_t cls, double weight) {
      w[cls] -= weight;
      squares -= weight * (2.0 * w[cls] + weight);
      total -= weight;
    }
    double score() const { return total > 0.0 ? squares / total : 0.0; }
  };

  Stats empty() const { return Stats{std::vector<double>(num_classes, 0.0), 0.0, 0.0}; }
  void add(Stats& s, std::uint32_t i, double weight) const { s.add(labels[i], weight); }
  void remove(Stats& s, std::uint32_t i, double weight) const { s.remove(labels[i], weight); }

  bool is_pure(const Stats& s) const {
    return std::count_if(s.w.begin(), s.w.end(), [](double v) { return v > 0.0; }) <= 1;
  }

  std::vector<double> leaf_value(const Stats& s) const {
    std::vector<double> p(num_classes, 0.0);
    for (std::size_t c = 0; c < num_classes; ++c) p[c] = s.w[c] / s.total;
    return p;
  }
};

/// Squared error: node score is S^2 / W, gain is the decrease in SSE.
struct SquaredErrorCriterion {
  std::span<const double> targets;

  struct Stats {
    double sum = 0.0;
    double total = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double score() const { return total > 0.0 ? sum * sum / total : 0.0; }
  };

  Stats empty() const { return {}; }
  void add(Stats& s, std::uint32_t i, double weight) const {
    s.sum += weight * targets[i];
    s.total += weight;
    s.lo = std::min(s.lo, targets[i]);
    s.hi = std::max(s.hi, targets[i]);
  }
  void remove(Stats& s, std::uint32_t i, double weight) const {
    s.sum -= weight * targets[i];
    s.total -= weight;
  }
  bool is_pure(const Stats& s) const { return !(s.hi > s.lo); }
  std::vector<double> leaf_value(const Stats& s) const { return {s.sum / s.total}; }
};

/// Depth-first greedy grower. Node ids follow preorder (node, left subtree,
/// right subtree), which keeps serialization deterministic.
template <typename Criterion>
class TreeGrower {
 public:
  TreeGrower(const Matrix& X, const SortedColumns& sorted, Criterion criterion, const TreeParams& params)
      : X_(X), sorted_(sorted), criterion_(std::move(criterion)), params_(params) {
    require(params.min_samples_leaf >= 1, ErrorKind::kParameter, "min_samples_leaf must be at least 1");
  }

  /// Grows on samples with positive weight. rng drives per-split feature
  /// sampling only when max_features < d.
  DecisionTree grow(std::span<const double> weights, Rng& rng) {
    const auto n = static_cast<std::size_t>(X_.rows());
    require(weights.size() == n, ErrorKind::kShape, "weight count mismatch");
    weights_ = weights;
    assignment_.assign(n, -1);
    nodes_.clear();
    std::vector<std::uint32_t> root;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (weights[i] > 0.0) {
        root.push_back(i);
        assignment_[i] = 0;
      }
    }
    require(!root.empty(), ErrorKind::kDegenerateLabel, "tree has no weighted samples");
    build(root, 0, rng);
    return DecisionTree(std::move(nodes_), static_cast<std::size_t>(X_.cols()));
  }

 private:
  struct Split {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double gain = -std::numeric_limits<double>::infinity();
  };

  std::int32_t build(const std::vector<std::uint32_t>& samples, std::size_t depth, Rng& rng) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    for (std::uint32_t i : samples) assignment_[i] = id;

    auto stats = criterion_.empty();
    for (std::uint32_t i : samples) criterion_.add(stats, i, weights_[i]);

    Split best;
    if (depth < params_.max_depth && !criterion_.is_pure(stats) &&
        stats.total >= 2.0 * static_cast<double>(params_.min_samples_leaf)) {
      best = find_split(samples, stats, id, rng);
    }
    if (best.feature < 0) {
      nodes_[id].value = criterion_.leaf_value(stats);
      return id;
    }

    std::vector<std::uint32_t> left, right;
    for (std::uint32_t i : samples) {
      (X_(i, best.feature) <= best.threshold ? left : right).push_back(i);
    }
    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    nodes_[id].improvement = std::max(0.0, best.gain);
    const std::int32_t l = build(left, depth + 1, rng);
    const std::int32_t r = build(right, depth + 1, rng);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::vector<std::size_t> candidate_features(Rng& rng) const {
    const auto d = static_cast<std::size_t>(X_.cols());
    auto features = iota_indices(d);
    if (params_.max_features == 0 || params_.max_features >= d) return features;
    for (std::size_t i = 0; i < params_.max_features; ++i) {
      std::swap(features[i], features[i + uniform_index(rng, d - i)]);
    }
    features.resize(params_.max_features);
    std::sort(features.begin(), features.end());
    return features;
  }

  Split find_split(const std::vector<std::uint32_t>& samples, const typename Criterion::Stats& parent,
                   std::int32_t id, Rng& rng) {
    const double parent_score = parent.score();
    const double min_leaf = static_cast<double>(params_.min_samples_leaf);
    const std::size_t n_total = static_cast<std::size_t>(X_.rows());
    // Small nodes sort locally; large ones filter the presorted order.
    const bool local_sort = samples.size() * 8 < n_total;

    Split best;
    std::vector<std::uint32_t> order;
    for (std::size_t f : candidate_features(rng)) {
      const auto col = static_cast<Eigen::Index>(f);
      if (local_sort) {
        order = samples;
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
          return X_(a, col) < X_(b, col) || (X_(a, col) == X_(b, col) && a < b);
        });
      } else {
        order.clear();
        for (std::uint32_t i : sorted_.order[f]) {
          if (assignment_[i] == id) order.push_back(i);
        }
      }
      auto left = criterion_.empty();
      auto right = parent;
      for (std::size_t p = 0; p + 1 < order.size(); ++p) {
        const std::uint32_t i = order[p];
        criterion_.add(left, i, weights_[i]);
        criterion_.remove(right, i, weights_[i]);
        const double a = X_(i, col);
        const double b = X_(order[p + 1], col);
        if (!(b > a)) continue;
        if (left.total < min_leaf || right.total < min_leaf) continue;
        const double gain = left.score() + right.score() - parent_score;
        if (gain > best.gain) {
          double threshold = a + 0.5 * (b - a);
          if (!(threshold < b)) threshold = a;
          best = {static_cast<std::int32_t>(f), threshold, gain};
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  const SortedColumns& sorted_;
  Criterion criterion_;
  TreeParams params_;
  std::span<const double> weights_;
  std::vector<std::int32_t> assignment_;
  std::vector<TreeNode> nodes_;
};

/// Single CART classification tree (Gini) on unit-weight samples.
inline DecisionTree fit_decision_tree(const Matrix& X, std::span<const std::size_t> y, std::size_t num_classes,
                                      const TreeParams& params = {}, std::uint64_t seed = 0) {
  check_training_data(X, y, num_classes);
  SortedColumns sorted(X);
  TreeGrower grower(X, sorted, GiniCriterion{y, num_classes}, params);
  std::vector<double> weights(y.size(), 1.0);
  Rng rng(seed);
  return grower.grow(weights, rng);
}

}  // namespace emoforge

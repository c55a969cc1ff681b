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

#include "emoforge/models/decision_tree.hpp"

namespace emoforge {

/// Bagged Gini trees with per-split feature sampling. Prediction averages the
/// leaf class distributions (soft vote).
class RandomForest final : public Classifier {
 public:
  RandomForest(std::vector<DecisionTree> trees, std::size_t num_classes, std::size_t feature_dim)
      : trees_(std::move(trees)), num_classes_(num_classes), feature_dim_(feature_dim) {}

  std::string kind() const override { return "rf"; }
  std::size_t num_classes() const override { return num_classes_; }
  std::size_t feature_dim() const override { return feature_dim_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

  Matrix predict_proba(const Matrix& X) const override {
    check_input(X);
    Matrix out = Matrix::Zero(X.rows(), static_cast<Eigen::Index>(num_classes_));
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      const auto row = X.row(r);
      for (const auto& tree : trees_) {
        const auto& dist = tree.predict_row(row);
        for (std::size_t c = 0; c < num_classes_; ++c) out(r, Eigen::Index(c)) += dist[c];
      }
    }
    out /= static_cast<double>(trees_.size());
    return out;
  }

  std::vector<double> improvements() const {
    std::vector<double> total(feature_dim_, 0.0);
    for (const auto& tree : trees_) {
      const auto imp = tree.improvements();
      for (std::size_t f = 0; f < feature_dim_; ++f) total[f] += imp[f];
    }
    return total;
  }

  Json parameters() const override {
    Json trees = Json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"trees", trees}};
  }

  static std::unique_ptr<RandomForest> from_json(const Json& params, std::size_t num_classes,
                                                 std::size_t feature_dim) {
    std::vector<DecisionTree> trees;
    for (const auto& t : params.at("trees")) trees.push_back(DecisionTree::from_json(t, feature_dim));
    require(!trees.empty(), ErrorKind::kFormat, "forest without trees");
    return std::make_unique<RandomForest>(std::move(trees), num_classes, feature_dim);
  }

 private:
  std::vector<DecisionTree> trees_;
  std::size_t num_classes_;
  std::size_t feature_dim_;
};

/// Tree t uses seed + t for its bootstrap draw and feature sampling, so the
/// forest is the same whether trees are grown sequentially or in parallel.
inline RandomForest fit_random_forest(const Matrix& X, std::span<const std::size_t> y, std::size_t num_classes,
                                      const ForestParams& params, std::uint64_t seed) {
  check_training_data(X, y, num_classes);
  require(params.trees >= 1, ErrorKind::kParameter, "forest needs at least one tree");
  const auto n = static_cast<std::size_t>(X.rows());
  const auto d = static_cast<std::size_t>(X.cols());
  TreeParams tree_params;
  tree_params.max_depth = params.max_depth;
  tree_params.min_samples_leaf = params.min_samples_leaf;
  tree_params.max_features =
      params.max_features == 0 ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))))
                               : std::min(params.max_features, d);

  const SortedColumns sorted(X);
  std::vector<DecisionTree> trees(params.trees);
  parallel_for(params.trees, [&](std::size_t t) {
    Rng rng(seed + t);
    std::vector<double> weights(n, params.bootstrap ? 0.0 : 1.0);
    if (params.bootstrap) {
      for (std::size_t k = 0; k < n; ++k) weights[uniform_index(rng, n)] += 1.0;
    }
    TreeGrower grower(X, sorted, GiniCriterion{y, num_classes}, tree_params);
    trees[t] = grower.grow(weights, rng);
  });
  return RandomForest(std::move(trees), num_classes, d);
}

}  // namespace emoforge

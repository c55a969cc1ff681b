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

/// Multinomial gradient boosting. Every round fits one squared-error
/// regression tree per class to y_k - p_k (the negative cross-entropy
/// gradient w.r.t. logit k); logits accumulate learning_rate * tree output.
/// Logits start at zero, i.e. a uniform prior.
class GradientBoosting final : public Classifier {
 public:
  GradientBoosting(std::size_t num_classes, std::size_t feature_dim, double learning_rate)
      : num_classes_(num_classes), feature_dim_(feature_dim), learning_rate_(learning_rate) {}

  std::string kind() const override { return "xgb"; }
  std::size_t num_classes() const override { return num_classes_; }
  std::size_t feature_dim() const override { return feature_dim_; }
  std::size_t rounds() const { return rounds_.size(); }
  double learning_rate() const { return learning_rate_; }
  const std::vector<std::vector<DecisionTree>>& round_trees() const { return rounds_; }

  /// Training cross-entropy after each round (index 0 is the initial model).
  /// Not serialized.
  const std::vector<double>& loss_history() const { return loss_history_; }

  void add_round(std::vector<DecisionTree> trees) {
    require(trees.size() == num_classes_, ErrorKind::kShape, "one tree per class expected");
    rounds_.push_back(std::move(trees));
  }
  void record_loss(double loss) { loss_history_.push_back(loss); }

  Matrix decision_function(const Matrix& X) const {
    check_input(X);
    Matrix logits = Matrix::Zero(X.rows(), static_cast<Eigen::Index>(num_classes_));
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      const auto row = X.row(r);
      for (const auto& round : rounds_) {
        for (std::size_t k = 0; k < num_classes_; ++k) {
          logits(r, Eigen::Index(k)) += learning_rate_ * round[k].predict_row(row)[0];
        }
      }
    }
    return logits;
  }

  Matrix predict_proba(const Matrix& X) const override { return softmax_rows(decision_function(X)); }

  std::vector<double> improvements() const {
    std::vector<double> total(feature_dim_, 0.0);
    for (const auto& round : rounds_) {
      for (const auto& tree : round) {
        const auto imp = tree.improvements();
        for (std::size_t f = 0; f < feature_dim_; ++f) total[f] += imp[f];
      }
    }
    return total;
  }

  Json parameters() const override {
    Json rounds = Json::array();
    for (const auto& round : rounds_) {
      Json trees = Json::array();
      for (const auto& t : round) trees.push_back(t.to_json());
      rounds.push_back(trees);
    }
    return {{"learning_rate", learning_rate_}, {"rounds", rounds}};
  }

  static std::unique_ptr<GradientBoosting> from_json(const Json& params, std::size_t num_classes,
                                                     std::size_t feature_dim) {
    auto model = std::make_unique<GradientBoosting>(num_classes, feature_dim, params.at("learning_rate").get<double>());
    for (const auto& round : params.at("rounds")) {
      std::vector<DecisionTree> trees;
      for (const auto& t : round) trees.push_back(DecisionTree::from_json(t, feature_dim));
      model->add_round(std::move(trees));
    }
    return model;
  }

  static Matrix softmax_rows(Matrix logits) {
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      auto row = logits.row(r);
      row.array() -= row.maxCoeff();
      row = row.array().exp().matrix();
      row /= row.sum();
    }
    return logits;
  }

 private:
  std::size_t num_classes_;
  std::size_t feature_dim_;
  double learning_rate_;
  std::vector<std::vector<DecisionTree>> rounds_;
  std::vector<double> loss_history_;
};

inline double cross_entropy(const Matrix& proba, std::span<const std::size_t> y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    loss -= std::log(std::max(proba(Eigen::Index(i), Eigen::Index(y[i])), 1e-300));
  }
  return loss / static_cast<double>(y.size());
}

inline GradientBoosting fit_gradient_boosting(const Matrix& X, std::span<const std::size_t> y,
                                              std::size_t num_classes, const BoostingParams& params,
                                              std::uint64_t seed) {
  check_training_data(X, y, num_classes);
  require(params.rounds >= 1, ErrorKind::kParameter, "boosting needs at least one round");
  require(params.learning_rate > 0.0 && params.learning_rate <= 1.0, ErrorKind::kParameter,
          "learning rate must lie in (0, 1]");
  const auto n = static_cast<std::size_t>(X.rows());
  const auto d = static_cast<std::size_t>(X.cols());
  TreeParams tree_params{params.max_depth, params.min_samples_leaf, 0};

  GradientBoosting model(num_classes, d, params.learning_rate);
  const SortedColumns sorted(X);
  const std::vector<double> weights(n, 1.0);

  Matrix logits = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(num_classes));
  Matrix proba = GradientBoosting::softmax_rows(logits);
  model.record_loss(cross_entropy(proba, y));

  std::vector<std::vector<double>> residuals(num_classes, std::vector<double>(n));
  for (std::size_t round = 0; round < params.rounds; ++round) {
    for (std::size_t k = 0; k < num_classes; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        residuals[k][i] = (y[i] == k ? 1.0 : 0.0) - proba(Eigen::Index(i), Eigen::Index(k));
      }
    }
    std::vector<DecisionTree> trees(num_classes);
    parallel_for(num_classes, [&](std::size_t k) {
      // Boosting trees see every feature, so this generator is never drawn from.
      Rng tree_rng(seed + round * num_classes + k);
      TreeGrower grower(X, sorted, SquaredErrorCriterion{residuals[k]}, tree_params);
      trees[k] = grower.grow(weights, tree_rng);
    });
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = X.row(Eigen::Index(i));
      for (std::size_t k = 0; k < num_classes; ++k) {
        logits(Eigen::Index(i), Eigen::Index(k)) += params.learning_rate * trees[k].predict_row(row)[0];
      }
    }
    model.add_round(std::move(trees));
    proba = GradientBoosting::softmax_rows(logits);
    model.record_loss(cross_entropy(proba, y));
  }
  return model;
}

}  // namespace emoforge

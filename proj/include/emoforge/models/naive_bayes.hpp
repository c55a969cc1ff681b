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

#include "emoforge/models/classifier.hpp"

namespace emoforge {

/// Multinomial naive Bayes over non-negative event weights.
///
/// theta[k][j] = (sum of feature j over class k + alpha) / (class total + alpha * d).
/// Scoring skips zero-valued features and features never observed in
/// training, so alpha = 0 cannot produce 0 * log 0.
class MultinomialNb final : public Classifier {
 public:
  MultinomialNb(Vector prior, Matrix theta, std::vector<bool> seen)
      : prior_(std::move(prior)),
        theta_(std::move(theta)),
        log_prior_(prior_.array().log().matrix()),
        log_theta_(theta_.array().log().matrix()),
        seen_(std::move(seen)) {}

  std::string kind() const override { return "mnb"; }
  std::size_t num_classes() const override { return static_cast<std::size_t>(log_theta_.rows()); }
  std::size_t feature_dim() const override { return static_cast<std::size_t>(log_theta_.cols()); }

  Matrix joint_log_likelihood(const Matrix& X) const {
    check_input(X);
    require((X.array() >= 0.0).all(), ErrorKind::kDomain, "multinomial naive Bayes needs non-negative features");
    const auto C = log_theta_.rows();
    Matrix scores(X.rows(), C);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      for (Eigen::Index k = 0; k < C; ++k) {
        double s = log_prior_[k];
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
          const double x = X(r, j);
          if (x == 0.0 || !seen_[std::size_t(j)]) continue;
          s += x * log_theta_(k, j);
        }
        scores(r, k) = s;
      }
    }
    return scores;
  }

  Matrix predict_proba(const Matrix& X) const override {
    Matrix p = joint_log_likelihood(X);
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      auto row = p.row(r);
      const double m = row.maxCoeff();
      if (!std::isfinite(m)) {
        row.setConstant(1.0 / static_cast<double>(row.size()));
        continue;
      }
      row = (row.array() - m).exp().matrix();
      row /= row.sum();
    }
    return p;
  }

  Json parameters() const override {
    // Probabilities rather than logs: -inf does not survive JSON.
    return {{"prior", vector_to_json(prior_)}, {"theta", matrix_to_json(theta_)}, {"seen", seen_}};
  }

  static std::unique_ptr<MultinomialNb> from_json(const Json& params, std::size_t num_classes,
                                                  std::size_t feature_dim) {
    Vector prior = vector_from_json(params.at("prior"));
    Matrix theta = matrix_from_json(params.at("theta"));
    auto seen = params.at("seen").get<std::vector<bool>>();
    require(static_cast<std::size_t>(prior.size()) == num_classes &&
                static_cast<std::size_t>(theta.rows()) == num_classes &&
                static_cast<std::size_t>(theta.cols()) == feature_dim && seen.size() == feature_dim,
            ErrorKind::kFormat, "naive Bayes parameter shapes disagree with header");
    return std::make_unique<MultinomialNb>(std::move(prior), std::move(theta), std::move(seen));
  }

 private:
  Vector prior_;
  Matrix theta_;
  Vector log_prior_;
  Matrix log_theta_;
  std::vector<bool> seen_;
};

inline MultinomialNb fit_multinomial_nb(const Matrix& X, std::span<const std::size_t> y, std::size_t num_classes,
                                        const NaiveBayesParams& params) {
  check_training_data(X, y, num_classes);
  require(params.alpha >= 0.0, ErrorKind::kParameter, "alpha must be non-negative");
  require((X.array() >= 0.0).all(), ErrorKind::kDomain, "multinomial naive Bayes needs non-negative features");
  const auto C = Eigen::Index(num_classes);
  const auto d = X.cols();
  const double n = static_cast<double>(y.size());

  Matrix sums = Matrix::Zero(C, d);
  Vector counts = Vector::Zero(C);
  for (std::size_t i = 0; i < y.size(); ++i) {
    sums.row(Eigen::Index(y[i])) += X.row(Eigen::Index(i));
    counts[Eigen::Index(y[i])] += 1.0;
  }
  std::vector<bool> seen(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) seen[std::size_t(j)] = sums.col(j).sum() > 0.0;

  Vector prior(C);
  Matrix theta(C, d);
  const double alpha = params.alpha;
  for (Eigen::Index k = 0; k < C; ++k) {
    prior[k] = counts[k] / n;
    const double total = sums.row(k).sum() + alpha * static_cast<double>(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      // A class without any mass (no examples, alpha 0) scores -inf everywhere.
      theta(k, j) = total > 0.0 ? (sums(k, j) + alpha) / total : 0.0;
    }
  }
  return MultinomialNb(std::move(prior), std::move(theta), std::move(seen));
}

}  // namespace emoforge

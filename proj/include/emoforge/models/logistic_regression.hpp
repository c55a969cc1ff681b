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

/// One-vs-rest binary logistic models; per-class sigmoid scores are
/// renormalized to sum to one.
class LogisticRegression final : public Classifier {
 public:
  LogisticRegression(Matrix weights, Vector bias) : weights_(std::move(weights)), bias_(std::move(bias)) {}

  std::string kind() const override { return "lr"; }
  std::size_t num_classes() const override { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t feature_dim() const override { return static_cast<std::size_t>(weights_.cols()); }
  const Matrix& weights() const { return weights_; }
  const Vector& bias() const { return bias_; }

  /// Mean regularized loss per epoch, averaged over classes. Not serialized.
  const std::vector<double>& loss_history() const { return loss_history_; }
  void set_loss_history(std::vector<double> h) { loss_history_ = std::move(h); }

  /// Independent per-class sigmoid scores before renormalization.
  Matrix scores(const Matrix& X) const {
    check_input(X);
    Matrix z = X * weights_.transpose();
    z.rowwise() += bias_.transpose();
    return z.unaryExpr([](double v) { return sigmoid(v); });
  }

  Matrix predict_proba(const Matrix& X) const override {
    Matrix p = scores(X);
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      const double s = p.row(r).sum();
      if (s > 0.0) {
        p.row(r) /= s;
      } else {
        p.row(r).setConstant(1.0 / static_cast<double>(p.cols()));
      }
    }
    return p;
  }

  Json parameters() const override {
    return {{"weights", matrix_to_json(weights_)}, {"bias", vector_to_json(bias_)}};
  }

  static std::unique_ptr<LogisticRegression> from_json(const Json& params, std::size_t num_classes,
                                                       std::size_t feature_dim) {
    Matrix w = matrix_from_json(params.at("weights"));
    Vector b = vector_from_json(params.at("bias"));
    require(static_cast<std::size_t>(w.rows()) == num_classes && static_cast<std::size_t>(w.cols()) == feature_dim &&
                static_cast<std::size_t>(b.size()) == num_classes,
            ErrorKind::kFormat, "logistic parameter shapes disagree with header");
    return std::make_unique<LogisticRegression>(std::move(w), std::move(b));
  }

 private:
  Matrix weights_;
  Vector bias_;
  std::vector<double> loss_history_;
};

/// Full-batch gradient descent on mean binary cross-entropy plus reg/2 |w|^2
/// (bias unregularized), all classes updated together. Deterministic; the
/// seed is accepted for interface uniformity.
inline LogisticRegression fit_logistic_regression(const Matrix& X, std::span<const std::size_t> y,
                                                  std::size_t num_classes, const LogisticParams& params,
                                                  std::uint64_t /*seed*/) {
  check_training_data(X, y, num_classes);
  require(params.reg >= 0.0, ErrorKind::kParameter, "regularization must be non-negative");
  require(params.epochs >= 1, ErrorKind::kParameter, "logistic regression needs at least one epoch");
  require(params.learning_rate > 0.0, ErrorKind::kParameter, "learning rate must be positive");
  const auto n = X.rows();
  const auto C = Eigen::Index(num_classes);

  Matrix targets = Matrix::Zero(n, C);
  for (Eigen::Index i = 0; i < n; ++i) targets(i, Eigen::Index(y[std::size_t(i)])) = 1.0;

  Matrix W = Matrix::Zero(C, X.cols());
  Vector b = Vector::Zero(C);
  std::vector<double> history;
  history.reserve(params.epochs);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    Matrix z = X * W.transpose();
    z.rowwise() += b.transpose();
    const Matrix p = z.unaryExpr([](double v) { return sigmoid(v); });
    const Matrix residual = p - targets;

    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < C; ++k) {
        const double v = z(i, k);
        const double softplus = v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
        loss += softplus - targets(i, k) * v;
      }
    }
    history.push_back((loss * inv_n + 0.5 * params.reg * W.squaredNorm()) / static_cast<double>(C));

    const Matrix grad_w = inv_n * residual.transpose() * X + params.reg * W;
    const Vector grad_b = inv_n * residual.colwise().sum().transpose();
    W -= params.learning_rate * grad_w;
    b -= params.learning_rate * grad_b;
  }
  LogisticRegression model(std::move(W), std::move(b));
  model.set_loss_history(std::move(history));
  return model;
}

}  // namespace emoforge

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

/// Logistic link p = sigmoid(a * f + b) fitted to binary targets by Newton's
/// method with backtracking, using Platt's smoothed targets.
struct PlattLink {
  double a = 0.0;
  double b = 0.0;

  double operator()(double f) const { return sigmoid(a * f + b); }
};

inline PlattLink fit_platt(std::span<const double> decision, const std::vector<bool>& positive) {
  double n_pos = 0.0, n_neg = 0.0;
  for (bool p : positive) (p ? n_pos : n_neg) += 1.0;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  std::vector<double> t(decision.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = positive[i] ? hi : lo;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double z = a * decision[i] + b;
      // -t log s(z) - (1-t) log(1-s(z)) = log(1+e^z) - t z, computed stably
      f += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - t[i] * z;
    }
    return f;
  };

  PlattLink link{0.0, std::log((n_pos + 1.0) / (n_neg + 1.0))};
  double value = objective(link.a, link.b);
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0.0, gb = 0.0, haa = 1e-12, hab = 0.0, hbb = 1e-12;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double s = link(decision[i]);
      const double r = s - t[i];
      const double w = s * (1.0 - s);
      ga += r * decision[i];
      gb += r;
      haa += w * decision[i] * decision[i];
      hab += w * decision[i];
      hbb += w;
    }
    if (std::abs(ga) < 1e-9 && std::abs(gb) < 1e-9) break;
    const double det = haa * hbb - hab * hab;
    const double da = -(hbb * ga - hab * gb) / det;
    const double db = -(haa * gb - hab * ga) / det;
    double step = 1.0;
    bool moved = false;
    while (step > 1e-10) {
      const double na = link.a + step * da, nb = link.b + step * db;
      const double nv = objective(na, nb);
      if (nv < value + 1e-4 * step * (ga * da + gb * db)) {
        link = {na, nb};
        value = nv;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return link;
}

/// One-vs-rest linear SVMs with Platt-calibrated scores, renormalized across
/// classes.
class LinearSvm final : public Classifier {
 public:
  /// Untrained model: zero weights and neutral links, so every class scores equally.
  LinearSvm(std::size_t num_classes, std::size_t feature_dim)
      : weights_(Matrix::Zero(Eigen::Index(num_classes), Eigen::Index(feature_dim))),
        bias_(Vector::Zero(Eigen::Index(num_classes))),
        links_(num_classes) {}

  LinearSvm(Matrix weights, Vector bias, std::vector<PlattLink> links)
      : weights_(std::move(weights)), bias_(std::move(bias)), links_(std::move(links)) {}

  std::string kind() const override { return "svm"; }
  std::size_t num_classes() const override { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t feature_dim() const override { return static_cast<std::size_t>(weights_.cols()); }
  const Matrix& weights() const { return weights_; }
  const Vector& bias() const { return bias_; }

  /// Regularized hinge objective per epoch, averaged over classes. Not serialized.
  const std::vector<double>& objective_history() const { return objective_history_; }
  void set_objective_history(std::vector<double> h) { objective_history_ = std::move(h); }

  Matrix decision_function(const Matrix& X) const {
    check_input(X);
    Matrix f = X * weights_.transpose();
    f.rowwise() += bias_.transpose();
    return f;
  }

  Matrix predict_proba(const Matrix& X) const override {
    Matrix p = decision_function(X);
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index k = 0; k < p.cols(); ++k) p(r, k) = links_[std::size_t(k)](p(r, k));
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
    Json links = Json::array();
    for (const auto& l : links_) links.push_back({l.a, l.b});
    return {{"weights", matrix_to_json(weights_)}, {"bias", vector_to_json(bias_)}, {"platt", links}};
  }

  static std::unique_ptr<LinearSvm> from_json(const Json& params, std::size_t num_classes, std::size_t feature_dim) {
    Matrix w = matrix_from_json(params.at("weights"));
    Vector b = vector_from_json(params.at("bias"));
    std::vector<PlattLink> links;
    for (const auto& l : params.at("platt")) links.push_back({l.at(0).get<double>(), l.at(1).get<double>()});
    require(static_cast<std::size_t>(w.rows()) == num_classes && static_cast<std::size_t>(w.cols()) == feature_dim &&
                static_cast<std::size_t>(b.size()) == num_classes && links.size() == num_classes,
            ErrorKind::kFormat, "svm parameter shapes disagree with header");
    return std::make_unique<LinearSvm>(std::move(w), std::move(b), std::move(links));
  }

 private:
  Matrix weights_;
  Vector bias_;
  std::vector<PlattLink> links_;
  std::vector<double> objective_history_;
};

/// Stochastic subgradient descent on reg/2 |w|^2 + mean hinge, step
/// eta0 / (1 + eta0 * reg * t). The bias is unregularized. Every class
/// visits samples in the same seeded order.
inline LinearSvm fit_linear_svm(const Matrix& X, std::span<const std::size_t> y, std::size_t num_classes,
                                const SvmParams& params, std::uint64_t seed) {
  check_training_data(X, y, num_classes);
  require(params.reg > 0.0, ErrorKind::kParameter, "svm regularization must be positive");
  require(params.epochs >= 1, ErrorKind::kParameter, "svm needs at least one epoch");
  require(params.learning_rate > 0.0, ErrorKind::kParameter, "svm learning rate must be positive");
  const auto n = static_cast<std::size_t>(X.rows());
  const auto d = X.cols();

  std::vector<std::vector<std::size_t>> orders(params.epochs);
  {
    Rng rng(seed);
    for (auto& order : orders) {
      order = iota_indices(n);
      shuffle(order, rng);
    }
  }

  Matrix W = Matrix::Zero(Eigen::Index(num_classes), d);
  Vector bias = Vector::Zero(Eigen::Index(num_classes));
  std::vector<PlattLink> links(num_classes);
  Matrix objectives = Matrix::Zero(Eigen::Index(num_classes), Eigen::Index(params.epochs));

  parallel_for(num_classes, [&](std::size_t k) {
    Vector w = Vector::Zero(d);
    double b = 0.0;
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
      for (std::size_t i : orders[epoch]) {
        const double eta = params.learning_rate / (1.0 + params.learning_rate * params.reg * static_cast<double>(t));
        ++t;
        const double target = y[i] == k ? 1.0 : -1.0;
        const auto x = X.row(Eigen::Index(i)).transpose();
        const double margin = target * (w.dot(x) + b);
        w *= 1.0 - eta * params.reg;
        if (margin < 1.0) {
          w += eta * target * x;
          b += eta * target;
        }
      }
      double hinge = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double target = y[i] == k ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - target * (X.row(Eigen::Index(i)).dot(w) + b));
      }
      objectives(Eigen::Index(k), Eigen::Index(epoch)) =
          0.5 * params.reg * w.squaredNorm() + hinge / static_cast<double>(n);
    }
    W.row(Eigen::Index(k)) = w.transpose();
    bias[Eigen::Index(k)] = b;

    std::vector<double> decision(n);
    std::vector<bool> positive(n);
    for (std::size_t i = 0; i < n; ++i) {
      decision[i] = X.row(Eigen::Index(i)).dot(w) + b;
      positive[i] = y[i] == k;
    }
    links[k] = fit_platt(decision, positive);
  });

  LinearSvm model(std::move(W), std::move(bias), std::move(links));
  std::vector<double> history(params.epochs);
  for (std::size_t e = 0; e < params.epochs; ++e) history[e] = objectives.col(Eigen::Index(e)).mean();
  model.set_objective_history(std::move(history));
  return model;
}

}  // namespace emoforge

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

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
};

/// Fully-connected ReLU network with a softmax output layer.
struct MlpParams {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return static_cast<std::size_t>(layers.front().weights.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(layers.back().weights.rows()); }

  MlpParams zeros_like() const {
    MlpParams z;
    for (const auto& l : layers) {
      z.layers.push_back({Matrix::Zero(l.weights.rows(), l.weights.cols()), Vector::Zero(l.bias.size())});
    }
    return z;
  }

  bool all_finite() const {
    return std::all_of(layers.begin(), layers.end(),
                       [](const DenseLayer& l) { return l.weights.allFinite() && l.bias.allFinite(); });
  }
};

/// Hidden layers draw weights from U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the
/// output layer and all biases start at zero, which makes an untrained
/// network predict the uniform distribution.
inline MlpParams init_mlp(std::size_t input_dim, std::span<const std::size_t> hidden_sizes, std::size_t num_classes,
                          Rng& rng) {
  require(!hidden_sizes.empty(), ErrorKind::kParameter, "MLP needs at least one hidden layer");
  MlpParams p;
  std::size_t fan_in = input_dim;
  for (std::size_t width : hidden_sizes) {
    require(width >= 1, ErrorKind::kParameter, "hidden layer width must be positive");
    DenseLayer layer{Matrix(Eigen::Index(width), Eigen::Index(fan_in)), Vector::Zero(Eigen::Index(width))};
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = uniform(rng, -bound, bound);
    p.layers.push_back(std::move(layer));
    fan_in = width;
  }
  p.layers.push_back({Matrix::Zero(Eigen::Index(num_classes), Eigen::Index(fan_in)),
                      Vector::Zero(Eigen::Index(num_classes))});
  return p;
}

namespace mlp_detail {

struct Activations {
  std::vector<Matrix> pre;   // per layer, n x out
  std::vector<Matrix> post;  // post[0] is the input; post[l+1] = act(pre[l])
};

inline Activations forward(const MlpParams& p, const Matrix& X) {
  Activations a;
  a.post.push_back(X);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    Matrix z = a.post.back() * p.layers[l].weights.transpose();
    z.rowwise() += p.layers[l].bias.transpose();
    a.pre.push_back(z);
    if (l + 1 < p.layers.size()) {
      a.post.push_back(z.cwiseMax(0.0));
    } else {
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        auto row = z.row(r);
        row.array() -= row.maxCoeff();
        row = row.array().exp().matrix();
        row /= row.sum();
      }
      a.post.push_back(std::move(z));
    }
  }
  return a;
}

}  // namespace mlp_detail

inline Matrix mlp_forward(const MlpParams& p, const Matrix& X) {
  require(static_cast<std::size_t>(X.cols()) == p.input_dim(), ErrorKind::kShape, "MLP input width mismatch");
  return mlp_detail::forward(p, X).post.back();
}

/// Mean softmax cross-entropy over the batch; fills grad (same shapes as p)
/// when non-null.
inline double mlp_loss_and_gradients(const MlpParams& p, const Matrix& X, std::span<const std::size_t> y,
                                     MlpParams* grad) {
  require(static_cast<std::size_t>(X.rows()) == y.size() && !y.empty(), ErrorKind::kShape,
          "batch/label count mismatch");
  const auto a = mlp_detail::forward(p, X);
  const Matrix& proba = a.post.back();
  const double inv_n = 1.0 / static_cast<double>(y.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    loss -= std::log(std::max(proba(Eigen::Index(i), Eigen::Index(y[i])), 1e-300));
  }
  loss *= inv_n;
  if (grad == nullptr) return loss;

  *grad = p.zeros_like();
  Matrix delta = proba;
  for (std::size_t i = 0; i < y.size(); ++i) delta(Eigen::Index(i), Eigen::Index(y[i])) -= 1.0;
  delta *= inv_n;
  for (std::size_t l = p.layers.size(); l-- > 0;) {
    grad->layers[l].weights = delta.transpose() * a.post[l];
    grad->layers[l].bias = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix back = delta * p.layers[l].weights;
    const Matrix& z = a.pre[l - 1];
    for (Eigen::Index i = 0; i < back.size(); ++i) {
      if (!(z.data()[i] > 0.0)) back.data()[i] = 0.0;
    }
    delta = std::move(back);
  }
  return loss;
}

class Mlp final : public Classifier {
 public:
  explicit Mlp(MlpParams params) : params_(std::move(params)) {}

  std::string kind() const override { return "mlp"; }
  std::size_t num_classes() const override { return params_.output_dim(); }
  std::size_t feature_dim() const override { return params_.input_dim(); }
  const MlpParams& params() const { return params_; }

  /// Training loss after each epoch. Not serialized.
  const std::vector<double>& loss_history() const { return loss_history_; }
  void set_loss_history(std::vector<double> h) { loss_history_ = std::move(h); }

  Matrix predict_proba(const Matrix& X) const override {
    check_input(X);
    return mlp_forward(params_, X);
  }

  Json parameters() const override {
    Json layers = Json::array();
    for (const auto& l : params_.layers) {
      layers.push_back({{"weights", matrix_to_json(l.weights)}, {"bias", vector_to_json(l.bias)}});
    }
    return {{"activation", "relu"}, {"layers", layers}};
  }

  static std::unique_ptr<Mlp> from_json(const Json& params, std::size_t num_classes, std::size_t feature_dim) {
    MlpParams p;
    for (const auto& l : params.at("layers")) {
      p.layers.push_back({matrix_from_json(l.at("weights")), vector_from_json(l.at("bias"))});
    }
    require(p.layers.size() >= 2, ErrorKind::kFormat, "MLP needs a hidden and an output layer");
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
      require(p.layers[i].bias.size() == p.layers[i].weights.rows() &&
                  (i == 0 || p.layers[i].weights.cols() == p.layers[i - 1].weights.rows()),
              ErrorKind::kFormat, "MLP layer dimensions do not chain");
    }
    require(p.input_dim() == feature_dim && p.output_dim() == num_classes, ErrorKind::kFormat,
            "MLP shapes disagree with header");
    return std::make_unique<Mlp>(std::move(p));
  }

 private:
  MlpParams params_;
  std::vector<double> loss_history_;
};

/// Mini-batch gradient descent with classical momentum. Batches follow a
/// seeded per-epoch shuffle.
inline Mlp fit_mlp(const Matrix& X, std::span<const std::size_t> y, std::size_t num_classes,
                   const MlpTrainParams& params, std::uint64_t seed) {
  check_training_data(X, y, num_classes);
  require(params.epochs >= 1, ErrorKind::kParameter, "MLP needs at least one epoch");
  require(params.batch_size >= 1, ErrorKind::kParameter, "batch size must be positive");
  require(params.learning_rate > 0.0, ErrorKind::kParameter, "learning rate must be positive");
  require(params.momentum >= 0.0 && params.momentum < 1.0, ErrorKind::kParameter, "momentum must lie in [0, 1)");

  Rng rng(seed);
  MlpParams p = init_mlp(static_cast<std::size_t>(X.cols()), params.hidden_sizes, num_classes, rng);
  MlpParams velocity = p.zeros_like();
  MlpParams grad;
  const std::size_t n = y.size();
  auto order = iota_indices(n);
  std::vector<double> history;
  history.reserve(params.epochs);

  Matrix batch;
  std::vector<std::size_t> batch_y;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < n; start += params.batch_size) {
      const std::size_t end = std::min(n, start + params.batch_size);
      batch.resize(Eigen::Index(end - start), X.cols());
      batch_y.resize(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch.row(Eigen::Index(i - start)) = X.row(Eigen::Index(order[i]));
        batch_y[i - start] = y[order[i]];
      }
      mlp_loss_and_gradients(p, batch, batch_y, &grad);
      for (std::size_t l = 0; l < p.layers.size(); ++l) {
        velocity.layers[l].weights = params.momentum * velocity.layers[l].weights - params.learning_rate * grad.layers[l].weights;
        velocity.layers[l].bias = params.momentum * velocity.layers[l].bias - params.learning_rate * grad.layers[l].bias;
        p.layers[l].weights += velocity.layers[l].weights;
        p.layers[l].bias += velocity.layers[l].bias;
      }
    }
    const double loss = mlp_loss_and_gradients(p, X, y, nullptr);
    require(std::isfinite(loss) && p.all_finite(), ErrorKind::kDomain,
            "MLP training diverged at epoch " + std::to_string(epoch));
    history.push_back(loss);
  }
  Mlp model(std::move(p));
  model.set_loss_history(std::move(history));
  return model;
}

}  // namespace emoforge

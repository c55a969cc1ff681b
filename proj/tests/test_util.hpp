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

// Fixtures and independent reference implementations shared by the tests.

#include <filesystem>
#include <numbers>

#include "emoforge/emoforge.hpp"

namespace emoforge::testing {

inline std::vector<double> sine(double freq, double sample_rate, std::size_t n, double amp = 1.0) {
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / sample_rate);
  return y;
}

inline AudioClip make_clip(std::vector<double> samples, std::uint32_t sample_rate = 16000) {
  return {std::move(samples), sample_rate, "fixture"};
}

/// Median by full sort of the clamped window.
inline std::vector<double> brute_median(const std::vector<double>& x, std::size_t l) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto before = static_cast<std::ptrdiff_t>(l / 2);
  const auto after = static_cast<std::ptrdiff_t>((l - 1) / 2);
  std::vector<double> y(x.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::vector<double> w;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - before); j <= std::min(n - 1, i + after); ++j) {
      w.push_back(x[std::size_t(j)]);
    }
    std::sort(w.begin(), w.end());
    const std::size_t m = w.size();
    y[std::size_t(i)] = m % 2 ? w[m / 2] : 0.5 * (w[m / 2 - 1] + w[m / 2]);
  }
  return y;
}

struct Labeled {
  Matrix X;
  std::vector<std::size_t> y;
};

/// XOR corners replicated with seeded jitter.
inline Labeled jittered_xor(std::size_t copies, std::uint64_t seed, double jitter = 0.05) {
  Rng rng(seed);
  Labeled d{Matrix(Eigen::Index(4 * copies), 2), {}};
  const double corners[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (std::size_t c = 0; c < copies; ++c) {
    for (std::size_t k = 0; k < 4; ++k) {
      const auto r = Eigen::Index(4 * c + k);
      d.X(r, 0) = corners[k][0] + uniform(rng, -jitter, jitter);
      d.X(r, 1) = corners[k][1] + uniform(rng, -jitter, jitter);
      d.y.push_back((k == 1 || k == 2) ? 1 : 0);
    }
  }
  return d;
}

/// Two classes drawn uniformly from unit balls centered at -/+ offset on
/// every axis; offset > 1/sqrt(dim) guarantees a gap between them.
inline Labeled separable_blobs(std::size_t per_class, std::size_t dim, double offset, std::uint64_t seed) {
  Rng rng(seed);
  Labeled d{Matrix(Eigen::Index(2 * per_class), Eigen::Index(dim)), {}};
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const std::size_t label = i % 2;
    Vector u(static_cast<Eigen::Index>(dim));
    do {
      for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = uniform(rng, -1.0, 1.0);
    } while (u.squaredNorm() > 1.0);
    for (std::size_t j = 0; j < dim; ++j) {
      d.X(Eigen::Index(i), Eigen::Index(j)) = (label ? offset : -offset) + u[Eigen::Index(j)];
    }
    d.y.push_back(label);
  }
  return d;
}

/// Overlapping Gaussian clusters, one per class, centers on a circle.
inline Labeled gaussian_clusters(std::size_t n, std::size_t classes, double radius, std::uint64_t seed) {
  Rng rng(seed);
  Labeled d{Matrix(Eigen::Index(n), 2), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i % classes;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(label) / static_cast<double>(classes);
    d.X(Eigen::Index(i), 0) = radius * std::cos(angle) + normal(rng);
    d.X(Eigen::Index(i), 1) = radius * std::sin(angle) + normal(rng);
    d.y.push_back(label);
  }
  return d;
}

inline double accuracy(std::span<const std::size_t> pred, std::span<const std::size_t> truth) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

/// Sequences of scalar steps labeled by the sign of their sum.
struct SequenceTask {
  std::vector<Sequence> seqs;
  std::vector<std::size_t> y;
};

inline SequenceTask cumulative_sum_task(std::size_t n, std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  SequenceTask t;
  for (std::size_t k = 0; k < n; ++k) {
    Sequence s(Eigen::Index(length), 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < length; ++i) {
      s(Eigen::Index(i), 0) = uniform(rng, -1.0, 1.0);
      sum += s(Eigen::Index(i), 0);
    }
    t.seqs.push_back(std::move(s));
    t.y.push_back(sum > 0.0 ? 1 : 0);
  }
  return t;
}

/// Training settings for the cumulative-sum task.
inline LstmTrainParams cumulative_sum_params() {
  LstmTrainParams p;
  p.hidden_size = 8;
  p.epochs = 200;
  p.learning_rate = 0.05;
  p.dropout_rate = 0.0;
  p.batch_size = 16;
  p.validation_fraction = 0.0;
  p.input_mode = "frames";
  return p;
}

/// Number of `seeds` fresh cumulative-sum runs reaching 0.9 test accuracy.
inline std::size_t cumulative_sum_solved(std::size_t seeds) {
  std::size_t solved = 0;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    const auto train = cumulative_sum_task(200, 6, 1000 + seed);
    const auto test = cumulative_sum_task(200, 6, 2000 + seed);
    const auto model = fit_lstm(train.seqs, train.y, 2, cumulative_sum_params(), seed);
    solved += accuracy(argmax_rows(model.predict_sequences(test.seqs)), test.y) >= 0.9;
  }
  return solved;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)});
}

inline void randomize(std::span<double> values, Rng& rng, double scale) {
  for (double& v : values) v = uniform(rng, -scale, scale);
}

/// Largest relative error between backprop and central differences over every
/// parameter of a random MLP on a 3-sample batch.
inline double mlp_gradient_check(std::uint64_t seed, double eps = 1e-4) {
  Rng rng(seed);
  const std::size_t input = 1 + uniform_index(rng, 5);
  const std::size_t classes = 2 + uniform_index(rng, 3);
  std::vector<std::size_t> hidden(1 + uniform_index(rng, 2));
  for (auto& h : hidden) h = 1 + uniform_index(rng, 6);
  MlpParams p = init_mlp(input, hidden, classes, rng);
  for (auto& layer : p.layers) {
    randomize({layer.weights.data(), std::size_t(layer.weights.size())}, rng, 1.0);
    randomize({layer.bias.data(), std::size_t(layer.bias.size())}, rng, 0.5);
  }
  Matrix X(3, Eigen::Index(input));
  randomize({X.data(), std::size_t(X.size())}, rng, 2.0);
  std::vector<std::size_t> y(3);
  for (auto& v : y) v = uniform_index(rng, classes);

  MlpParams grad;
  mlp_loss_and_gradients(p, X, y, &grad);
  double worst = 0.0;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    for (int which = 0; which < 2; ++which) {
      double* data = which == 0 ? p.layers[l].weights.data() : p.layers[l].bias.data();
      const double* g = which == 0 ? grad.layers[l].weights.data() : grad.layers[l].bias.data();
      const auto size = which == 0 ? p.layers[l].weights.size() : p.layers[l].bias.size();
      for (Eigen::Index k = 0; k < size; ++k) {
        const double saved = data[k];
        data[k] = saved + eps;
        const double up = mlp_loss_and_gradients(p, X, y, nullptr);
        data[k] = saved - eps;
        const double down = mlp_loss_and_gradients(p, X, y, nullptr);
        data[k] = saved;
        worst = std::max(worst, relative_error(g[k], (up - down) / (2 * eps)));
      }
    }
  }
  return worst;
}

/// Same check for BPTT on a random LSTM over a two-sequence batch; odd seeds
/// also apply a fixed dropout mask to the final hidden state.
inline double lstm_gradient_check(std::uint64_t seed, double eps = 1e-4) {
  Rng rng(seed);
  const std::size_t input = 1 + uniform_index(rng, 6);
  const std::size_t hidden = 1 + uniform_index(rng, 8);
  const std::size_t classes = 2 + uniform_index(rng, 3);
  LstmParams p = LstmParams::zeros(input, hidden, classes);
  for (auto t : p.tensors()) randomize(t, rng, 0.8);
  std::vector<Sequence> seqs;
  std::vector<std::size_t> labels;
  for (int k = 0; k < 2; ++k) {
    Sequence s(Eigen::Index(1 + uniform_index(rng, 5)), Eigen::Index(input));
    randomize({s.data(), std::size_t(s.size())}, rng, 1.5);
    seqs.push_back(std::move(s));
    labels.push_back(uniform_index(rng, classes));
  }
  std::vector<Vector> masks;
  if (seed % 2 == 1) {
    for (int k = 0; k < 2; ++k) masks.push_back(draw_dropout_mask(hidden, 0.3, rng));
  }

  LstmParams grad;
  lstm_loss_and_gradients(p, seqs, labels, &grad, masks);
  const auto params = p.tensors();
  const auto grads = std::as_const(grad).tensors();
  double worst = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t k = 0; k < params[t].size(); ++k) {
      const double saved = params[t][k];
      params[t][k] = saved + eps;
      const double up = lstm_loss_and_gradients(p, seqs, labels, nullptr, masks);
      params[t][k] = saved - eps;
      const double down = lstm_loss_and_gradients(p, seqs, labels, nullptr, masks);
      params[t][k] = saved;
      worst = std::max(worst, relative_error(grads[t][k], (up - down) / (2 * eps)));
    }
  }
  return worst;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("emoforge_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace emoforge::testing

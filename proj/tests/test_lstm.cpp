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

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace emoforge {
namespace {

using testing::cumulative_sum_task;
using testing::randomize;

LstmTrainParams cumsum_params() { return testing::cumulative_sum_params(); }

LstmParams random_params(std::size_t input, std::size_t hidden, std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  LstmParams p = LstmParams::zeros(input, hidden, classes);
  for (auto t : p.tensors()) randomize(t, rng, 1.0);
  return p;
}

double scalar_sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

TEST(LstmStep, ZeroParams) {
  const auto p = LstmParams::zeros(3, 4, 2);
  LstmState s = LstmState::zeros(4);
  s.c << 1.0, -2.0, 0.5, 0.0;
  Vector x(3);
  x << 5.0, -1.0, 2.0;
  const auto next = lstm_step(p, s, x);
  EXPECT_TRUE(next.c.isApprox(0.5 * s.c));
  const auto from_zero = lstm_step(p, LstmState::zeros(4), x);
  EXPECT_TRUE((from_zero.h.array() == 0.0).all());
  EXPECT_TRUE((from_zero.c.array() == 0.0).all());
}

TEST(LstmStep, ScalarHandComputation) {
  LstmParams p = LstmParams::zeros(1, 1, 2);
  p.W_f(0, 0) = 0.3, p.U_f(0, 0) = -0.2, p.b_f[0] = 0.1;
  p.W_i(0, 0) = -0.5, p.U_i(0, 0) = 0.4, p.b_i[0] = 0.2;
  p.W_o(0, 0) = 0.7, p.U_o(0, 0) = 0.1, p.b_o[0] = -0.3;
  p.W_c(0, 0) = 1.1, p.U_c(0, 0) = -0.6, p.b_c[0] = 0.05;
  const double xs[2] = {0.8, -1.3};
  double h = 0.0, c = 0.0;
  for (double x : xs) {
    const double f = scalar_sigmoid(0.3 * x - 0.2 * h + 0.1);
    const double i = scalar_sigmoid(-0.5 * x + 0.4 * h + 0.2);
    const double o = scalar_sigmoid(0.7 * x + 0.1 * h - 0.3);
    const double g = std::tanh(1.1 * x - 0.6 * h + 0.05);
    c = f * c + i * g;
    h = o * std::tanh(c);
  }
  LstmState s = LstmState::zeros(1);
  for (double x : xs) s = lstm_step(p, s, Vector::Constant(1, x));
  EXPECT_NEAR(s.h[0], h, 1e-12);
  EXPECT_NEAR(s.c[0], c, 1e-12);
}

TEST(LstmStep, SaturatingInputs) {
  LstmParams p = LstmParams::zeros(1, 1, 2);
  p.W_f(0, 0) = p.W_i(0, 0) = p.W_o(0, 0) = 1.0;
  const auto cache_hi = lstm_detail::step(p, Vector::Zero(1), Vector::Zero(1), Vector::Constant(1, 50.0));
  const auto cache_lo = lstm_detail::step(p, Vector::Zero(1), Vector::Zero(1), Vector::Constant(1, -50.0));
  for (const auto* gate : {&cache_hi.f, &cache_hi.i, &cache_hi.o}) EXPECT_GT((*gate)[0], 1.0 - 1e-6);
  for (const auto* gate : {&cache_lo.f, &cache_lo.i, &cache_lo.o}) EXPECT_LT((*gate)[0], 1e-6);
}

TEST(LstmStep, GatesAndHiddenBounded) {
  Rng rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_params(4, 6, 3, 100 + trial);
    Vector h = Vector::Zero(6), c = Vector::Zero(6);
    for (int t = 0; t < 8; ++t) {
      Vector x(4);
      randomize({x.data(), 4}, rng, 3.0);
      const auto s = lstm_detail::step(p, h, c, x);
      for (const Vector* gate : {&s.f, &s.i, &s.o}) {
        EXPECT_TRUE(((gate->array() > 0.0) && (gate->array() < 1.0)).all());
      }
      h = s.o.cwiseProduct(s.tanh_c);
      c = s.c;
      EXPECT_LT(h.cwiseAbs().maxCoeff(), 1.0);
      EXPECT_TRUE(c.allFinite());
    }
  }
}

TEST(LstmStep, ShapeErrors) {
  const auto p = LstmParams::zeros(3, 2, 2);
  try {
    lstm_step(p, LstmState::zeros(2), Vector::Zero(4));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
  EXPECT_THROW(lstm_forward(p, Sequence(0, 3)), Error);
  EXPECT_THROW(lstm_forward(p, Sequence::Zero(2, 5)), Error);
}

TEST(LstmForward, SoftmaxContract) {
  Rng rng(72);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_params(3, 5, 4, 200 + trial);
    Sequence seq(Eigen::Index(1 + uniform_index(rng, 6)), 3);
    randomize({seq.data(), std::size_t(seq.size())}, rng, 2.0);
    const Vector prob = lstm_forward(p, seq);
    EXPECT_NEAR(prob.sum(), 1.0, 1e-9);
    EXPECT_GE(prob.minCoeff(), 0.0);
  }
}

TEST(LstmForward, LengthOneEqualsStepAndProjection) {
  const auto p = random_params(3, 4, 3, 301);
  Vector x(3);
  x << 0.2, -0.7, 1.4;
  const auto s = lstm_step(p, LstmState::zeros(4), x);
  Vector z = p.W_y * s.h + p.b_y;
  z = (z.array() - z.maxCoeff()).exp().matrix();
  z /= z.sum();
  EXPECT_TRUE(lstm_forward(p, Sequence(x.transpose())).isApprox(z, 1e-14));
}

TEST(LstmForward, AllOnesMaskMatchesInference) {
  const auto p = random_params(2, 3, 2, 302);
  Sequence seq(4, 2);
  seq << 0.1, 0.2, -0.3, 0.4, 0.5, -0.6, 0.7, 0.8;
  Rng rng(1);
  const Vector mask = draw_dropout_mask(3, 0.0, rng);
  EXPECT_TRUE((mask.array() == 1.0).all());
  EXPECT_EQ(lstm_forward(p, seq, &mask), lstm_forward(p, seq));
  EXPECT_EQ(lstm_forward(p, seq), lstm_forward(p, seq));
}

TEST(LstmForward, InvertedDropoutMask) {
  Rng rng(2);
  const Vector m = draw_dropout_mask(10000, 0.25, rng);
  std::size_t kept = 0;
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    EXPECT_TRUE(m[k] == 0.0 || std::abs(m[k] - 1.0 / 0.75) < 1e-15);
    kept += m[k] != 0.0;
  }
  EXPECT_NEAR(static_cast<double>(kept) / 10000.0, 0.75, 0.02);
}

TEST(Bptt, TwoStepHiddenThree) {
  LstmParams p = random_params(2, 3, 2, 303);
  Sequence seq(2, 2);
  seq << 0.5, -1.0, 1.5, 0.25;
  LstmParams grad = LstmParams::zeros(2, 3, 2);
  lstm_sequence_loss(p, seq, 1, &grad);
  const auto g = std::as_const(grad).tensors();
  auto params = p.tensors();
  const double eps = 1e-4;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t k = 0; k < params[t].size(); ++k) {
      const double saved = params[t][k];
      params[t][k] = saved + eps;
      const double up = lstm_sequence_loss(p, seq, 1, nullptr);
      params[t][k] = saved - eps;
      const double down = lstm_sequence_loss(p, seq, 1, nullptr);
      params[t][k] = saved;
      EXPECT_LT(testing::relative_error(g[t][k], (up - down) / (2 * eps)), 1e-4) << LstmParams::kTensorNames[t];
    }
  }
}

TEST(Bptt, RandomConfigurations) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) EXPECT_LT(testing::lstm_gradient_check(seed), 1e-4) << seed;
}

TEST(Bptt, BatchGradientIsMeanOfExamples) {
  const auto p = random_params(2, 3, 3, 304);
  const auto task = cumulative_sum_task(5, 3, 1);
  std::vector<Sequence> seqs;
  for (const auto& s : task.seqs) seqs.push_back(Sequence::Constant(s.rows(), 2, 0.0) + s * Eigen::RowVector2d(1.0, -0.5));
  LstmParams batch;
  const double loss = lstm_loss_and_gradients(p, seqs, task.y, &batch);
  double sum = 0.0;
  LstmParams total = LstmParams::zeros(2, 3, 3);
  for (std::size_t k = 0; k < seqs.size(); ++k) sum += lstm_sequence_loss(p, seqs[k], task.y[k], &total);
  EXPECT_NEAR(loss, sum / 5.0, 1e-14);
  const auto a = std::as_const(batch).tensors();
  const auto b = std::as_const(total).tensors();
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (std::size_t k = 0; k < a[t].size(); ++k) EXPECT_NEAR(a[t][k], b[t][k] / 5.0, 1e-14);
  }
}

TEST(FitLstm, CumulativeSumEightOfTenSeeds) { EXPECT_GE(testing::cumulative_sum_solved(10), 8u); }

TEST(FitLstm, DeterministicAndSerializable) {
  const auto task = cumulative_sum_task(60, 4, 5);
  auto p = cumsum_params();
  p.epochs = 15;
  p.dropout_rate = 0.3;
  const auto a = fit_lstm(task.seqs, task.y, 2, p, 9);
  const auto b = fit_lstm(task.seqs, task.y, 2, p, 9);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  const auto back = classifier_from_json(Json::parse(a.to_json().dump()));
  const auto& lstm = dynamic_cast<const Lstm&>(*back);
  EXPECT_EQ(lstm.input_mode(), LstmInputMode::kFrames);
  EXPECT_EQ(lstm.params().dropout_rate, 0.3);
  EXPECT_EQ(lstm.predict_sequences(task.seqs), a.predict_sequences(task.seqs));
}

TEST(FitLstm, EarlyStoppingKeepsBestCheckpoint) {
  const auto task = cumulative_sum_task(120, 5, 6);
  auto p = cumsum_params();
  p.epochs = 80;
  p.patience = 5;
  p.validation_fraction = 0.2;
  p.learning_rate = 0.2;
  LstmTrainingLog log;
  const auto model = fit_lstm(task.seqs, task.y, 2, p, 4, &log);
  ASSERT_FALSE(log.validation_accuracy.empty());
  ASSERT_EQ(log.validation_accuracy.size(), log.epochs_run);
  const double best = *std::max_element(log.validation_accuracy.begin(), log.validation_accuracy.end());
  EXPECT_EQ(log.validation_accuracy[log.best_epoch], best);
  // Patience: training stops within `patience` epochs of the last improvement.
  EXPECT_LE(log.epochs_run, log.best_epoch + 1 + p.patience);

  // The returned parameters score the best validation accuracy on the held-out slice.
  Rng rng(4);
  auto order = iota_indices(task.seqs.size());
  shuffle(order, rng);
  const std::vector<std::size_t> val(order.begin(), order.begin() + 24);
  EXPECT_EQ(sequence_accuracy(model.params(), task.seqs, task.y, val), best);
}

TEST(FitLstm, RejectsBadConfig) {
  const auto task = cumulative_sum_task(10, 3, 7);
  auto p = cumsum_params();
  p.dropout_rate = 1.0;
  EXPECT_THROW(fit_lstm(task.seqs, task.y, 2, p, 0), Error);
  p = cumsum_params();
  p.input_mode = "words";
  try {
    fit_lstm(task.seqs, task.y, 2, p, 0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_config());
  }
  const std::vector<std::size_t> one_class(10, 1);
  EXPECT_THROW(fit_lstm(task.seqs, one_class, 2, cumsum_params(), 0), Error);
}

}  // namespace
}  // namespace emoforge

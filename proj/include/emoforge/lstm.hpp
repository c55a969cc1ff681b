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

#include <array>
#include <optional>

#include "emoforge/models/classifier.hpp"

namespace emoforge {

/// A sequence is a T x input_dim matrix, one time step per row.
using Sequence = Matrix;

enum class LstmInputMode { kFrames, kClip };

inline std::string to_string(LstmInputMode mode) { return mode == LstmInputMode::kFrames ? "frames" : "clip"; }

inline LstmInputMode parse_lstm_input_mode(std::string_view s) {
  if (s == "frames") return LstmInputMode::kFrames;
  if (s == "clip") return LstmInputMode::kClip;
  fail(ErrorKind::kConfig, "unknown LSTM input mode '" + std::string(s) + "' (expected frames or clip)");
}

/// Gate weights of a single-layer LSTM followed by a softmax projection.
///
///   f_t = sigmoid(W_f x_t + U_f h_{t-1} + b_f)
///   i_t = sigmoid(W_i x_t + U_i h_{t-1} + b_i)
///   o_t = sigmoid(W_o x_t + U_o h_{t-1} + b_o)
///   c_t = f_t * c_{t-1} + i_t * tanh(W_c x_t + U_c h_{t-1} + b_c)
///   h_t = o_t * tanh(c_t)
struct LstmParams {
  Matrix W_f, W_i, W_o, W_c;  // hidden x input
  Matrix U_f, U_i, U_o, U_c;  // hidden x hidden
  Vector b_f, b_i, b_o, b_c;  // hidden
  Matrix W_y;                 // classes x hidden
  Vector b_y;                 // classes
  double dropout_rate = 0.0;

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden, std::size_t classes) {
    const auto I = Eigen::Index(input_dim), H = Eigen::Index(hidden), C = Eigen::Index(classes);
    LstmParams p;
    for (Matrix* w : {&p.W_f, &p.W_i, &p.W_o, &p.W_c}) *w = Matrix::Zero(H, I);
    for (Matrix* u : {&p.U_f, &p.U_i, &p.U_o, &p.U_c}) *u = Matrix::Zero(H, H);
    for (Vector* b : {&p.b_f, &p.b_i, &p.b_o, &p.b_c}) *b = Vector::Zero(H);
    p.W_y = Matrix::Zero(C, H);
    p.b_y = Vector::Zero(C);
    return p;
  }

  std::size_t input_dim() const { return static_cast<std::size_t>(W_f.cols()); }
  std::size_t hidden_size() const { return static_cast<std::size_t>(W_f.rows()); }
  std::size_t num_classes() const { return static_cast<std::size_t>(W_y.rows()); }

  /// Every trainable tensor as a flat span, in a fixed order.
  std::array<std::span<double>, 14> tensors() {
    auto s = [](auto& m) { return std::span<double>(m.data(), static_cast<std::size_t>(m.size())); };
    return {s(W_f), s(W_i), s(W_o), s(W_c), s(U_f), s(U_i), s(U_o), s(U_c),
            s(b_f), s(b_i), s(b_o), s(b_c), s(W_y), s(b_y)};
  }
  std::array<std::span<const double>, 14> tensors() const {
    auto s = [](const auto& m) { return std::span<const double>(m.data(), static_cast<std::size_t>(m.size())); };
    return {s(W_f), s(W_i), s(W_o), s(W_c), s(U_f), s(U_i), s(U_o), s(U_c),
            s(b_f), s(b_i), s(b_o), s(b_c), s(W_y), s(b_y)};
  }

  static constexpr std::array<const char*, 14> kTensorNames = {"W_f", "W_i", "W_o", "W_c", "U_f", "U_i", "U_o",
                                                               "U_c", "b_f", "b_i", "b_o", "b_c", "W_y", "b_y"};

  void validate() const {
    const auto H = W_f.rows(), I = W_f.cols(), C = W_y.rows();
    bool ok = H > 0 && I > 0 && C > 0;
    for (const Matrix* w : {&W_f, &W_i, &W_o, &W_c}) ok = ok && w->rows() == H && w->cols() == I;
    for (const Matrix* u : {&U_f, &U_i, &U_o, &U_c}) ok = ok && u->rows() == H && u->cols() == H;
    for (const Vector* b : {&b_f, &b_i, &b_o, &b_c}) ok = ok && b->size() == H;
    ok = ok && W_y.cols() == H && b_y.size() == C;
    require(ok, ErrorKind::kShape, "LSTM parameter dimensions do not chain");
    bool finite = true;
    for (auto t : tensors()) finite = finite && std::all_of(t.begin(), t.end(), [](double v) { return std::isfinite(v); });
    require(finite, ErrorKind::kDomain, "LSTM parameters contain non-finite values");
    require(dropout_rate >= 0.0 && dropout_rate < 1.0, ErrorKind::kParameter, "dropout rate must lie in [0, 1)");
  }
};

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(std::size_t hidden) {
    return {Vector::Zero(Eigen::Index(hidden)), Vector::Zero(Eigen::Index(hidden))};
  }
};

namespace lstm_detail {

inline Vector sigmoid_vec(const Vector& z) { return z.unaryExpr([](double v) { return sigmoid(v); }); }

struct StepCache {
  Vector x, h_prev, c_prev;
  Vector f, i, o, g;  // gates and candidate
  Vector c, tanh_c;
};

inline StepCache step(const LstmParams& p, const Vector& h_prev, const Vector& c_prev, const Vector& x) {
  StepCache s;
  s.x = x;
  s.h_prev = h_prev;
  s.c_prev = c_prev;
  s.f = sigmoid_vec(p.W_f * x + p.U_f * h_prev + p.b_f);
  s.i = sigmoid_vec(p.W_i * x + p.U_i * h_prev + p.b_i);
  s.o = sigmoid_vec(p.W_o * x + p.U_o * h_prev + p.b_o);
  s.g = (p.W_c * x + p.U_c * h_prev + p.b_c).array().tanh().matrix();
  s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.g);
  s.tanh_c = s.c.array().tanh().matrix();
  return s;
}

inline Vector softmax(Vector z) {
  z.array() -= z.maxCoeff();
  z = z.array().exp().matrix();
  return z / z.sum();
}

}  // namespace lstm_detail

inline LstmState lstm_step(const LstmParams& p, const LstmState& state, const Vector& x) {
  require(static_cast<std::size_t>(x.size()) == p.input_dim(), ErrorKind::kShape,
          "LSTM input has " + std::to_string(x.size()) + " entries, expected " + std::to_string(p.input_dim()));
  require(static_cast<std::size_t>(state.h.size()) == p.hidden_size() &&
              static_cast<std::size_t>(state.c.size()) == p.hidden_size(),
          ErrorKind::kShape, "LSTM state size mismatch");
  const auto s = lstm_detail::step(p, state.h, state.c, x);
  return {s.o.cwiseProduct(s.tanh_c), s.c};
}

inline void check_sequence(const LstmParams& p, const Sequence& seq) {
  require(seq.rows() > 0, ErrorKind::kShape, "empty sequence");
  require(static_cast<std::size_t>(seq.cols()) == p.input_dim(), ErrorKind::kShape,
          "sequence width " + std::to_string(seq.cols()) + " does not match LSTM input " +
              std::to_string(p.input_dim()));
}

/// Runs the sequence from the zero state and returns class probabilities.
/// A non-null mask (already scaled by 1/(1-p)) is applied to the final hidden
/// state; inference passes none.
inline Vector lstm_forward(const LstmParams& p, const Sequence& seq, const Vector* dropout_mask = nullptr) {
  check_sequence(p, seq);
  LstmState s = LstmState::zeros(p.hidden_size());
  for (Eigen::Index t = 0; t < seq.rows(); ++t) s = lstm_step(p, s, seq.row(t).transpose());
  Vector h = s.h;
  if (dropout_mask != nullptr) h = h.cwiseProduct(*dropout_mask);
  return lstm_detail::softmax(p.W_y * h + p.b_y);
}

/// Inverted-dropout mask: kept units are scaled by 1/(1-rate).
inline Vector draw_dropout_mask(std::size_t hidden, double rate, Rng& rng) {
  Vector m(static_cast<Eigen::Index>(hidden));
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index k = 0; k < m.size(); ++k) m[k] = uniform01(rng) < rate ? 0.0 : keep;
  return m;
}

/// Cross-entropy of one sequence; accumulates BPTT gradients into grad
/// (which must have p's shapes) when non-null.
inline double lstm_sequence_loss(const LstmParams& p, const Sequence& seq, std::size_t label, LstmParams* grad,
                                 const Vector* dropout_mask = nullptr) {
  check_sequence(p, seq);
  require(label < p.num_classes(), ErrorKind::kDomain, "label out of range");
  const auto T = static_cast<std::size_t>(seq.rows());
  const auto H = Eigen::Index(p.hidden_size());
  std::vector<lstm_detail::StepCache> cache;
  cache.reserve(T);
  Vector h = Vector::Zero(H), c = Vector::Zero(H);
  for (std::size_t t = 0; t < T; ++t) {
    cache.push_back(lstm_detail::step(p, h, c, seq.row(Eigen::Index(t)).transpose()));
    c = cache.back().c;
    h = cache.back().o.cwiseProduct(cache.back().tanh_c);
  }
  const Vector h_out = dropout_mask ? Vector(h.cwiseProduct(*dropout_mask)) : h;
  const Vector prob = lstm_detail::softmax(p.W_y * h_out + p.b_y);
  const double loss = -std::log(std::max(prob[Eigen::Index(label)], 1e-300));
  if (grad == nullptr) return loss;

  Vector dz = prob;
  dz[Eigen::Index(label)] -= 1.0;
  grad->W_y += dz * h_out.transpose();
  grad->b_y += dz;
  Vector dh = p.W_y.transpose() * dz;
  if (dropout_mask) dh = dh.cwiseProduct(*dropout_mask);
  Vector dc = Vector::Zero(H);
  for (std::size_t t = T; t-- > 0;) {
    const auto& s = cache[t];
    const Vector d_o = dh.cwiseProduct(s.tanh_c);
    dc += dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tanh_c.array().square()).matrix());
    const Vector a_f = dc.cwiseProduct(s.c_prev).cwiseProduct(s.f.cwiseProduct((1.0 - s.f.array()).matrix()));
    const Vector a_i = dc.cwiseProduct(s.g).cwiseProduct(s.i.cwiseProduct((1.0 - s.i.array()).matrix()));
    const Vector a_o = d_o.cwiseProduct(s.o.cwiseProduct((1.0 - s.o.array()).matrix()));
    const Vector a_c = dc.cwiseProduct(s.i).cwiseProduct((1.0 - s.g.array().square()).matrix());

    grad->W_f += a_f * s.x.transpose();
    grad->W_i += a_i * s.x.transpose();
    grad->W_o += a_o * s.x.transpose();
    grad->W_c += a_c * s.x.transpose();
    grad->U_f += a_f * s.h_prev.transpose();
    grad->U_i += a_i * s.h_prev.transpose();
    grad->U_o += a_o * s.h_prev.transpose();
    grad->U_c += a_c * s.h_prev.transpose();
    grad->b_f += a_f;
    grad->b_i += a_i;
    grad->b_o += a_o;
    grad->b_c += a_c;

    dh = p.U_f.transpose() * a_f + p.U_i.transpose() * a_i + p.U_o.transpose() * a_o + p.U_c.transpose() * a_c;
    dc = dc.cwiseProduct(s.f);
  }
  return loss;
}

/// Mean cross-entropy over a batch and its gradient. Per-example gradients
/// are computed in parallel and reduced in index order.
inline double lstm_loss_and_gradients(const LstmParams& p, std::span<const Sequence> seqs,
                                      std::span<const std::size_t> labels, LstmParams* grad,
                                      std::span<const Vector> dropout_masks = {}) {
  require(seqs.size() == labels.size() && !seqs.empty(), ErrorKind::kShape, "batch/label count mismatch");
  require(dropout_masks.empty() || dropout_masks.size() == seqs.size(), ErrorKind::kShape,
          "one dropout mask per sequence expected");
  const std::size_t n = seqs.size();
  std::vector<double> losses(n);
  std::vector<LstmParams> parts(grad ? n : 0);
  parallel_for(n, [&](std::size_t k) {
    LstmParams* g = nullptr;
    if (grad) {
      parts[k] = LstmParams::zeros(p.input_dim(), p.hidden_size(), p.num_classes());
      g = &parts[k];
    }
    losses[k] = lstm_sequence_loss(p, seqs[k], labels[k], g, dropout_masks.empty() ? nullptr : &dropout_masks[k]);
  });
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  for (double l : losses) loss += l;
  if (grad) {
    *grad = LstmParams::zeros(p.input_dim(), p.hidden_size(), p.num_classes());
    auto dst = grad->tensors();
    for (const auto& part : parts) {
      auto src = part.tensors();
      for (std::size_t t = 0; t < dst.size(); ++t) {
        for (std::size_t j = 0; j < dst[t].size(); ++j) dst[t][j] += src[t][j];
      }
    }
    for (auto t : dst) {
      for (double& v : t) v *= inv_n;
    }
  }
  return loss * inv_n;
}

/// Recurrent classifier. Frame-mode models consume whole sequences through
/// predict_sequences; predict_proba treats every row as a length-1 sequence.
class Lstm final : public Classifier {
 public:
  Lstm(LstmParams params, LstmInputMode mode, double clip_threshold)
      : params_(std::move(params)), mode_(mode), clip_threshold_(clip_threshold) {
    params_.validate();
  }

  std::string kind() const override { return "lstm"; }
  std::size_t num_classes() const override { return params_.num_classes(); }
  std::size_t feature_dim() const override { return params_.input_dim(); }
  const LstmParams& params() const { return params_; }
  LstmInputMode input_mode() const { return mode_; }
  double clip_threshold() const { return clip_threshold_; }

  Matrix predict_proba(const Matrix& X) const override {
    check_input(X);
    Matrix out(X.rows(), Eigen::Index(num_classes()));
    for (Eigen::Index r = 0; r < X.rows(); ++r) out.row(r) = lstm_forward(params_, Sequence(X.row(r))).transpose();
    return out;
  }

  Matrix predict_sequences(std::span<const Sequence> seqs) const {
    Matrix out(Eigen::Index(seqs.size()), Eigen::Index(num_classes()));
    parallel_for(seqs.size(), [&](std::size_t k) {
      out.row(Eigen::Index(k)) = lstm_forward(params_, seqs[k]).transpose();
    });
    return out;
  }

  Json parameters() const override {
    Json j;
    j["hidden_size"] = params_.hidden_size();
    j["input_mode"] = to_string(mode_);
    j["dropout_rate"] = params_.dropout_rate;
    j["clip_threshold"] = clip_threshold_;
    const auto tensors = params_.tensors();
    for (std::size_t t = 0; t < tensors.size(); ++t) {
      j["tensors"][LstmParams::kTensorNames[t]] = std::vector<double>(tensors[t].begin(), tensors[t].end());
    }
    return j;
  }

  static std::unique_ptr<Lstm> from_json(const Json& params, std::size_t num_classes, std::size_t feature_dim) {
    const auto hidden = params.at("hidden_size").get<std::size_t>();
    require(hidden >= 1, ErrorKind::kFormat, "LSTM hidden size must be positive");
    LstmParams p = LstmParams::zeros(feature_dim, hidden, num_classes);
    p.dropout_rate = params.at("dropout_rate").get<double>();
    auto tensors = p.tensors();
    for (std::size_t t = 0; t < tensors.size(); ++t) {
      const auto values = params.at("tensors").at(LstmParams::kTensorNames[t]).get<std::vector<double>>();
      require(values.size() == tensors[t].size(), ErrorKind::kFormat,
              std::string("LSTM tensor ") + LstmParams::kTensorNames[t] + " has the wrong size");
      std::copy(values.begin(), values.end(), tensors[t].begin());
    }
    return std::make_unique<Lstm>(std::move(p), parse_lstm_input_mode(params.at("input_mode").get<std::string>()),
                                  params.at("clip_threshold").get<double>());
  }

 private:
  LstmParams params_;
  LstmInputMode mode_;
  double clip_threshold_;
};

/// Per-epoch record of a training run. Not serialized.
struct LstmTrainingLog {
  std::vector<double> train_loss;
  std::vector<double> validation_accuracy;  // empty without a validation slice
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
};

inline double sequence_accuracy(const LstmParams& p, std::span<const Sequence> seqs,
                                std::span<const std::size_t> labels, std::span<const std::size_t> subset) {
  std::vector<char> correct(subset.size(), 0);
  parallel_for(subset.size(), [&](std::size_t k) {
    correct[k] = argmax(lstm_forward(p, seqs[subset[k]])) == labels[subset[k]];
  });
  std::size_t hits = 0;
  for (char c : correct) hits += static_cast<std::size_t>(c);
  return static_cast<double>(hits) / static_cast<double>(subset.size());
}

/// BPTT with mini-batch momentum descent, global gradient-norm clipping and
/// early stopping on a seeded validation slice. Returns the parameters of the
/// best validation epoch (the earliest one on ties).
inline Lstm fit_lstm(std::span<const Sequence> seqs, std::span<const std::size_t> labels, std::size_t num_classes,
                     const LstmTrainParams& params, std::uint64_t seed, LstmTrainingLog* log = nullptr) {
  require(!seqs.empty() && seqs.size() == labels.size(), ErrorKind::kShape, "sequence/label count mismatch");
  require(num_classes >= 2, ErrorKind::kParameter, "need at least two classes");
  require(params.hidden_size >= 1, ErrorKind::kParameter, "hidden size must be positive");
  require(params.epochs >= 1, ErrorKind::kParameter, "LSTM needs at least one epoch");
  require(params.batch_size >= 1, ErrorKind::kParameter, "batch size must be positive");
  require(params.learning_rate > 0.0, ErrorKind::kParameter, "learning rate must be positive");
  require(params.momentum >= 0.0 && params.momentum < 1.0, ErrorKind::kParameter, "momentum must lie in [0, 1)");
  require(params.dropout_rate >= 0.0 && params.dropout_rate < 1.0, ErrorKind::kParameter,
          "dropout rate must lie in [0, 1)");
  require(params.clip_threshold > 0.0, ErrorKind::kParameter, "clip threshold must be positive");
  require(params.validation_fraction >= 0.0 && params.validation_fraction < 1.0, ErrorKind::kParameter,
          "validation fraction must lie in [0, 1)");
  const auto mode = parse_lstm_input_mode(params.input_mode);

  const auto input_dim = static_cast<std::size_t>(seqs.front().cols());
  std::vector<bool> present(num_classes, false);
  std::size_t distinct = 0;
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    require(seqs[k].rows() > 0 && static_cast<std::size_t>(seqs[k].cols()) == input_dim, ErrorKind::kShape,
            "sequences must be non-empty and share one width");
    require(seqs[k].allFinite(), ErrorKind::kDomain, "non-finite sequence value");
    require(labels[k] < num_classes, ErrorKind::kDomain, "label out of range");
    if (!present[labels[k]]) {
      present[labels[k]] = true;
      ++distinct;
    }
  }
  require(seqs.size() >= 2 && distinct >= 2, ErrorKind::kDegenerateLabel, "training labels contain a single class");

  Rng rng(seed);
  auto order = iota_indices(seqs.size());
  shuffle(order, rng);
  auto n_val = static_cast<std::size_t>(std::llround(params.validation_fraction * static_cast<double>(seqs.size())));
  if (params.validation_fraction > 0.0) n_val = std::clamp<std::size_t>(n_val, 1, seqs.size() - 1);
  const std::vector<std::size_t> val(order.begin(), order.begin() + std::ptrdiff_t(n_val));
  std::vector<std::size_t> train(order.begin() + std::ptrdiff_t(n_val), order.end());

  LstmParams p = LstmParams::zeros(input_dim, params.hidden_size, num_classes);
  p.dropout_rate = params.dropout_rate;
  {
    const double bound = 1.0 / std::sqrt(static_cast<double>(params.hidden_size));
    auto tensors = p.tensors();
    // Gate input and recurrent weights only; biases and the projection start at zero.
    for (std::size_t t = 0; t < 8; ++t) {
      for (double& v : tensors[t]) v = uniform(rng, -bound, bound);
    }
  }
  LstmParams velocity = LstmParams::zeros(input_dim, params.hidden_size, num_classes);
  LstmParams grad;
  LstmParams best = p;
  double best_accuracy = -1.0;
  std::size_t since_best = 0;
  LstmTrainingLog history;

  std::vector<Sequence> batch;
  std::vector<std::size_t> batch_labels;
  std::vector<Vector> masks;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle(train, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train.size(); start += params.batch_size) {
      const std::size_t end = std::min(train.size(), start + params.batch_size);
      batch.clear();
      batch_labels.clear();
      masks.clear();
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back(seqs[train[k]]);
        batch_labels.push_back(labels[train[k]]);
        if (params.dropout_rate > 0.0) masks.push_back(draw_dropout_mask(params.hidden_size, params.dropout_rate, rng));
      }
      epoch_loss += lstm_loss_and_gradients(p, batch, batch_labels, &grad, masks) * static_cast<double>(end - start);

      double norm2 = 0.0;
      for (auto t : grad.tensors()) {
        for (double v : t) norm2 += v * v;
      }
      const double norm = std::sqrt(norm2);
      const double scale = norm > params.clip_threshold ? params.clip_threshold / norm : 1.0;
      auto pt = p.tensors();
      auto vt = velocity.tensors();
      auto gt = grad.tensors();
      for (std::size_t t = 0; t < pt.size(); ++t) {
        for (std::size_t j = 0; j < pt[t].size(); ++j) {
          vt[t][j] = params.momentum * vt[t][j] - params.learning_rate * scale * gt[t][j];
          pt[t][j] += vt[t][j];
        }
      }
    }
    epoch_loss /= static_cast<double>(train.size());
    require(std::isfinite(epoch_loss), ErrorKind::kDomain, "LSTM training diverged at epoch " + std::to_string(epoch));
    history.train_loss.push_back(epoch_loss);
    history.epochs_run = epoch + 1;

    if (val.empty()) {
      best = p;
      history.best_epoch = epoch;
      continue;
    }
    const double acc = sequence_accuracy(p, seqs, labels, val);
    history.validation_accuracy.push_back(acc);
    if (acc > best_accuracy) {
      best_accuracy = acc;
      best = p;
      history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= params.patience) {
      break;
    }
  }
  if (log) *log = std::move(history);
  return Lstm(std::move(best), mode, params.clip_threshold);
}

}  // namespace emoforge

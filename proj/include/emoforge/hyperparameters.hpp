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

// Every tunable default in the toolkit lives here. The CLI reads overrides
// from a JSON file whose keys mirror these structs.

#include <json.hpp>

#include "emoforge/common.hpp"

namespace emoforge {

using Json = nlohmann::json;

struct TreeParams {
  std::size_t max_depth = 16;
  std::size_t min_samples_leaf = 1;
  // Features sampled per split; 0 means all features.
  std::size_t max_features = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TreeParams, max_depth, min_samples_leaf, max_features)

struct ForestParams {
  std::size_t trees = 100;
  std::size_t max_depth = 16;
  std::size_t min_samples_leaf = 1;
  // Features sampled per split; 0 means ceil(sqrt(d)).
  std::size_t max_features = 0;
  bool bootstrap = true;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ForestParams, trees, max_depth, min_samples_leaf, max_features,
                                                bootstrap)

struct BoostingParams {
  std::size_t rounds = 100;
  double learning_rate = 0.1;
  std::size_t max_depth = 3;
  std::size_t min_samples_leaf = 1;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BoostingParams, rounds, learning_rate, max_depth, min_samples_leaf)

struct SvmParams {
  double reg = 1e-3;
  std::size_t epochs = 50;
  // Initial step; decays as eta0 / (1 + eta0 * reg * t).
  double learning_rate = 0.1;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SvmParams, reg, epochs, learning_rate)

struct NaiveBayesParams {
  double alpha = 1.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(NaiveBayesParams, alpha)

struct LogisticParams {
  double reg = 1e-4;
  std::size_t epochs = 500;
  double learning_rate = 0.5;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LogisticParams, reg, epochs, learning_rate)

struct MlpTrainParams {
  std::vector<std::size_t> hidden_sizes = {32};
  std::size_t epochs = 300;
  double learning_rate = 0.02;
  double momentum = 0.9;
  std::size_t batch_size = 32;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MlpTrainParams, hidden_sizes, epochs, learning_rate, momentum,
                                                batch_size)

struct LstmTrainParams {
  std::size_t hidden_size = 16;
  std::size_t epochs = 100;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double dropout_rate = 0.2;
  double clip_threshold = 5.0;
  std::size_t batch_size = 16;
  std::size_t patience = 10;
  double validation_fraction = 0.1;
  // "frames" (per-frame sequences) or "clip" (fixed vector as a length-1 sequence).
  std::string input_mode = "frames";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LstmTrainParams, hidden_size, epochs, learning_rate, momentum,
                                                dropout_rate, clip_threshold, batch_size, patience,
                                                validation_fraction, input_mode)

struct FeatureParams {
  std::size_t frame_length = 2048;
  std::size_t hop_length = 512;
  std::size_t harmonic_window = 31;
  double pitch_min_hz = 50.0;
  double pitch_max_hz = 500.0;
  double pause_threshold = 0.4;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FeatureParams, frame_length, hop_length, harmonic_window,
                                                pitch_min_hz, pitch_max_hz, pause_threshold)

struct DataParams {
  double train_fraction = 0.8;
  bool upsample = true;
  double upsample_rho = 0.5;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DataParams, train_fraction, upsample, upsample_rho)

struct Hyperparameters {
  DataParams data;
  FeatureParams features;
  ForestParams rf;
  BoostingParams xgb;
  SvmParams svm;
  NaiveBayesParams mnb;
  LogisticParams lr;
  MlpTrainParams mlp;
  LstmTrainParams lstm;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Hyperparameters, data, features, rf, xgb, svm, mnb, lr, mlp, lstm)

}  // namespace emoforge

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

#include <filesystem>
#include <fstream>

#include "emoforge/dataset.hpp"
#include "emoforge/ensemble.hpp"
#include "emoforge/featurizer.hpp"
#include "emoforge/lstm.hpp"
#include "emoforge/models/gradient_boosting.hpp"
#include "emoforge/models/linear_svm.hpp"
#include "emoforge/models/logistic_regression.hpp"
#include "emoforge/models/mlp.hpp"
#include "emoforge/models/naive_bayes.hpp"
#include "emoforge/models/random_forest.hpp"
#include "emoforge/transforms.hpp"

namespace emoforge {

inline constexpr int kModelFormatVersion = 1;

/// Rebuilds any classifier from its to_json() form.
inline ClassifierPtr classifier_from_json(const Json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    const auto C = j.at("num_classes").get<std::size_t>();
    const auto d = j.at("feature_dim").get<std::size_t>();
    const Json& p = j.at("parameters");
    ClassifierPtr model;
    if (kind == "rf") {
      model = RandomForest::from_json(p, C, d);
    } else if (kind == "xgb") {
      model = GradientBoosting::from_json(p, C, d);
    } else if (kind == "svm") {
      model = LinearSvm::from_json(p, C, d);
    } else if (kind == "mnb") {
      model = MultinomialNb::from_json(p, C, d);
    } else if (kind == "lr") {
      model = LogisticRegression::from_json(p, C, d);
    } else if (kind == "mlp") {
      model = Mlp::from_json(p, C, d);
    } else if (kind == "lstm") {
      model = Lstm::from_json(p, C, d);
    } else if (kind == "scaled") {
      model = std::make_unique<ScaledClassifier>(BlockTransform::from_json(p.at("transform")),
                                                 classifier_from_json(p.at("model")));
    } else if (is_ensemble_kind(kind)) {
      std::vector<ClassifierPtr> members;
      for (const auto& m : p.at("members")) members.push_back(classifier_from_json(m));
      model = std::make_unique<Ensemble>(kind, std::move(members));
    } else {
      fail(ErrorKind::kFormat, "unknown model kind '" + kind + "'");
    }
    require(model->num_classes() == C && model->feature_dim() == d, ErrorKind::kFormat,
            "model '" + kind + "' disagrees with its declared shape");
    return model;
  } catch (const Json::exception& e) {
    fail(ErrorKind::kFormat, std::string("malformed model: ") + e.what());
  }
}

/// Self-describing model container: header, feature pipeline, parameters.
struct ModelFile {
  std::string model_kind;
  ClassMode class_mode = ClassMode::kSix;
  std::uint64_t seed = 0;
  Hyperparameters hyperparameters;
  FeatureSpec features;
  ClassifierPtr model;

  std::size_t feature_dim() const { return model->feature_dim(); }

  std::vector<std::string> class_names() const {
    std::vector<std::string> names;
    for (EmotionLabel l : classes_of(class_mode)) names.emplace_back(to_string(l));
    return names;
  }

  Json to_json() const {
    Json j;
    j["format_version"] = kModelFormatVersion;
    j["model_kind"] = model_kind;
    j["class_mode"] = to_string(class_mode);
    j["classes"] = class_names();
    j["feature_dim"] = feature_dim();
    j["seed"] = seed;
    j["hyperparameters"] = hyperparameters;
    j["pipeline"] = features.to_json();
    if (const auto* lstm = dynamic_cast<const Lstm*>(&unwrap(*model))) {
      j["lstm"] = {{"hidden_size", lstm->params().hidden_size()},
                   {"input_mode", to_string(lstm->input_mode())},
                   {"dropout_rate", lstm->params().dropout_rate},
                   {"clip_threshold", lstm->clip_threshold()}};
    }
    j["model"] = model->to_json();
    return j;
  }

  static ModelFile from_json(const Json& j) {
    try {
      const int version = j.at("format_version").get<int>();
      require(version == kModelFormatVersion, ErrorKind::kUnsupported,
              "model format version " + std::to_string(version) + " is not supported");
      ModelFile m;
      m.model_kind = j.at("model_kind").get<std::string>();
      m.class_mode = parse_class_mode(j.at("class_mode").get<std::string>());
      m.seed = j.at("seed").get<std::uint64_t>();
      m.hyperparameters = j.at("hyperparameters").get<Hyperparameters>();
      m.features = FeatureSpec::from_json(j.at("pipeline"));
      m.model = classifier_from_json(j.at("model"));
      const auto declared = j.at("feature_dim").get<std::size_t>();
      require(declared == m.model->feature_dim(), ErrorKind::kFormat,
              "header feature_dim " + std::to_string(declared) + " does not match the model's " +
                  std::to_string(m.model->feature_dim()));
      require(m.model->num_classes() == class_count(m.class_mode), ErrorKind::kFormat,
              "model class count does not match its class mode");
      const bool frames = [&] {
        const auto* lstm = dynamic_cast<const Lstm*>(&unwrap(*m.model));
        return lstm != nullptr && lstm->input_mode() == LstmInputMode::kFrames;
      }();
      const std::size_t expected = frames ? FrameFeatureSequence::kWidth : m.features.dim();
      require(declared == expected, ErrorKind::kFormat,
              "model expects " + std::to_string(declared) + " features but its pipeline produces " +
                  std::to_string(expected));
      return m;
    } catch (const Json::exception& e) {
      fail(ErrorKind::kFormat, std::string("malformed model file: ") + e.what());
    }
  }
};

inline std::string dump_json(const Json& j) { return j.dump(1, ' ') + "\n"; }

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
  require(static_cast<bool>(out), ErrorKind::kIo, "write to '" + path.string() + "' failed");
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::kFormat, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline void save_model(const std::filesystem::path& path, const ModelFile& model) {
  write_text_file(path, dump_json(model.to_json()));
}

/// Loads a model file. A non-zero expected_feature_dim must match the header.
inline ModelFile load_model(const std::filesystem::path& path, std::size_t expected_feature_dim = 0) {
  ModelFile m = ModelFile::from_json(read_json_file(path));
  require(expected_feature_dim == 0 || m.feature_dim() == expected_feature_dim, ErrorKind::kShape,
          "model '" + path.string() + "' has feature_dim " + std::to_string(m.feature_dim()) + ", expected " +
              std::to_string(expected_feature_dim));
  return m;
}

}  // namespace emoforge

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

// Command-line front end: feature export, training, evaluation, prediction,
// importance ranking and synthetic corpus generation.
//
// Exit status: 0 success, 2 configuration error, 3 data error.

#include <CLI11.hpp>
#include <iostream>

#include "emoforge/emoforge.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

using emoforge::ErrorKind;
using emoforge::Json;

// A config file holds a (partial) hyperparameter object; absent keys keep
// their defaults.
emoforge::Hyperparameters load_hyperparameters(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  emoforge::require(static_cast<bool>(in), ErrorKind::kConfig, "cannot open config '" + path + "'");
  try {
    const Json j = Json::parse(in);
    emoforge::require(j.is_object(), ErrorKind::kConfig, "config must be a JSON object");
    return j.get<emoforge::Hyperparameters>();
  } catch (const Json::exception& e) {
    emoforge::fail(ErrorKind::kConfig, "bad config '" + path + "': " + e.what());
  }
}

emoforge::ClassMode parse_classes(int classes) {
  if (classes == 6) return emoforge::ClassMode::kSix;
  if (classes == 4) return emoforge::ClassMode::kFour;
  emoforge::fail(ErrorKind::kConfig, "--classes must be 6 or 4");
}

void print_importance(const emoforge::ModelFile& m) {
  const auto ranking = emoforge::feature_importance(*m.model, m.features.feature_names());
  emoforge::write_importance_csv(std::cout, ranking);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emoforge: multimodal speech emotion recognition"};
  app.require_subcommand(1);

  std::string manifest, out, setting = "audio_text", model_kind = "e2", config, model_path, report, wav, text;
  std::uint64_t seed = 0;
  int classes = 6;
  std::size_t clips_per_class = 100;

  auto* extract = app.add_subcommand("extract-features", "Write per-utterance features as CSV");
  extract->add_option("--manifest", manifest, "JSONL manifest")->required();
  extract->add_option("--out", out, "Output CSV")->required();
  extract->add_option("--setting", setting, "audio_only | text_only | audio_text");
  extract->add_option("--config", config, "Hyperparameter JSON");

  auto* train = app.add_subcommand("train", "Run an experiment and persist its artifacts");
  train->add_option("--manifest", manifest, "JSONL manifest")->required();
  train->add_option("--model", model_kind, "rf | xgb | svm | mnb | lr | mlp | lstm | e1 | e2");
  train->add_option("--setting", setting, "audio_only | text_only | audio_text");
  train->add_option("--classes", classes, "6 or 4");
  train->add_option("--seed", seed, "Random seed");
  train->add_option("--out", out, "Output directory")->required();
  train->add_option("--config", config, "Hyperparameter JSON");

  auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on a manifest");
  evaluate->add_option("--model", model_path, "Model file")->required();
  evaluate->add_option("--manifest", manifest, "JSONL manifest")->required();
  evaluate->add_option("--report", report, "Output report JSON")->required();

  auto* predict = app.add_subcommand("predict", "Classify one utterance");
  predict->add_option("--model", model_path, "Model file")->required();
  predict->add_option("--wav", wav, "WAV file")->required();
  predict->add_option("--text", text, "Transcript");

  auto* importance = app.add_subcommand("importance", "Rank features of a tree-based model");
  importance->add_option("--model", model_path, "Model file")->required();

  auto* synth = app.add_subcommand("synth-corpus", "Generate the synthetic cross-cue corpus");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--clips-per-class", clips_per_class, "Clips per class");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*extract) {
      const auto hp = load_hyperparameters(config);
      const auto s = emoforge::parse_setting(setting);
      std::ofstream os(out);
      emoforge::require(static_cast<bool>(os), ErrorKind::kIo, "cannot write '" + out + "'");
      const auto rows = emoforge::export_features(manifest, s, hp.features, os);
      std::cerr << "wrote " << rows << " rows to " << out << '\n';
    } else if (*train) {
      emoforge::ExperimentConfig cfg;
      cfg.manifest = manifest;
      cfg.out_dir = out;
      cfg.setting = emoforge::parse_setting(setting);
      cfg.class_mode = parse_classes(classes);
      cfg.model_kind = model_kind;
      cfg.seed = seed;
      cfg.hyperparameters = load_hyperparameters(config);
      const auto result = emoforge::run_experiment(cfg);
      std::cout << emoforge::dump_json({{"accuracy", result.report.accuracy},
                                        {"macro_f1", result.report.macro_f1},
                                        {"model_kind", model_kind},
                                        {"out", out}});
    } else if (*evaluate) {
      const auto m = emoforge::load_model(model_path);
      const auto [r, j] = emoforge::evaluate_model(m, manifest);
      emoforge::write_text_file(report, emoforge::dump_json(j));
      std::cout << emoforge::dump_json({{"accuracy", r.accuracy}, {"macro_f1", r.macro_f1}, {"report", report}});
    } else if (*predict) {
      const auto m = emoforge::load_model(model_path);
      std::optional<emoforge::AudioClip> clip;
      if (emoforge::uses_audio(m.features.setting) || emoforge::is_frame_lstm(*m.model)) {
        clip = emoforge::decode_wav(wav);
      }
      const auto p = emoforge::predict_one(m, clip ? &*clip : nullptr, text);
      const auto names = m.class_names();
      Json probs;
      for (std::size_t c = 0; c < names.size(); ++c) probs[names[c]] = p[Eigen::Index(c)];
      std::cout << emoforge::dump_json({{"label", names[emoforge::argmax(p)]}, {"probabilities", probs}});
    } else if (*importance) {
      print_importance(emoforge::load_model(model_path));
    } else if (*synth) {
      emoforge::SynthOptions options;
      options.clips_per_class = clips_per_class;
      const auto path = emoforge::write_synthetic_corpus(out, seed, options);
      std::cout << path.string() << '\n';
    }
  } catch (const emoforge::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_config() ? kExitConfig : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}

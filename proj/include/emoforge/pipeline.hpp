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

#include <cstdio>
#include <ostream>

#include "emoforge/importance.hpp"
#include "emoforge/metrics.hpp"
#include "emoforge/model_io.hpp"
#include "emoforge/wav.hpp"

namespace emoforge {

inline const std::vector<std::string>& model_kinds() {
  static const std::vector<std::string> kinds = {"rf", "xgb", "svm", "mnb", "lr", "mlp", "lstm", "e1", "e2"};
  return kinds;
}

inline bool is_tree_kind(std::string_view kind) { return kind == "rf" || kind == "xgb"; }

struct ExperimentConfig {
  std::filesystem::path manifest;
  std::filesystem::path out_dir;  // empty: keep results in memory only
  Setting setting = Setting::kAudioText;
  ClassMode class_mode = ClassMode::kSix;
  std::string model_kind = "e2";
  std::uint64_t seed = 0;
  Hyperparameters hyperparameters;

  void validate() const {
    const auto& kinds = model_kinds();
    require(std::find(kinds.begin(), kinds.end(), model_kind) != kinds.end(), ErrorKind::kConfig,
            "unknown model kind '" + model_kind + "'");
    const auto& d = hyperparameters.data;
    require(d.train_fraction > 0.0 && d.train_fraction < 1.0, ErrorKind::kConfig,
            "train_fraction must lie strictly between 0 and 1");
    require(!d.upsample || (d.upsample_rho > 0.0 && d.upsample_rho <= 1.0), ErrorKind::kConfig,
            "upsample_rho must lie in (0, 1]");
    audio_options(hyperparameters.features);
    if (model_kind == "lstm") {
      const auto mode = parse_lstm_input_mode(hyperparameters.lstm.input_mode);
      require(mode == LstmInputMode::kClip || setting == Setting::kAudioOnly, ErrorKind::kConfig,
              "frame-sequence LSTM input needs the audio_only setting; use input_mode \"clip\" with text");
    }
  }
};

/// Runs fn and prefixes any library error with the stage name.
template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

/// Per-example inputs after decoding: clip features, optional frame
/// sequence, and the transcript.
struct ExampleInput {
  AudioFeatureVector audio;
  Sequence frames;
  std::string transcript;
  std::string source_id;
};

inline ExampleInput extract_example(const ManifestEntry& entry, Setting setting, const AudioFeatureOptions& options,
                                    bool need_frames) {
  ExampleInput in;
  in.transcript = entry.transcript;
  in.source_id = entry.audio_path.string();
  if (uses_audio(setting) || need_frames) {
    const AudioClip clip = decode_wav(entry.audio_path);
    in.audio = extract_audio_features(clip, options);
    if (need_frames) in.frames = extract_frame_sequence(clip, options).frames;
  }
  return in;
}

/// Decodes and featurizes every entry in parallel; order follows the input.
inline std::vector<ExampleInput> extract_examples(std::span<const ManifestEntry> entries, Setting setting,
                                                  const FeatureParams& params, bool need_frames) {
  const auto options = audio_options(params);
  std::vector<ExampleInput> out(entries.size());
  parallel_for(entries.size(), [&](std::size_t i) { out[i] = extract_example(entries[i], setting, options, need_frames); });
  return out;
}

inline Matrix feature_matrix(const FeatureSpec& spec, std::span<const ExampleInput> inputs,
                             std::span<const std::size_t> rows) {
  Matrix X(Eigen::Index(rows.size()), Eigen::Index(spec.dim()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& in = inputs[rows[r]];
    X.row(Eigen::Index(r)) = spec.row(&in.audio, in.transcript).transpose();
  }
  return X;
}

/// Fits one non-ensemble model. Scale-sensitive models get a transform on
/// the audio block [0, audio_dim): standardization for svm/lr/mlp/lstm,
/// min-max into [0, 1] for mnb. Trees see raw features.
inline ClassifierPtr fit_member(const std::string& kind, const Matrix& X, std::span<const std::size_t> y,
                                std::size_t C, const Hyperparameters& hp, std::uint64_t seed, std::size_t audio_dim) {
  if (kind == "rf") return std::make_unique<RandomForest>(fit_random_forest(X, y, C, hp.rf, seed));
  if (kind == "xgb") return std::make_unique<GradientBoosting>(fit_gradient_boosting(X, y, C, hp.xgb, seed));

  BlockTransform transform = kind == "mnb" ? fit_minmax(X, 0, audio_dim) : fit_standardize(X, 0, audio_dim);
  const Matrix Xt = transform.apply(X);
  ClassifierPtr inner;
  if (kind == "svm") {
    inner = std::make_unique<LinearSvm>(fit_linear_svm(Xt, y, C, hp.svm, seed));
  } else if (kind == "lr") {
    inner = std::make_unique<LogisticRegression>(fit_logistic_regression(Xt, y, C, hp.lr, seed));
  } else if (kind == "mlp") {
    inner = std::make_unique<Mlp>(fit_mlp(Xt, y, C, hp.mlp, seed));
  } else if (kind == "mnb") {
    inner = std::make_unique<MultinomialNb>(fit_multinomial_nb(Xt, y, C, hp.mnb));
  } else if (kind == "lstm") {
    std::vector<Sequence> seqs;
    seqs.reserve(y.size());
    for (Eigen::Index r = 0; r < Xt.rows(); ++r) seqs.emplace_back(Xt.row(r));
    LstmTrainParams params = hp.lstm;
    params.input_mode = "clip";
    inner = std::make_unique<Lstm>(fit_lstm(seqs, y, C, params, seed));
  } else {
    fail(ErrorKind::kConfig, "unknown model kind '" + kind + "'");
  }
  if (transform.is_identity()) return inner;
  return std::make_unique<ScaledClassifier>(std::move(transform), std::move(inner));
}

inline ClassifierPtr fit_model(const std::string& kind, const Matrix& X, std::span<const std::size_t> y,
                               std::size_t C, const Hyperparameters& hp, std::uint64_t seed, std::size_t audio_dim) {
  if (!is_ensemble_kind(kind)) return fit_member(kind, X, y, C, hp, seed, audio_dim);
  std::vector<ClassifierPtr> members;
  for (const auto& member : ensemble_members(kind)) members.push_back(fit_member(member, X, y, C, hp, seed, audio_dim));
  return std::make_unique<Ensemble>(kind, std::move(members));
}

/// Frame-sequence LSTM: every frame column is standardized with statistics
/// pooled over all training frames.
inline ClassifierPtr fit_frame_lstm(std::span<const Sequence> seqs, std::span<const std::size_t> y, std::size_t C,
                                    const Hyperparameters& hp, std::uint64_t seed) {
  Eigen::Index total = 0;
  for (const auto& s : seqs) total += s.rows();
  Matrix stacked(total, Eigen::Index(FrameFeatureSequence::kWidth));
  Eigen::Index at = 0;
  for (const auto& s : seqs) {
    stacked.middleRows(at, s.rows()) = s;
    at += s.rows();
  }
  BlockTransform transform = fit_standardize(stacked, 0, FrameFeatureSequence::kWidth);
  std::vector<Sequence> scaled;
  scaled.reserve(seqs.size());
  for (const auto& s : seqs) scaled.push_back(transform.apply(s));
  auto inner = std::make_unique<Lstm>(fit_lstm(scaled, y, C, hp.lstm, seed));
  return std::make_unique<ScaledClassifier>(std::move(transform), std::move(inner));
}

inline bool is_frame_lstm(const Classifier& model) {
  const auto* lstm = dynamic_cast<const Lstm*>(&unwrap(model));
  return lstm != nullptr && lstm->input_mode() == LstmInputMode::kFrames;
}

/// Class probabilities for prepared inputs, routing frame-sequence LSTMs
/// through their sequence path.
inline Matrix predict_inputs(const ModelFile& m, std::span<const ExampleInput> inputs,
                             std::span<const std::size_t> rows) {
  if (!is_frame_lstm(*m.model)) return m.model->predict_proba(feature_matrix(m.features, inputs, rows));
  const auto& scaled = dynamic_cast<const ScaledClassifier&>(*m.model);
  const auto& lstm = dynamic_cast<const Lstm&>(scaled.inner());
  std::vector<Sequence> seqs;
  seqs.reserve(rows.size());
  for (std::size_t r : rows) seqs.push_back(scaled.transform().apply(inputs[r].frames));
  return lstm.predict_sequences(seqs);
}

/// Labeled manifest rows surviving label mapping; payload indexes the entries.
inline Dataset<std::size_t> labeled_indices(std::span<const ManifestEntry> entries, ClassMode mode) {
  Dataset<std::size_t> ds{{}, mode, 0};
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (auto label = map_label(entries[i].raw_label, mode)) ds.add(i, *label);
  }
  return ds;
}

/// Uses the manifest's split hints when every row carries one; otherwise a
/// seeded random split.
inline std::pair<Dataset<std::size_t>, Dataset<std::size_t>> split_dataset(const Dataset<std::size_t>& ds,
                                                                         std::span<const ManifestEntry> entries,
                                                                         double train_fraction, std::uint64_t seed) {
  const bool hinted = !ds.empty() && std::all_of(ds.examples.begin(), ds.examples.end(), [&](const auto& ex) {
    return entries[ex.payload].split_hint != SplitHint::kNone;
  });
  if (!hinted) return split(ds, train_fraction, seed);
  Dataset<std::size_t> train{{}, ds.class_mode, seed}, test{{}, ds.class_mode, seed};
  for (const auto& ex : ds.examples) {
    (entries[ex.payload].split_hint == SplitHint::kTrain ? train : test).examples.push_back(ex);
  }
  require(!train.empty() && !test.empty(), ErrorKind::kSplit, "split hints leave a partition empty");
  return {std::move(train), std::move(test)};
}

template <typename Payload>
Json histogram_json(const Dataset<Payload>& ds) {
  Json j;
  for (const auto& [label, count] : class_histogram(ds)) j[to_string(label)] = count;
  return j;
}

struct ExperimentResult {
  EvalReport report;
  Json report_json;
  ModelFile model;
  std::vector<FeatureImportance> importance;  // tree models only
};

inline std::vector<std::size_t> payloads(const Dataset<std::size_t>& ds) {
  std::vector<std::size_t> out;
  out.reserve(ds.size());
  for (const auto& ex : ds.examples) out.push_back(ex.payload);
  return out;
}

inline void write_experiment_artifacts(const std::filesystem::path& dir, const ExperimentResult& r) {
  std::filesystem::create_directories(dir);
  save_model(dir / "model.json", r.model);
  write_text_file(dir / "report.json", dump_json(r.report_json));
  std::ostringstream confusion;
  write_confusion_csv(confusion, r.report, r.model.class_names());
  write_text_file(dir / "confusion.csv", confusion.str());
  if (!r.importance.empty()) {
    std::ostringstream imp;
    write_importance_csv(imp, r.importance);
    write_text_file(dir / "importance.csv", imp.str());
  }
  if (r.model.features.vocabulary) save_vocabulary(dir / "vocab.tsv", *r.model.features.vocabulary);
}

/// ingest -> split -> upsample train -> features -> fit -> evaluate, then
/// writes model.json, report.json, confusion.csv and (when applicable)
/// importance.csv and vocab.tsv into config.out_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  in_stage("config", [&] { config.validate(); });
  const auto& hp = config.hyperparameters;
  const std::size_t C = class_count(config.class_mode);

  const auto entries = in_stage("ingest", [&] { return read_manifest(config.manifest); });
  const auto all = labeled_indices(entries, config.class_mode);
  require(!all.empty(), ErrorKind::kDegenerateClass, "ingest: manifest has no usable examples");

  const auto parts =
      in_stage("split", [&] { return split_dataset(all, entries, hp.data.train_fraction, config.seed); });
  const Dataset<std::size_t>& train = parts.first;
  const Dataset<std::size_t>& test = parts.second;
  const Dataset<std::size_t> fit_set = in_stage("upsample", [&] {
    return hp.data.upsample ? upsample(train, config.seed, UpsampleOptions{hp.data.upsample_rho, {}}) : train;
  });

  const bool frame_lstm =
      config.model_kind == "lstm" && parse_lstm_input_mode(hp.lstm.input_mode) == LstmInputMode::kFrames;
  // Decode each distinct entry once; rows refer back by manifest index.
  std::vector<ExampleInput> inputs(entries.size());
  FeatureSpec spec;
  in_stage("features", [&] {
    std::vector<ManifestEntry> used;
    const auto ids = payloads(all);
    for (std::size_t i : ids) used.push_back(entries[i]);
    auto extracted = extract_examples(used, config.setting, hp.features, frame_lstm);
    for (std::size_t k = 0; k < ids.size(); ++k) inputs[ids[k]] = std::move(extracted[k]);

    spec.setting = config.setting;
    spec.params = hp.features;
    if (uses_text(config.setting)) {
      std::vector<TokenList> corpus;
      for (const auto& ex : train.examples) corpus.push_back(normalize_text(entries[ex.payload].transcript));
      spec.vocabulary = fit_vocabulary(corpus);
    }
  });

  const auto train_rows = payloads(fit_set);
  const auto test_rows = payloads(test);
  const auto y_train = fit_set.class_indices();
  const auto y_test = test.class_indices();

  ExperimentResult result;
  result.model.model_kind = config.model_kind;
  result.model.class_mode = config.class_mode;
  result.model.seed = config.seed;
  result.model.hyperparameters = hp;
  result.model.features = spec;
  result.model.model = in_stage("fit", [&]() -> ClassifierPtr {
    if (frame_lstm) {
      std::vector<Sequence> seqs;
      for (std::size_t r : train_rows) seqs.push_back(inputs[r].frames);
      return fit_frame_lstm(seqs, y_train, C, hp, config.seed);
    }
    return fit_model(config.model_kind, feature_matrix(spec, inputs, train_rows), y_train, C, hp, config.seed,
                     spec.audio_dim());
  });

  in_stage("evaluate", [&] {
    const auto pred = argmax_rows(predict_inputs(result.model, inputs, test_rows));
    result.report = evaluate(pred, y_test, C);
    if (is_tree_kind(config.model_kind)) {
      result.importance = feature_importance(*result.model.model, spec.feature_names());
    }
  });

  Json j = to_json(result.report, result.model.class_names());
  j["model_kind"] = config.model_kind;
  j["setting"] = to_string(config.setting);
  j["class_mode"] = to_string(config.class_mode);
  j["seed"] = config.seed;
  j["feature_dim"] = result.model.feature_dim();
  j["n_train"] = train.size();
  j["n_train_fit"] = fit_set.size();
  j["n_test"] = test.size();
  j["train_histogram"] = histogram_json(train);
  j["test_histogram"] = histogram_json(test);
  if (!result.importance.empty()) {
    Json imp = Json::array();
    for (const auto& f : result.importance) imp.push_back({{"feature", f.name}, {"importance", f.importance}});
    j["importance"] = imp;
  }
  result.report_json = std::move(j);

  if (!config.out_dir.empty()) in_stage("write", [&] { write_experiment_artifacts(config.out_dir, result); });
  return result;
}

/// Evaluates a saved model on a manifest: rows marked "test" when any row
/// carries a split hint, every usable row otherwise.
inline std::pair<EvalReport, Json> evaluate_model(const ModelFile& m, const std::filesystem::path& manifest) {
  const auto entries = in_stage("ingest", [&] { return read_manifest(manifest); });
  const auto all = labeled_indices(entries, m.class_mode);
  const bool any_hint = std::any_of(entries.begin(), entries.end(),
                                    [](const ManifestEntry& e) { return e.split_hint != SplitHint::kNone; });
  Dataset<std::size_t> chosen{{}, m.class_mode, m.seed};
  for (const auto& ex : all.examples) {
    if (!any_hint || entries[ex.payload].split_hint == SplitHint::kTest) chosen.examples.push_back(ex);
  }
  require(!chosen.empty(), ErrorKind::kDegenerateClass, "ingest: no examples to evaluate");

  std::vector<ManifestEntry> used;
  for (const auto& ex : chosen.examples) used.push_back(entries[ex.payload]);
  const auto inputs = in_stage("features", [&] {
    return extract_examples(used, m.features.setting, m.features.params, is_frame_lstm(*m.model));
  });
  const auto rows = iota_indices(used.size());
  const auto pred = in_stage("evaluate", [&] { return argmax_rows(predict_inputs(m, inputs, rows)); });
  EvalReport report = evaluate(pred, chosen.class_indices(), class_count(m.class_mode));
  Json j = to_json(report, m.class_names());
  j["model_kind"] = m.model_kind;
  j["setting"] = to_string(m.features.setting);
  j["class_mode"] = to_string(m.class_mode);
  j["n_test"] = chosen.size();
  return {std::move(report), std::move(j)};
}

/// Class probabilities for one utterance. The clip may be null for
/// text-only models.
inline Vector predict_one(const ModelFile& m, const AudioClip* clip, std::string_view transcript) {
  ExampleInput in;
  in.transcript = std::string(transcript);
  const bool frames = is_frame_lstm(*m.model);
  if (uses_audio(m.features.setting) || frames) {
    require(clip != nullptr, ErrorKind::kConfig, "this model needs audio input");
    const auto options = audio_options(m.features.params);
    in.audio = extract_audio_features(*clip, options);
    if (frames) in.frames = extract_frame_sequence(*clip, options).frames;
  }
  const std::size_t row = 0;
  return predict_inputs(m, std::span<const ExampleInput>(&in, 1), std::span<const std::size_t>(&row, 1))
      .row(0)
      .transpose();
}

inline std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// CSV of per-utterance features: source_id, label, the feature columns of
/// the setting. Text columns use a vocabulary fit on the whole manifest.
inline std::size_t export_features(const std::filesystem::path& manifest, Setting setting,
                                   const FeatureParams& params, std::ostream& os) {
  const auto entries = in_stage("ingest", [&] { return read_manifest(manifest); });
  const auto all = labeled_indices(entries, ClassMode::kSix);
  std::vector<ManifestEntry> used;
  for (const auto& ex : all.examples) used.push_back(entries[ex.payload]);
  const auto inputs = in_stage("features", [&] { return extract_examples(used, setting, params, false); });

  FeatureSpec spec;
  spec.setting = setting;
  spec.params = params;
  if (uses_text(setting) && !used.empty()) {
    std::vector<TokenList> corpus;
    for (const auto& e : used) corpus.push_back(normalize_text(e.transcript));
    spec.vocabulary = fit_vocabulary(corpus);
  }
  os << "source_id,label";
  for (const auto& name : spec.feature_names()) os << ',' << name;
  os << '\n';
  const auto X = feature_matrix(spec, inputs, iota_indices(used.size()));
  for (std::size_t i = 0; i < used.size(); ++i) {
    std::string id = used[i].audio_path.string();
    // Quote ids holding a CSV delimiter.
    if (id.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : id) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      id = quoted + "\"";
    }
    os << id << ',' << to_string(all.examples[i].label);
    for (Eigen::Index j = 0; j < X.cols(); ++j) os << ',' << format_g9(X(Eigen::Index(i), j));
    os << '\n';
  }
  return used.size();
}

}  // namespace emoforge

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

#include <sstream>

#include "emoforge/audio_features.hpp"
#include "emoforge/hyperparameters.hpp"
#include "emoforge/text_features.hpp"

namespace emoforge {

enum class Setting { kAudioOnly, kTextOnly, kAudioText };

inline const char* to_string(Setting s) {
  switch (s) {
    case Setting::kAudioOnly: return "audio_only";
    case Setting::kTextOnly: return "text_only";
    case Setting::kAudioText: return "audio_text";
  }
  return "audio_text";
}

inline Setting parse_setting(std::string_view s) {
  if (s == "audio_only") return Setting::kAudioOnly;
  if (s == "text_only") return Setting::kTextOnly;
  if (s == "audio_text") return Setting::kAudioText;
  fail(ErrorKind::kConfig, "unknown setting '" + std::string(s) + "' (expected audio_only, text_only or audio_text)");
}

inline bool uses_audio(Setting s) { return s != Setting::kTextOnly; }
inline bool uses_text(Setting s) { return s != Setting::kAudioOnly; }

inline AudioFeatureOptions audio_options(const FeatureParams& p) {
  AudioFeatureOptions o;
  o.frame = {p.frame_length, p.hop_length};
  o.pitch = {p.pitch_min_hz, p.pitch_max_hz};
  o.harmonic_window = p.harmonic_window;
  o.pause_threshold = p.pause_threshold;
  validate(o.frame);
  require(o.pitch.min_hz > 0.0 && o.pitch.min_hz < o.pitch.max_hz, ErrorKind::kParameter,
          "pitch range must satisfy 0 < min < max");
  require(o.harmonic_window >= 1 && o.harmonic_window <= kMaxMedianWindow, ErrorKind::kParameter,
          "harmonic window out of range");
  require(o.pause_threshold >= 0.0, ErrorKind::kParameter, "pause threshold must be non-negative");
  return o;
}

/// Audio block first, then the text block.
inline Vector fuse(const AudioFeatureVector& audio, const Vector& text, std::size_t vocab_size) {
  require(static_cast<std::size_t>(text.size()) == vocab_size, ErrorKind::kShape,
          "text vector has " + std::to_string(text.size()) + " entries, vocabulary has " + std::to_string(vocab_size));
  Vector out(Eigen::Index(AudioFeatureVector::kSize) + text.size());
  const auto a = audio.values();
  for (std::size_t i = 0; i < a.size(); ++i) out[Eigen::Index(i)] = a[i];
  out.tail(text.size()) = text;
  return out;
}

/// Everything needed to turn a (clip, transcript) pair into model input.
struct FeatureSpec {
  Setting setting = Setting::kAudioText;
  FeatureParams params;
  std::optional<Vocabulary> vocabulary;  // present iff the setting uses text

  std::size_t audio_dim() const { return uses_audio(setting) ? AudioFeatureVector::kSize : 0; }
  std::size_t text_dim() const { return vocabulary ? vocabulary->size() : 0; }
  std::size_t dim() const { return audio_dim() + text_dim(); }

  std::vector<std::string> feature_names() const {
    std::vector<std::string> names;
    if (uses_audio(setting)) names.assign(AudioFeatureVector::kNames.begin(), AudioFeatureVector::kNames.end());
    if (vocabulary) {
      for (const auto& term : vocabulary->terms()) names.push_back("tfidf:" + term);
    }
    return names;
  }

  /// Assembles one row from precomputed audio features and raw text.
  Vector row(const AudioFeatureVector* audio, std::string_view transcript) const {
    Vector out(static_cast<Eigen::Index>(dim()));
    if (uses_audio(setting)) {
      require(audio != nullptr, ErrorKind::kParameter, "setting needs audio features");
      const auto a = audio->values();
      for (std::size_t i = 0; i < a.size(); ++i) out[Eigen::Index(i)] = a[i];
    }
    if (vocabulary) out.tail(Eigen::Index(text_dim())) = tfidf_transform(normalize_text(transcript), *vocabulary);
    return out;
  }

  Json to_json() const {
    Json j;
    j["setting"] = to_string(setting);
    j["features"] = params;
    j["feature_names"] = feature_names();
    if (vocabulary) {
      std::ostringstream tsv;
      write_vocabulary(tsv, *vocabulary);
      j["vocabulary"] = tsv.str();
    }
    return j;
  }

  static FeatureSpec from_json(const Json& j) {
    FeatureSpec s;
    s.setting = parse_setting(j.at("setting").get<std::string>());
    s.params = j.at("features").get<FeatureParams>();
    if (j.contains("vocabulary")) {
      std::istringstream tsv(j.at("vocabulary").get<std::string>());
      s.vocabulary = read_vocabulary(tsv);
    }
    require(uses_text(s.setting) == s.vocabulary.has_value(), ErrorKind::kFormat,
            "vocabulary presence does not match the setting");
    return s;
  }
};

}  // namespace emoforge

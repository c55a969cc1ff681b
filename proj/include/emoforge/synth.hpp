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
#include <numbers>

#include "emoforge/dataset.hpp"
#include "emoforge/wav.hpp"

namespace emoforge {

// Synthetic cross-cue corpus.
//
// Angry, Happy and Sad differ only in their audio (loudness, pitch, pause
// density) and share one filler vocabulary. Fear, Surprise and Neutral share a
// single audio profile and differ only through class-exclusive keywords.

struct SynthOptions {
  std::size_t clips_per_class = 100;
  std::uint32_t sample_rate = 16000;
  double min_seconds = 0.9;
  double max_seconds = 1.1;
  double excited_fraction = 0.3;  // Happy rows written with the raw label "excited"
};

struct VoiceProfile {
  double amplitude;
  double f0_hz;
  double pause_fraction;
};

inline VoiceProfile voice_profile(EmotionLabel label) {
  switch (label) {
    case EmotionLabel::kAngry: return {0.75, 280.0, 0.05};
    case EmotionLabel::kHappy: return {0.45, 200.0, 0.20};
    case EmotionLabel::kSad: return {0.15, 110.0, 0.45};
    default: return {0.30, 160.0, 0.30};
  }
}

inline bool audio_cued(EmotionLabel label) {
  return label == EmotionLabel::kAngry || label == EmotionLabel::kHappy || label == EmotionLabel::kSad;
}

/// Voiced syllables (four decaying harmonics under a raised-cosine envelope)
/// separated by silent gaps, plus faint noise.
inline std::vector<double> synth_voice(const VoiceProfile& base, std::uint32_t sample_rate, double seconds, Rng& rng) {
  const double amp = base.amplitude * uniform(rng, 0.85, 1.15);
  const double f0 = base.f0_hz * uniform(rng, 0.93, 1.07);
  const double pause = std::clamp(base.pause_fraction + uniform(rng, -0.05, 0.05), 0.0, 0.9);
  const auto n = static_cast<std::size_t>(seconds * sample_rate);
  std::vector<double> y(n, 0.0);
  const double norm = 1.0 + 1.0 / 2 + 1.0 / 3 + 1.0 / 4;
  std::size_t pos = 0;
  double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  while (pos < n) {
    const auto len = std::min(n - pos, static_cast<std::size_t>(uniform(rng, 0.08, 0.16) * sample_rate));
    if (uniform01(rng) >= pause) {
      const double drift = uniform(rng, 0.97, 1.03);
      for (std::size_t k = 0; k < len; ++k) {
        const double env = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / len);
        const double w = 2.0 * std::numbers::pi * f0 * drift / sample_rate;
        double s = 0.0;
        for (int h = 1; h <= 4; ++h) s += std::sin(h * (phase + w * static_cast<double>(k))) / h;
        y[pos + k] = amp * env * s / norm;
      }
      phase += 2.0 * std::numbers::pi * f0 * drift * static_cast<double>(len) / sample_rate;
    }
    pos += len;
  }
  for (double& v : y) v = std::clamp(v + 0.01 * amp * uniform(rng, -1.0, 1.0), -1.0, 1.0);
  return y;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {"i",    "think", "we",   "should", "talk",  "about", "the",
                                                 "plan", "today", "just", "maybe",  "it",    "was",   "that",
                                                 "what", "you",   "said", "know",   "going", "there", "then",
                                                 "so",   "well",  "okay"};
  return words;
}

inline std::vector<std::string> keywords(EmotionLabel label) {
  switch (label) {
    case EmotionLabel::kFear: return {"scared", "afraid", "terrified", "frightening", "nervous"};
    case EmotionLabel::kSurprise: return {"wow", "unbelievable", "unexpected", "whoa", "shocked"};
    case EmotionLabel::kNeutral: return {"schedule", "report", "tuesday", "meeting", "document"};
    default: return {};
  }
}

inline std::string synth_transcript(EmotionLabel label, Rng& rng) {
  const auto& filler = filler_words();
  std::vector<std::string> words;
  const std::size_t n_filler = audio_cued(label) ? 6 + uniform_index(rng, 4) : 4 + uniform_index(rng, 4);
  for (std::size_t i = 0; i < n_filler; ++i) words.push_back(filler[uniform_index(rng, filler.size())]);
  const auto keys = keywords(label);
  if (!keys.empty()) {
    const std::size_t n_keys = 1 + uniform_index(rng, 2);
    for (std::size_t i = 0; i < n_keys; ++i) {
      const auto at = static_cast<std::ptrdiff_t>(uniform_index(rng, words.size() + 1));
      words.insert(words.begin() + at, keys[uniform_index(rng, keys.size())]);
    }
  }
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string w = words[i];
    if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    text += (i ? " " : "") + w;
  }
  static const char* endings[] = {".", "!", "?", "..."};
  return text + endings[uniform_index(rng, 4)];
}

inline std::string lowercase_label(EmotionLabel label) {
  std::string s = to_string(label);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Writes <dir>/wav/*.wav and <dir>/manifest.jsonl; returns the manifest path.
inline std::filesystem::path write_synthetic_corpus(const std::filesystem::path& dir, std::uint64_t seed,
                                                    const SynthOptions& options = {}) {
  require(options.clips_per_class >= 1, ErrorKind::kParameter, "need at least one clip per class");
  require(options.sample_rate > 0 && options.min_seconds > 0.0 && options.min_seconds <= options.max_seconds,
          ErrorKind::kParameter, "invalid clip timing");
  std::filesystem::create_directories(dir / "wav");
  Rng rng(seed);
  std::ostringstream manifest;
  for (EmotionLabel label : kSixClasses) {
    const VoiceProfile profile = voice_profile(label);
    for (std::size_t k = 0; k < options.clips_per_class; ++k) {
      const std::string name = lowercase_label(label) + "_" + std::to_string(k) + ".wav";
      const double seconds = uniform(rng, options.min_seconds, options.max_seconds);
      write_wav(dir / "wav" / name, synth_voice(profile, options.sample_rate, seconds, rng), options.sample_rate);
      std::string raw = lowercase_label(label);
      if (label == EmotionLabel::kHappy && uniform01(rng) < options.excited_fraction) raw = "excited";
      nlohmann::json row;
      row["audio"] = "wav/" + name;
      row["text"] = synth_transcript(label, rng);
      row["label"] = raw;
      manifest << row.dump() << '\n';
    }
  }
  const auto path = dir / "manifest.jsonl";
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << manifest.str();
  return path;
}

}  // namespace emoforge

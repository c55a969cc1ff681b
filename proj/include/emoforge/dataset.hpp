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
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <json.hpp>

#include "emoforge/common.hpp"

namespace emoforge {

enum class EmotionLabel { kAngry = 0, kHappy, kSad, kFear, kSurprise, kNeutral };

enum class ClassMode { kSix, kFour };

inline constexpr std::array<EmotionLabel, 6> kSixClasses = {
    EmotionLabel::kAngry, EmotionLabel::kHappy,    EmotionLabel::kSad,
    EmotionLabel::kFear,  EmotionLabel::kSurprise, EmotionLabel::kNeutral};
inline constexpr std::array<EmotionLabel, 4> kFourClasses = {EmotionLabel::kAngry, EmotionLabel::kHappy,
                                                            EmotionLabel::kSad, EmotionLabel::kNeutral};

inline std::span<const EmotionLabel> classes_of(ClassMode mode) {
  if (mode == ClassMode::kFour) return kFourClasses;
  return kSixClasses;
}

inline std::size_t class_count(ClassMode mode) { return classes_of(mode).size(); }

inline const char* to_string(EmotionLabel label) {
  switch (label) {
    case EmotionLabel::kAngry: return "angry";
    case EmotionLabel::kHappy: return "happy";
    case EmotionLabel::kSad: return "sad";
    case EmotionLabel::kFear: return "fear";
    case EmotionLabel::kSurprise: return "surprise";
    case EmotionLabel::kNeutral: return "neutral";
  }
  return "?";
}

inline const char* to_string(ClassMode mode) { return mode == ClassMode::kFour ? "four" : "six"; }

inline ClassMode parse_class_mode(std::string_view s) {
  if (s == "six" || s == "6") return ClassMode::kSix;
  if (s == "four" || s == "4") return ClassMode::kFour;
  fail(ErrorKind::kConfig, "class mode must be 6 or 4, got '" + std::string(s) + "'");
}

inline bool admissible(EmotionLabel label, ClassMode mode) {
  const auto cls = classes_of(mode);
  return std::find(cls.begin(), cls.end(), label) != cls.end();
}

/// Position of a label within the class set of a mode; this is the integer
/// target the classifiers see.
inline std::size_t class_index(EmotionLabel label, ClassMode mode) {
  const auto cls = classes_of(mode);
  const auto it = std::find(cls.begin(), cls.end(), label);
  require(it != cls.end(), ErrorKind::kDomain,
          std::string("label '") + to_string(label) + "' not admissible in " + to_string(mode) + "-class mode");
  return static_cast<std::size_t>(it - cls.begin());
}

inline EmotionLabel label_at(std::size_t index, ClassMode mode) {
  const auto cls = classes_of(mode);
  require(index < cls.size(), ErrorKind::kDomain, "class index out of range");
  return cls[index];
}

/// Maps a raw annotation onto the working label set. "excited" folds into
/// happy; "others" and "frustration" are dropped, as are fear and surprise in
/// four-class mode.
inline std::optional<EmotionLabel> map_label(std::string_view raw, ClassMode mode = ClassMode::kSix) {
  std::string key(raw);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  std::optional<EmotionLabel> label;
  if (key == "angry") {
    label = EmotionLabel::kAngry;
  } else if (key == "happy" || key == "excited") {
    label = EmotionLabel::kHappy;
  } else if (key == "sad") {
    label = EmotionLabel::kSad;
  } else if (key == "fear") {
    label = EmotionLabel::kFear;
  } else if (key == "surprise") {
    label = EmotionLabel::kSurprise;
  } else if (key == "neutral") {
    label = EmotionLabel::kNeutral;
  } else if (key == "others" || key == "frustration") {
    return std::nullopt;
  } else {
    fail(ErrorKind::kUnknownLabel, "'" + std::string(raw) + "'");
  }
  if (!admissible(*label, mode)) return std::nullopt;
  return label;
}

template <typename Payload>
struct Example {
  Payload payload;
  EmotionLabel label;
};

/// Labeled examples under one class mode. The payload is whatever the current
/// stage works on: manifest rows, decoded clips, or feature vectors.
template <typename Payload>
struct Dataset {
  std::vector<Example<Payload>> examples;
  ClassMode class_mode = ClassMode::kSix;
  std::uint64_t seed = 0;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }

  void add(Payload payload, EmotionLabel label) {
    require(admissible(label, class_mode), ErrorKind::kDomain,
            std::string("label '") + to_string(label) + "' not admissible in " + to_string(class_mode) +
                "-class mode");
    examples.push_back({std::move(payload), label});
  }

  std::vector<std::size_t> class_indices() const {
    std::vector<std::size_t> y;
    y.reserve(examples.size());
    for (const auto& ex : examples) y.push_back(class_index(ex.label, class_mode));
    return y;
  }
};

/// Counts per label. Every label admissible under the mode appears, zero or not.
template <typename Payload>
std::map<EmotionLabel, std::size_t> class_histogram(const Dataset<Payload>& dataset) {
  std::map<EmotionLabel, std::size_t> counts;
  for (EmotionLabel label : classes_of(dataset.class_mode)) counts[label] = 0;
  for (const auto& ex : dataset.examples) ++counts[ex.label];
  return counts;
}

struct UpsampleOptions {
  double rho = 0.5;
  // Labels that must reach the target; empty means every label of the mode.
  std::vector<EmotionLabel> classes;
};

/// Duplicates minority-class examples (seeded, uniform with replacement)
/// until every class holds at least ceil(rho * majority count). Originals
/// keep their positions; duplicates are appended class by class.
template <typename Payload>
Dataset<Payload> upsample(const Dataset<Payload>& dataset, std::uint64_t seed, const UpsampleOptions& options = {}) {
  require(!dataset.empty(), ErrorKind::kDegenerateClass, "cannot upsample an empty dataset");
  require(options.rho > 0.0 && options.rho <= 1.0, ErrorKind::kParameter, "rho must lie in (0, 1]");
  std::vector<EmotionLabel> classes = options.classes;
  if (classes.empty()) classes.assign(classes_of(dataset.class_mode).begin(), classes_of(dataset.class_mode).end());

  std::map<EmotionLabel, std::vector<std::size_t>> members;
  for (EmotionLabel label : classes) members[label];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto it = members.find(dataset.examples[i].label);
    if (it != members.end()) it->second.push_back(i);
  }
  std::size_t majority = 0;
  for (EmotionLabel label : classes) {
    require(!members[label].empty(), ErrorKind::kDegenerateClass,
            std::string("class '") + to_string(label) + "' has no examples");
    majority = std::max(majority, members[label].size());
  }
  const auto target = static_cast<std::size_t>(std::ceil(options.rho * static_cast<double>(majority)));

  Dataset<Payload> out = dataset;
  out.seed = seed;
  Rng rng(seed);
  for (EmotionLabel label : classes) {
    const auto& pool = members[label];
    for (std::size_t n = pool.size(); n < target; ++n) {
      out.examples.push_back(dataset.examples[pool[uniform_index(rng, pool.size())]]);
    }
  }
  return out;
}

/// Seeded shuffle then prefix split; the train part holds
/// round(train_fraction * N) examples.
template <typename Payload>
std::pair<Dataset<Payload>, Dataset<Payload>> split(const Dataset<Payload>& dataset, double train_fraction,
                                                    std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0, ErrorKind::kParameter,
          "train fraction must lie strictly between 0 and 1");
  const std::size_t n = dataset.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  require(n_train > 0 && n_train < n, ErrorKind::kSplit,
          "split of " + std::to_string(n) + " examples leaves a partition empty");

  auto order = iota_indices(n);
  Rng rng(seed);
  shuffle(order, rng);

  Dataset<Payload> train{{}, dataset.class_mode, seed};
  Dataset<Payload> test{{}, dataset.class_mode, seed};
  train.examples.reserve(n_train);
  test.examples.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).examples.push_back(dataset.examples[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

enum class SplitHint { kNone, kTrain, kTest };

/// One manifest line: an utterance with its transcript and raw annotation.
struct ManifestEntry {
  std::filesystem::path audio_path;
  std::string transcript;
  std::string raw_label;
  SplitHint split_hint = SplitHint::kNone;
};

/// Parses JSONL with fields audio, text, label and optional split. Relative
/// audio paths resolve against the manifest's directory.
inline std::vector<ManifestEntry> parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {}) {
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = "manifest line " + std::to_string(line_no);
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::kFormat, where + ": " + e.what());
    }
    require(row.is_object(), ErrorKind::kFormat, where + ": expected an object");
    for (const char* key : {"audio", "text", "label"}) {
      require(row.contains(key) && row[key].is_string(), ErrorKind::kFormat,
              where + ": missing string field '" + key + "'");
    }
    ManifestEntry entry;
    entry.audio_path = row["audio"].get<std::string>();
    if (entry.audio_path.is_relative() && !base_dir.empty()) entry.audio_path = base_dir / entry.audio_path;
    entry.transcript = row["text"].get<std::string>();
    entry.raw_label = row["label"].get<std::string>();
    if (row.contains("split")) {
      require(row["split"].is_string(), ErrorKind::kFormat, where + ": split must be a string");
      const auto hint = row["split"].get<std::string>();
      if (hint == "train") {
        entry.split_hint = SplitHint::kTrain;
      } else if (hint == "test") {
        entry.split_hint = SplitHint::kTest;
      } else {
        fail(ErrorKind::kFormat, where + ": split must be \"train\" or \"test\"");
      }
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open manifest '" + path.string() + "'");
  return parse_manifest(in, path.parent_path());
}

/// Applies label mapping and drops unusable rows.
inline Dataset<ManifestEntry> to_dataset(const std::vector<ManifestEntry>& entries, ClassMode mode) {
  Dataset<ManifestEntry> ds{{}, mode, 0};
  for (const auto& entry : entries) {
    if (auto label = map_label(entry.raw_label, mode)) ds.add(entry, *label);
  }
  return ds;
}

}  // namespace emoforge

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
#include <utility>

#include "emoforge/models/gradient_boosting.hpp"
#include "emoforge/models/random_forest.hpp"
#include "emoforge/transforms.hpp"

namespace emoforge {

struct FeatureImportance {
  std::string name;
  std::size_t index = 0;
  double importance = 0.0;
};

/// Raw split improvements per feature for forests and boosted models.
inline std::vector<double> tree_improvements(const Classifier& model) {
  const Classifier& m = unwrap(model);
  if (const auto* rf = dynamic_cast<const RandomForest*>(&m)) return rf->improvements();
  if (const auto* gb = dynamic_cast<const GradientBoosting*>(&m)) return gb->improvements();
  fail(ErrorKind::kUnsupported, "feature importance needs a tree model, got '" + m.kind() + "'");
}

/// Improvements normalized to sum to one, sorted descending (ties by index).
/// A model without any split spreads the mass uniformly.
inline std::vector<FeatureImportance> feature_importance(const Classifier& model,
                                                         std::span<const std::string> feature_names) {
  const auto raw = tree_improvements(model);
  require(feature_names.size() == raw.size(), ErrorKind::kShape,
          "expected " + std::to_string(raw.size()) + " feature names, got " + std::to_string(feature_names.size()));
  double total = 0.0;
  for (double v : raw) total += v;
  std::vector<FeatureImportance> out;
  out.reserve(raw.size());
  for (std::size_t f = 0; f < raw.size(); ++f) {
    const double share = total > 0.0 ? raw[f] / total : 1.0 / static_cast<double>(raw.size());
    out.push_back({feature_names[f], f, share});
  }
  std::stable_sort(out.begin(), out.end(), [](const FeatureImportance& a, const FeatureImportance& b) {
    return a.importance > b.importance;
  });
  return out;
}

inline void write_importance_csv(std::ostream& os, std::span<const FeatureImportance> ranking) {
  os << "rank,feature,index,importance\n";
  char buf[32];
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.9g", ranking[r].importance);
    os << r + 1 << ',' << ranking[r].name << ',' << ranking[r].index << ',' << buf << '\n';
  }
}

}  // namespace emoforge

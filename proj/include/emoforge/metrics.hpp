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

#include <ostream>

#include "emoforge/hyperparameters.hpp"

namespace emoforge {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  // confusion[t][p]: true class t predicted as p.
  std::vector<std::vector<std::size_t>> confusion;

  std::size_t num_classes() const { return confusion.size(); }
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& row : confusion) {
      for (std::size_t v : row) n += v;
    }
    return n;
  }
};

inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

/// Precision tp/(tp+fp), recall tp/(tp+fn), F1 their harmonic mean (0 when
/// both vanish). Macro averages skip classes without support.
inline EvalReport evaluate(std::span<const std::size_t> predictions, std::span<const std::size_t> truth,
                           std::size_t num_classes) {
  require(predictions.size() == truth.size() && !truth.empty(), ErrorKind::kShape,
          "predictions and truth must have the same positive length");
  require(num_classes >= 1, ErrorKind::kParameter, "need at least one class");
  EvalReport r;
  r.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] < num_classes && predictions[i] < num_classes, ErrorKind::kDomain,
            "label " + std::to_string(std::max(truth[i], predictions[i])) + " out of range");
    ++r.confusion[truth[i]][predictions[i]];
  }
  std::size_t correct = 0;
  std::size_t supported = 0;
  r.per_class.resize(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double tp = static_cast<double>(r.confusion[c][c]);
    double fp = 0.0, fn = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) {
      if (k == c) continue;
      fp += static_cast<double>(r.confusion[k][c]);
      fn += static_cast<double>(r.confusion[c][k]);
    }
    auto& m = r.per_class[c];
    m.support = static_cast<std::size_t>(tp + fn);
    m.precision = safe_ratio(tp, tp + fp);
    m.recall = safe_ratio(tp, tp + fn);
    m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    correct += r.confusion[c][c];
    if (m.support > 0) {
      ++supported;
      r.macro_precision += m.precision;
      r.macro_recall += m.recall;
      r.macro_f1 += m.f1;
    }
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  r.macro_precision /= static_cast<double>(supported);
  r.macro_recall /= static_cast<double>(supported);
  r.macro_f1 /= static_cast<double>(supported);
  return r;
}

/// Accuracy restricted to examples whose true class is in `classes`.
inline double subset_accuracy(const EvalReport& r, std::span<const std::size_t> classes) {
  std::size_t hits = 0, total = 0;
  for (std::size_t c : classes) {
    require(c < r.num_classes(), ErrorKind::kDomain, "class out of range");
    hits += r.confusion[c][c];
    for (std::size_t v : r.confusion[c]) total += v;
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

inline Json to_json(const EvalReport& r, std::span<const std::string> class_names) {
  require(class_names.size() == r.num_classes(), ErrorKind::kShape, "one name per class expected");
  Json j;
  j["accuracy"] = r.accuracy;
  j["averaging"] = "macro";
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["macro_f1"] = r.macro_f1;
  j["classes"] = class_names;
  j["confusion_matrix"] = r.confusion;
  Json per = Json::array();
  for (std::size_t c = 0; c < r.num_classes(); ++c) {
    const auto& m = r.per_class[c];
    per.push_back({{"class", class_names[c]},
                   {"precision", m.precision},
                   {"recall", m.recall},
                   {"f1", m.f1},
                   {"support", m.support}});
  }
  j["per_class"] = per;
  j["total"] = r.total();
  return j;
}

/// Header row of predicted class names; one row per true class.
inline void write_confusion_csv(std::ostream& os, const EvalReport& r, std::span<const std::string> class_names) {
  require(class_names.size() == r.num_classes(), ErrorKind::kShape, "one name per class expected");
  os << "true\\predicted";
  for (const auto& n : class_names) os << ',' << n;
  os << '\n';
  for (std::size_t t = 0; t < r.num_classes(); ++t) {
    os << class_names[t];
    for (std::size_t v : r.confusion[t]) os << ',' << v;
    os << '\n';
  }
}

}  // namespace emoforge

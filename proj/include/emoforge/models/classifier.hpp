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

#include <memory>

#include "emoforge/hyperparameters.hpp"

namespace emoforge {

/// Multi-class model producing a row-stochastic probability matrix. Class
/// labels are indices in [0, num_classes).
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t num_classes() const = 0;
  virtual std::size_t feature_dim() const = 0;
  virtual Matrix predict_proba(const Matrix& X) const = 0;
  // Parameters only; the kind/num_classes/feature_dim envelope is added by to_json.
  virtual Json parameters() const = 0;

  std::vector<std::size_t> predict(const Matrix& X) const { return argmax_rows(predict_proba(X)); }

  Json to_json() const {
    Json j;
    j["kind"] = kind();
    j["num_classes"] = num_classes();
    j["feature_dim"] = feature_dim();
    j["parameters"] = parameters();
    return j;
  }

 protected:
  void check_input(const Matrix& X) const {
    require(static_cast<std::size_t>(X.cols()) == feature_dim(), ErrorKind::kShape,
            kind() + " expects " + std::to_string(feature_dim()) + " features, got " + std::to_string(X.cols()));
  }
};

using ClassifierPtr = std::unique_ptr<Classifier>;

/// Shared precondition check for fit functions.
inline void check_training_data(const Matrix& X, std::span<const std::size_t> y, std::size_t num_classes) {
  require(static_cast<std::size_t>(X.rows()) == y.size(), ErrorKind::kShape, "feature/label count mismatch");
  require(X.cols() > 0, ErrorKind::kShape, "features must have at least one column");
  require(num_classes >= 2, ErrorKind::kParameter, "need at least two classes");
  require(y.size() >= 2, ErrorKind::kDegenerateLabel, "need at least two training examples");
  std::vector<bool> seen(num_classes, false);
  std::size_t distinct = 0;
  for (std::size_t label : y) {
    require(label < num_classes, ErrorKind::kDomain, "label " + std::to_string(label) + " out of range");
    if (!seen[label]) {
      seen[label] = true;
      ++distinct;
    }
  }
  require(distinct >= 2, ErrorKind::kDegenerateLabel, "training labels contain a single class");
  require(X.allFinite(), ErrorKind::kDomain, "non-finite feature value");
}

inline std::vector<std::size_t> class_counts(std::span<const std::size_t> y, std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t label : y) ++counts[label];
  return counts;
}

inline Json matrix_to_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

inline Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  require(static_cast<Eigen::Index>(data.size()) == rows * cols, ErrorKind::kFormat, "matrix size mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

inline Json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vector vector_from_json(const Json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size()));
}

}  // namespace emoforge

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

#include "emoforge/models/classifier.hpp"

namespace emoforge {

/// Affine rescaling of the column block [begin, end); other columns pass
/// through untouched.
struct BlockTransform {
  enum class Kind { kIdentity, kStandardize, kMinMax };

  Kind kind = Kind::kIdentity;
  std::size_t begin = 0;
  std::size_t end = 0;
  Vector offset;  // subtracted first
  Vector scale;   // then divided by

  static const char* name(Kind k) {
    switch (k) {
      case Kind::kIdentity: return "identity";
      case Kind::kStandardize: return "standardize";
      case Kind::kMinMax: return "minmax";
    }
    return "identity";
  }

  static Kind parse(std::string_view s) {
    if (s == "identity") return Kind::kIdentity;
    if (s == "standardize") return Kind::kStandardize;
    if (s == "minmax") return Kind::kMinMax;
    fail(ErrorKind::kFormat, "unknown transform '" + std::string(s) + "'");
  }

  bool is_identity() const { return kind == Kind::kIdentity || begin == end; }

  void apply_row(Eigen::Ref<Eigen::RowVectorXd> row) const {
    if (is_identity()) return;
    for (std::size_t j = begin; j < end; ++j) {
      double v = (row[Eigen::Index(j)] - offset[Eigen::Index(j - begin)]) / scale[Eigen::Index(j - begin)];
      // Min-max output feeds a multinomial model, which needs non-negative input.
      if (kind == Kind::kMinMax) v = std::clamp(v, 0.0, 1.0);
      row[Eigen::Index(j)] = v;
    }
  }

  Matrix apply(Matrix X) const {
    if (is_identity()) return X;
    require(static_cast<std::size_t>(X.cols()) >= end, ErrorKind::kShape, "transform block exceeds input width");
    for (Eigen::Index r = 0; r < X.rows(); ++r) apply_row(X.row(r));
    return X;
  }

  Json to_json() const {
    Json j;
    j["kind"] = name(kind);
    j["begin"] = begin;
    j["end"] = end;
    j["offset"] = vector_to_json(offset);
    j["scale"] = vector_to_json(scale);
    return j;
  }

  static BlockTransform from_json(const Json& j) {
    BlockTransform t;
    t.kind = parse(j.at("kind").get<std::string>());
    t.begin = j.at("begin").get<std::size_t>();
    t.end = j.at("end").get<std::size_t>();
    t.offset = vector_from_json(j.at("offset"));
    t.scale = vector_from_json(j.at("scale"));
    require(t.begin <= t.end && static_cast<std::size_t>(t.offset.size()) == t.end - t.begin &&
                static_cast<std::size_t>(t.scale.size()) == t.end - t.begin && (t.scale.array() > 0.0).all(),
            ErrorKind::kFormat, "malformed transform");
    return t;
  }
};

inline BlockTransform identity_transform() { return {}; }

/// Zero mean, unit population variance on the block. Constant columns keep
/// scale 1.
inline BlockTransform fit_standardize(const Matrix& X, std::size_t begin, std::size_t end) {
  require(begin <= end && end <= static_cast<std::size_t>(X.cols()) && X.rows() > 0, ErrorKind::kShape,
          "standardize block out of range");
  BlockTransform t{BlockTransform::Kind::kStandardize, begin, end, Vector(Eigen::Index(end - begin)),
                   Vector(Eigen::Index(end - begin))};
  for (std::size_t j = begin; j < end; ++j) {
    const auto col = X.col(Eigen::Index(j));
    const double m = col.mean();
    const double sd = std::sqrt((col.array() - m).square().mean());
    t.offset[Eigen::Index(j - begin)] = m;
    t.scale[Eigen::Index(j - begin)] = sd > 0.0 ? sd : 1.0;
  }
  return t;
}

/// Maps train min..max to [0, 1], clamping unseen values.
inline BlockTransform fit_minmax(const Matrix& X, std::size_t begin, std::size_t end) {
  require(begin <= end && end <= static_cast<std::size_t>(X.cols()) && X.rows() > 0, ErrorKind::kShape,
          "min-max block out of range");
  BlockTransform t{BlockTransform::Kind::kMinMax, begin, end, Vector(Eigen::Index(end - begin)),
                   Vector(Eigen::Index(end - begin))};
  for (std::size_t j = begin; j < end; ++j) {
    const auto col = X.col(Eigen::Index(j));
    const double lo = col.minCoeff();
    const double range = col.maxCoeff() - lo;
    t.offset[Eigen::Index(j - begin)] = lo;
    t.scale[Eigen::Index(j - begin)] = range > 0.0 ? range : 1.0;
  }
  return t;
}

/// Applies a fitted input transform before delegating to the wrapped model.
class ScaledClassifier final : public Classifier {
 public:
  ScaledClassifier(BlockTransform transform, ClassifierPtr inner)
      : transform_(std::move(transform)), inner_(std::move(inner)) {
    require(inner_ != nullptr, ErrorKind::kParameter, "scaled classifier needs a model");
  }

  std::string kind() const override { return "scaled"; }
  std::size_t num_classes() const override { return inner_->num_classes(); }
  std::size_t feature_dim() const override { return inner_->feature_dim(); }
  const Classifier& inner() const { return *inner_; }
  const BlockTransform& transform() const { return transform_; }

  Matrix predict_proba(const Matrix& X) const override {
    check_input(X);
    return inner_->predict_proba(transform_.apply(X));
  }

  Json parameters() const override { return {{"transform", transform_.to_json()}, {"model", inner_->to_json()}}; }

 private:
  BlockTransform transform_;
  ClassifierPtr inner_;
};

/// Strips ScaledClassifier wrappers.
inline const Classifier& unwrap(const Classifier& model) {
  if (const auto* s = dynamic_cast<const ScaledClassifier*>(&model)) return unwrap(s->inner());
  return model;
}

}  // namespace emoforge

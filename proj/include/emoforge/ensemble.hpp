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

/// Member kinds of the two named ensembles.
inline std::vector<std::string> ensemble_members(std::string_view name) {
  if (name == "e1") return {"rf", "xgb", "mlp"};
  if (name == "e2") return {"rf", "xgb", "mlp", "mnb", "lr"};
  fail(ErrorKind::kConfig, "unknown ensemble '" + std::string(name) + "'");
}

inline bool is_ensemble_kind(std::string_view kind) { return kind == "e1" || kind == "e2"; }

/// Unweighted mean of the members' probability rows.
inline Matrix ensemble_predict(std::span<const Classifier* const> members, const Matrix& X) {
  require(!members.empty(), ErrorKind::kParameter, "ensemble has no members");
  Matrix total = members.front()->predict_proba(X);
  for (std::size_t m = 1; m < members.size(); ++m) {
    require(members[m]->num_classes() == members.front()->num_classes(), ErrorKind::kShape,
            "ensemble members disagree on class count");
    total += members[m]->predict_proba(X);
  }
  return total / static_cast<double>(members.size());
}

/// Soft-voting ensemble that owns its members.
class Ensemble final : public Classifier {
 public:
  Ensemble(std::string name, std::vector<ClassifierPtr> members) : name_(std::move(name)), members_(std::move(members)) {
    require(members_.size() >= 2, ErrorKind::kParameter, "an ensemble needs at least two members");
    for (const auto& m : members_) {
      require(m->num_classes() == members_.front()->num_classes() &&
                  m->feature_dim() == members_.front()->feature_dim(),
              ErrorKind::kShape, "ensemble members must share classes and feature space");
    }
  }

  std::string kind() const override { return name_; }
  std::size_t num_classes() const override { return members_.front()->num_classes(); }
  std::size_t feature_dim() const override { return members_.front()->feature_dim(); }
  std::size_t size() const { return members_.size(); }
  const Classifier& member(std::size_t i) const { return *members_.at(i); }

  Matrix predict_proba(const Matrix& X) const override {
    check_input(X);
    std::vector<const Classifier*> ptrs;
    for (const auto& m : members_) ptrs.push_back(m.get());
    return ensemble_predict(ptrs, X);
  }

  Json parameters() const override {
    Json members = Json::array();
    for (const auto& m : members_) members.push_back(m->to_json());
    return {{"combination", "mean_probability"}, {"members", members}};
  }

 private:
  std::string name_;
  std::vector<ClassifierPtr> members_;
};

}  // namespace emoforge

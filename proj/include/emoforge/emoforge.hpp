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

#include "emoforge/audio_features.hpp"
#include "emoforge/common.hpp"
#include "emoforge/dataset.hpp"
#include "emoforge/ensemble.hpp"
#include "emoforge/featurizer.hpp"
#include "emoforge/hyperparameters.hpp"
#include "emoforge/importance.hpp"
#include "emoforge/lstm.hpp"
#include "emoforge/metrics.hpp"
#include "emoforge/model_io.hpp"
#include "emoforge/models/classifier.hpp"
#include "emoforge/models/decision_tree.hpp"
#include "emoforge/models/gradient_boosting.hpp"
#include "emoforge/models/linear_svm.hpp"
#include "emoforge/models/logistic_regression.hpp"
#include "emoforge/models/mlp.hpp"
#include "emoforge/models/naive_bayes.hpp"
#include "emoforge/models/random_forest.hpp"
#include "emoforge/pipeline.hpp"
#include "emoforge/synth.hpp"
#include "emoforge/text_features.hpp"
#include "emoforge/transforms.hpp"
#include "emoforge/wav.hpp"

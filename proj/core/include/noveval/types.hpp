// Copyright 2026 The noveval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace noveval {

// Class label. 0 is the "reported novel" pseudo-class and only ever appears
// as a prediction; ground truth labels are 1..K (known) and K+1..K+N (novel).
using LabelId = std::int32_t;
using InstanceId = std::int64_t;

inline constexpr LabelId kNovelPseudoLabel = 0;

struct Instance {
  InstanceId id = 0;
  std::vector<double> features;
  LabelId true_label = 1;
};

// The three stage datasets: initial training, detection evaluation and
// accommodation evaluation.
struct SplitBundle {
  std::vector<Instance> d_train;
  std::vector<Instance> eval_det;
  std::vector<Instance> eval_acc;
};

// True iff `label` lies outside the known range 1..k_known.
// Throws std::invalid_argument for label <= 0.
bool is_novel(LabelId label, int k_known);

// Checks every SplitBundle invariant: finite features of a common dimension,
// labels in range, unique ids, no novel labels in d_train and disjoint
// detection/accommodation sets. Throws InvariantError on the first failure.
void check_bundle(const SplitBundle& bundle, int k_known, int n_novel);

// Labels of `instances`, in order.
std::vector<LabelId> labels_of(std::span<const Instance> instances);

}  // namespace noveval

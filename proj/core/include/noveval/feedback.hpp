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

#include <map>
#include <span>
#include <vector>

#include "noveval/detection.hpp"
#include "noveval/types.hpp"

namespace noveval {

// Novel instances of the detection set that were correctly reported as
// novel, with their ground truth revealed.
struct FeedbackSet {
  int budget = 0;
  int k_known = 0;
  // Eval_Det instances (ids kept) in Eval_Det order; true_label is the
  // revealed novel label.
  std::vector<Instance> instances;
  std::map<LabelId, int> per_class_counts;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
};

// D^F = {(x, y) in eval_det : y > K and report assigns x to 0}.
// Throws InvariantError when the report's ids differ from eval_det's.
FeedbackSet build_feedback(std::span<const Instance> eval_det,
                           const DetectionReport& report, int k_known);

// Count per novel label K+1..K+N (zero for undetected classes).
std::vector<int> feedback_histogram(const FeedbackSet& fs, int n_novel);

}  // namespace noveval

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

#include "noveval/feedback.hpp"

#include <string>
#include <unordered_map>

#include "noveval/error.hpp"

namespace noveval {

FeedbackSet build_feedback(std::span<const Instance> eval_det,
                           const DetectionReport& report, int k_known) {
  if (report.instance_ids.size() != eval_det.size() ||
      report.assignment.size() != eval_det.size()) {
    throw InvariantError("report covers " + std::to_string(report.instance_ids.size()) +
                         " instances but eval_det has " +
                         std::to_string(eval_det.size()));
  }
  std::unordered_map<InstanceId, LabelId> assigned;
  assigned.reserve(report.instance_ids.size());
  for (std::size_t i = 0; i < report.instance_ids.size(); ++i) {
    if (!assigned.emplace(report.instance_ids[i], report.assignment[i]).second) {
      throw InvariantError("report lists id " +
                           std::to_string(report.instance_ids[i]) + " twice");
    }
  }

  FeedbackSet fs;
  fs.budget = report.budget;
  fs.k_known = k_known;
  for (const Instance& inst : eval_det) {
    const auto it = assigned.find(inst.id);
    if (it == assigned.end()) {
      throw InvariantError("report has no assignment for eval_det id " +
                           std::to_string(inst.id));
    }
    if (is_novel(inst.true_label, k_known) && it->second == kNovelPseudoLabel) {
      fs.instances.push_back(inst);
      ++fs.per_class_counts[inst.true_label];
    }
  }
  return fs;
}

std::vector<int> feedback_histogram(const FeedbackSet& fs, int n_novel) {
  std::vector<int> counts(static_cast<std::size_t>(n_novel), 0);
  for (const auto& [label, count] : fs.per_class_counts) {
    const int slot = label - fs.k_known - 1;
    if (slot >= 0 && slot < n_novel) counts[slot] = count;
  }
  return counts;
}

}  // namespace noveval

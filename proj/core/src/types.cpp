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

#include "noveval/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "noveval/error.hpp"

namespace noveval {

bool is_novel(LabelId label, int k_known) {
  if (label <= 0) {
    throw std::invalid_argument("ground-truth label must be >= 1, got " +
                                std::to_string(label));
  }
  return label > k_known;
}

namespace {

void check_split(std::span<const Instance> split, const char* name,
                 LabelId max_label, std::size_t dim,
                 std::unordered_set<InstanceId>& seen) {
  for (const Instance& inst : split) {
    const std::string where =
        std::string(name) + " instance " + std::to_string(inst.id);
    if (inst.true_label < 1 || inst.true_label > max_label) {
      throw InvariantError(where + ": label " +
                           std::to_string(inst.true_label) +
                           " outside 1.." + std::to_string(max_label));
    }
    if (inst.features.size() != dim) {
      throw InvariantError(where + ": feature dimension " +
                           std::to_string(inst.features.size()) +
                           " != " + std::to_string(dim));
    }
    for (double v : inst.features) {
      if (!std::isfinite(v)) throw InvariantError(where + ": non-finite feature");
    }
    if (!seen.insert(inst.id).second) {
      throw InvariantError(where + ": duplicate id across splits");
    }
  }
}

}  // namespace

void check_bundle(const SplitBundle& bundle, int k_known, int n_novel) {
  std::size_t dim = 0;
  if (!bundle.d_train.empty()) {
    dim = bundle.d_train.front().features.size();
  } else if (!bundle.eval_det.empty()) {
    dim = bundle.eval_det.front().features.size();
  } else if (!bundle.eval_acc.empty()) {
    dim = bundle.eval_acc.front().features.size();
  }
  std::unordered_set<InstanceId> seen;
  check_split(bundle.d_train, "d_train", k_known, dim, seen);
  check_split(bundle.eval_det, "eval_det", k_known + n_novel, dim, seen);
  check_split(bundle.eval_acc, "eval_acc", k_known + n_novel, dim, seen);
}

std::vector<LabelId> labels_of(std::span<const Instance> instances) {
  std::vector<LabelId> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances) out.push_back(inst.true_label);
  return out;
}

}  // namespace noveval

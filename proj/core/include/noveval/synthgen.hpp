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

#include "noveval/config.hpp"
#include "noveval/types.hpp"

namespace noveval {

// Gaussian-prototype benchmark: one prototype mean per class, drawn
// uniformly on the sphere of radius class_separation, with isotropic noise.
struct GeneratorSpec {
  int feature_dim = 16;
  double class_separation = 3.0;
  double within_class_stddev = 1.0;
  std::uint64_t seed = 1;

  static GeneratorSpec from_config(const ExperimentConfig& cfg);
};

// Deterministic synthetic split bundle. Instance ids are assigned
// sequentially (d_train, then eval_det, then eval_acc), class-major.
// With cfg.balanced == false only d_train becomes imbalanced: each known
// class draws its count uniformly from [ceil(train_per_known / 2),
// train_per_known].
// Throws ConfigError when cfg or spec is invalid.
SplitBundle generate(const ExperimentConfig& cfg, const GeneratorSpec& spec);

// Partitions externally supplied instances into the three stage splits with
// per-class quotas: known classes give train_per_known + det_per_class +
// acc_per_class instances, novel classes det_per_class + acc_per_class.
// Surplus instances are dropped. Throws InvariantError naming the class and
// its shortfall when a quota cannot be met.
SplitBundle shuffle_split(std::span<const Instance> instances,
                          const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace noveval

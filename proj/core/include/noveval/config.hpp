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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace noveval {

// Flat experiment configuration. Field names double as the keys of the
// key=value config file format.
struct ExperimentConfig {
  int k_known = 10;
  int n_novel = 10;
  int train_per_known = 50;
  int det_per_class = 20;
  int acc_per_class = 40;
  bool balanced = true;
  std::vector<int> budget_grid = {20, 40, 60, 80, 100, 120, 140, 160, 180, 200};
  std::uint64_t seed = 1;
  int feature_dim = 16;

  // Synthetic benchmark generator.
  double class_separation = 3.0;
  double within_class_stddev = 1.0;

  // Reference classifier.
  double learning_rate = 1.0;
  int epochs = 200;
  int batch_size = 32;
  double l2_penalty = 1e-2;

  // Mahalanobis scorer ridge factor.
  double ridge = 1e-6;

  // Desk-scale defaults (K=N=10, d=16).
  static ExperimentConfig desk_scale() { return {}; }
  // Full-size base setting: K=N=100, 500 train per known class, 100 per
  // class in detection and 500 per class in accommodation.
  static ExperimentConfig base_setting();

  int num_classes() const { return k_known + n_novel; }
  int eval_det_size() const { return num_classes() * det_per_class; }
  int eval_acc_size() const { return num_classes() * acc_per_class; }
};

struct ConfigViolation {
  std::string field;
  std::string reason;
};

// Every invariant violation of `cfg`; empty when valid. Never throws.
std::vector<ConfigViolation> validate_config(const ExperimentConfig& cfg);

// Parses the key=value format ('#' starts a comment, blank lines ignored).
// Keys missing from the text keep their desk-scale defaults. Throws
// ConfigError on unknown keys, duplicate keys or unparsable values; it does
// not run validate_config.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical key=value rendering; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace noveval

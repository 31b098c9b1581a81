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

#include "noveval/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "noveval/error.hpp"
#include "noveval/rng.hpp"

namespace noveval {

GeneratorSpec GeneratorSpec::from_config(const ExperimentConfig& cfg) {
  return GeneratorSpec{cfg.feature_dim, cfg.class_separation,
                       cfg.within_class_stddev, cfg.seed};
}

namespace {

// Stream tags for derive_seed.
enum : std::uint64_t {
  kPrototypeStream = 1,
  kTrainStream = 2,
  kDetStream = 3,
  kAccStream = 4,
  kImbalanceStream = 5,
  kShuffleStream = 6,
};

std::vector<std::vector<double>> draw_prototypes(int num_classes,
                                                 const GeneratorSpec& spec) {
  Rng rng(derive_seed(spec.seed, kPrototypeStream));
  std::vector<std::vector<double>> means(num_classes);
  for (auto& mean : means) {
    mean.resize(spec.feature_dim);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (double& v : mean) {
        v = rng.normal();
        norm2 += v * v;
      }
    } while (norm2 == 0.0);
    const double scale = spec.class_separation / std::sqrt(norm2);
    for (double& v : mean) v *= scale;
  }
  return means;
}

void emit_class(std::vector<Instance>& split, InstanceId& next_id, LabelId label,
                int count, const std::vector<double>& mean,
                const GeneratorSpec& spec, std::uint64_t stream) {
  Rng rng(derive_seed(spec.seed, stream, static_cast<std::uint64_t>(label)));
  for (int i = 0; i < count; ++i) {
    Instance inst;
    inst.id = next_id++;
    inst.true_label = label;
    inst.features.resize(mean.size());
    for (std::size_t j = 0; j < mean.size(); ++j) {
      inst.features[j] = mean[j] + spec.within_class_stddev * rng.normal();
    }
    split.push_back(std::move(inst));
  }
}

void check_inputs(const ExperimentConfig& cfg, const GeneratorSpec& spec) {
  const auto violations = validate_config(cfg);
  if (!violations.empty()) {
    throw ConfigError("invalid config: " + violations.front().field + " " +
                      violations.front().reason);
  }
  if (spec.feature_dim <= 0 || !(spec.class_separation >= 0.0) ||
      !(spec.within_class_stddev > 0.0) || !std::isfinite(spec.class_separation) ||
      !std::isfinite(spec.within_class_stddev)) {
    throw ConfigError("invalid generator spec");
  }
}

}  // namespace

SplitBundle generate(const ExperimentConfig& cfg, const GeneratorSpec& spec) {
  check_inputs(cfg, spec);
  const int num_classes = cfg.num_classes();
  const auto means = draw_prototypes(num_classes, spec);

  std::vector<int> train_counts(cfg.k_known, cfg.train_per_known);
  if (!cfg.balanced) {
    Rng rng(derive_seed(spec.seed, kImbalanceStream));
    const int low = (cfg.train_per_known + 1) / 2;
    for (int& c : train_counts) {
      c = low + static_cast<int>(rng.below(cfg.train_per_known - low + 1));
    }
  }

  SplitBundle bundle;
  InstanceId next_id = 1;
  bundle.d_train.reserve(std::accumulate(train_counts.begin(), train_counts.end(), 0));
  for (LabelId label = 1; label <= cfg.k_known; ++label) {
    emit_class(bundle.d_train, next_id, label, train_counts[label - 1],
               means[label - 1], spec, kTrainStream);
  }
  bundle.eval_det.reserve(cfg.eval_det_size());
  for (LabelId label = 1; label <= num_classes; ++label) {
    emit_class(bundle.eval_det, next_id, label, cfg.det_per_class,
               means[label - 1], spec, kDetStream);
  }
  bundle.eval_acc.reserve(cfg.eval_acc_size());
  for (LabelId label = 1; label <= num_classes; ++label) {
    emit_class(bundle.eval_acc, next_id, label, cfg.acc_per_class,
               means[label - 1], spec, kAccStream);
  }
  return bundle;
}

SplitBundle shuffle_split(std::span<const Instance> instances,
                          const ExperimentConfig& cfg, std::uint64_t seed) {
  const int num_classes = cfg.num_classes();
  std::map<LabelId, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const LabelId label = instances[i].true_label;
    if (label < 1 || label > num_classes) {
      throw InvariantError("instance " + std::to_string(instances[i].id) +
                           " has label " + std::to_string(label) +
                           " outside 1.." + std::to_string(num_classes));
    }
    by_class[label].push_back(i);
  }

  SplitBundle bundle;
  for (LabelId label = 1; label <= num_classes; ++label) {
    const bool known = label <= cfg.k_known;
    const int train_quota = known ? cfg.train_per_known : 0;
    const int need = train_quota + cfg.det_per_class + cfg.acc_per_class;
    auto& members = by_class[label];
    if (static_cast<int>(members.size()) < need) {
      throw InvariantError("class " + std::to_string(label) + " has " +
                           std::to_string(members.size()) + " instances but needs " +
                           std::to_string(need) + " (shortfall " +
                           std::to_string(need - static_cast<int>(members.size())) +
                           ")");
    }
    // Sort by id first so the result does not depend on input order.
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return instances[a].id < instances[b].id;
    });
    Rng rng(derive_seed(seed, kShuffleStream, static_cast<std::uint64_t>(label)));
    rng.shuffle(std::span<std::size_t>(members));
    auto take = [&](std::vector<Instance>& split, int begin, int count) {
      for (int i = begin; i < begin + count; ++i) split.push_back(instances[members[i]]);
    };
    take(bundle.d_train, 0, train_quota);
    take(bundle.eval_det, train_quota, cfg.det_per_class);
    take(bundle.eval_acc, train_quota + cfg.det_per_class, cfg.acc_per_class);
  }
  return bundle;
}

}  // namespace noveval

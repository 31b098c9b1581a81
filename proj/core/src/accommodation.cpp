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

#include "noveval/accommodation.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "noveval/rng.hpp"

namespace noveval {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kRetrain: return "retrain";
    case Strategy::kFinetuneDf: return "finetune_df";
    case Strategy::kFinetuneSampled: return "finetune_sampled";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (auto s : {Strategy::kRetrain, Strategy::kFinetuneDf, Strategy::kFinetuneSampled}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

namespace {

constexpr std::uint64_t kSampleStream = 0x73616d706c65ULL;

// Up to `threshold` instances per known class, uniformly without
// replacement. A fixed per-class permutation makes smaller thresholds take a
// prefix of larger ones.
std::vector<Instance> sample_known(std::span<const Instance> d_train, int threshold,
                                   std::uint64_t seed) {
  std::map<LabelId, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < d_train.size(); ++i) {
    by_class[d_train[i].true_label].push_back(i);
  }
  std::vector<Instance> out;
  for (auto& [label, members] : by_class) {
    Rng rng(derive_seed(seed, kSampleStream, static_cast<std::uint64_t>(label)));
    rng.shuffle(std::span<std::size_t>(members));
    const std::size_t take =
        std::min(members.size(), static_cast<std::size_t>(std::max(threshold, 0)));
    for (std::size_t i = 0; i < take; ++i) out.push_back(d_train[members[i]]);
  }
  return out;
}

}  // namespace

std::vector<Instance> build_training_set(Strategy strategy,
                                         std::span<const Instance> d_train,
                                         const FeedbackSet& fs,
                                         const ExperimentConfig& cfg) {
  std::vector<Instance> out;
  switch (strategy) {
    case Strategy::kRetrain:
      out.assign(d_train.begin(), d_train.end());
      break;
    case Strategy::kFinetuneDf:
      if (fs.empty()) {
        throw std::invalid_argument("finetune_df needs a non-empty feedback set");
      }
      break;
    case Strategy::kFinetuneSampled: {
      int threshold = 0;
      for (const auto& [label, count] : fs.per_class_counts) {
        threshold = std::max(threshold, count);
      }
      out = sample_known(d_train, threshold, cfg.seed);
      break;
    }
  }
  out.insert(out.end(), fs.instances.begin(), fs.instances.end());
  return out;
}

SoftmaxModel train_base_model(std::span<const Instance> d_train,
                              const ExperimentConfig& cfg, const TrainSpec& spec) {
  return train(d_train, cfg.num_classes(), spec);
}

namespace {

AccommodationRun evaluate_model(Strategy strategy, int budget, SoftmaxModel model,
                                std::span<const Instance> eval_acc) {
  AccommodationRun run;
  run.strategy = strategy;
  run.budget = budget;
  run.eval_predictions = predict_labels(model, eval_acc);
  run.model = std::move(model);
  run.eval_ids.reserve(eval_acc.size());
  for (const Instance& inst : eval_acc) run.eval_ids.push_back(inst.id);
  return run;
}

const SoftmaxModel& require_base(const SoftmaxModel* base, const ExperimentConfig& cfg) {
  if (base == nullptr) {
    throw std::invalid_argument("fine-tune strategies need a base model");
  }
  if (base->num_logits() != cfg.num_classes()) {
    throw std::invalid_argument("base model has " + std::to_string(base->num_logits()) +
                                " logits, expected K + N = " +
                                std::to_string(cfg.num_classes()));
  }
  return *base;
}

}  // namespace

AccommodationRun run_accommodation(Strategy strategy, const SplitBundle& bundle,
                                   const FeedbackSet& fs,
                                   const SoftmaxModel* base_model,
                                   const TrainSpec& spec,
                                   const ExperimentConfig& cfg) {
  const std::vector<Instance> data =
      build_training_set(strategy, bundle.d_train, fs, cfg);
  if (strategy == Strategy::kRetrain) {
    return evaluate_model(strategy, fs.budget, train(data, cfg.num_classes(), spec),
                          bundle.eval_acc);
  }
  const SoftmaxModel& base = require_base(base_model, cfg);
  if (data.empty()) return evaluate_model(strategy, fs.budget, base, bundle.eval_acc);
  return evaluate_model(strategy, fs.budget,
                        fine_tune(base, data, fine_tune_spec(spec)), bundle.eval_acc);
}

AccommodationRun accommodate_or_keep(Strategy strategy, const SplitBundle& bundle,
                                     const FeedbackSet& fs,
                                     const SoftmaxModel* base_model,
                                     const TrainSpec& spec,
                                     const ExperimentConfig& cfg) {
  if (strategy != Strategy::kRetrain && fs.empty()) {
    return evaluate_model(strategy, fs.budget, require_base(base_model, cfg),
                          bundle.eval_acc);
  }
  return run_accommodation(strategy, bundle, fs, base_model, spec, cfg);
}

}  // namespace noveval

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

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "noveval/classifier.hpp"
#include "noveval/config.hpp"
#include "noveval/feedback.hpp"
#include "noveval/types.hpp"

namespace noveval {

enum class Strategy { kRetrain, kFinetuneDf, kFinetuneSampled };

std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);

// Training rows for a strategy:
//   retrain          -> D^T + D^F
//   finetune_df      -> D^F
//   finetune_sampled -> D^F + t rows per known class sampled from D^T,
//                       t = max per-class count in D^F, capped per class.
// Sampling is uniform without replacement, seeded from cfg.seed, and nested
// across thresholds. Throws std::invalid_argument for finetune_df with an
// empty D^F.
std::vector<Instance> build_training_set(Strategy strategy,
                                         std::span<const Instance> d_train,
                                         const FeedbackSet& fs,
                                         const ExperimentConfig& cfg);

struct AccommodationRun {
  Strategy strategy = Strategy::kRetrain;
  int budget = 0;
  SoftmaxModel model;  // K + N logits
  std::vector<InstanceId> eval_ids;
  std::vector<LabelId> eval_predictions;  // 1..K+N
};

// Base model for the fine-tune strategies: K + N logits trained on D^T, so
// the N novel logits remain dummies.
SoftmaxModel train_base_model(std::span<const Instance> d_train,
                              const ExperimentConfig& cfg,
                              const TrainSpec& spec);

// Incorporates the feedback and predicts Eval_Acc with an argmax over all
// K + N logits. retrain ignores `base_model` and trains from scratch with
// `spec`; fine-tune strategies continue from `base_model` with
// fine_tune_spec(spec). finetune_sampled with an empty D^F leaves the base
// model unchanged. Throws std::invalid_argument when a fine-tune strategy
// gets no base model or one with the wrong logit count.
AccommodationRun run_accommodation(Strategy strategy, const SplitBundle& bundle,
                                   const FeedbackSet& fs,
                                   const SoftmaxModel* base_model,
                                   const TrainSpec& spec,
                                   const ExperimentConfig& cfg);

// run_accommodation for budget sweeps: a fine-tune strategy with an empty
// D^F has nothing to incorporate and keeps the base model as is.
AccommodationRun accommodate_or_keep(Strategy strategy,
                                     const SplitBundle& bundle,
                                     const FeedbackSet& fs,
                                     const SoftmaxModel* base_model,
                                     const TrainSpec& spec,
                                     const ExperimentConfig& cfg);

}  // namespace noveval

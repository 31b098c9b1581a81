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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "noveval/config.hpp"
#include "noveval/types.hpp"

namespace noveval {

struct ScoreMatrix;

struct TrainSpec {
  double learning_rate = 1.0;
  int epochs = 200;
  int batch_size = 32;
  double l2_penalty = 1e-2;
  std::uint64_t seed = 1;

  static TrainSpec from_config(const ExperimentConfig& cfg);
};

// Schedule used for warm-start fine-tuning: same rate, a fifth of the
// epochs (at least one).
TrainSpec fine_tune_spec(const TrainSpec& spec);

// Linear softmax classifier. Logit j scores label j + 1.
//
// A logit takes part in the training softmax only once it is "active": its
// label has appeared in some training batch of this model's history
// (trained_on[j] > 0) or appears in the data currently being fitted. Logits
// of labels never seen stay at their zero initialization; these are the
// dummy logits that later fine-tuning can claim for novel classes.
struct SoftmaxModel {
  Eigen::MatrixXd weights;  // num_logits x feature_dim
  Eigen::VectorXd bias;     // num_logits
  // Training rows per logit, summed over every fit in this model's history.
  std::vector<std::int64_t> trained_on;

  SoftmaxModel() = default;
  SoftmaxModel(int num_logits, int feature_dim);

  int num_logits() const { return static_cast<int>(bias.size()); }
  int feature_dim() const { return static_cast<int>(weights.cols()); }
  bool is_active(int logit) const { return trained_on[logit] > 0; }

  friend bool operator==(const SoftmaxModel& a, const SoftmaxModel& b);
};

// Fits a fresh zero-initialized model by mini-batch gradient descent on
// mean cross-entropy plus (l2_penalty / 2) * ||W||^2. Batch order is
// reshuffled every epoch from spec.seed.
// Throws std::invalid_argument for empty data, labels outside
// 1..num_logits, mismatched feature dimensions, or epochs < 1.
SoftmaxModel train(std::span<const Instance> data, int num_logits,
                   const TrainSpec& spec);

// Continues gradient descent from `model`'s parameters. train() is exactly
// fine_tune() applied to a zero model. A learning rate of 0 leaves the
// parameters unchanged.
SoftmaxModel fine_tune(SoftmaxModel model, std::span<const Instance> data,
                       const TrainSpec& spec);

// Softmax over all logits, or over the first `restrict_to` logits when set
// (the K-class view used by the detection stage).
ScoreMatrix predict_scores(const SoftmaxModel& model,
                           std::span<const Instance> instances,
                           std::optional<int> restrict_to = std::nullopt);

// Argmax over all logits, first index on ties, mapped to labels 1..L.
std::vector<LabelId> predict_labels(const SoftmaxModel& model,
                                    std::span<const Instance> instances);

struct LossGradient {
  double loss = 0.0;
  Eigen::MatrixXd grad_weights;
  Eigen::VectorXd grad_bias;
};

// Mean training objective over `batch` and its analytic gradient, using the
// active-logit softmax described on SoftmaxModel.
LossGradient loss_and_gradient(const SoftmaxModel& model,
                               std::span<const Instance> batch,
                               double l2_penalty);

// Max over all parameters of |analytic - fd| / (|fd| + 1e-8), where fd is
// the central difference with step 1e-5.
double gradient_check(const SoftmaxModel& model,
                      std::span<const Instance> batch,
                      double l2_penalty = 0.0);

}  // namespace noveval

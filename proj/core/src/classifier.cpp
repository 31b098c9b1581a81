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

#include "noveval/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "noveval/detection.hpp"
#include "noveval/rng.hpp"

namespace noveval {

TrainSpec TrainSpec::from_config(const ExperimentConfig& cfg) {
  return TrainSpec{cfg.learning_rate, cfg.epochs, cfg.batch_size,
                   cfg.l2_penalty, cfg.seed};
}

TrainSpec fine_tune_spec(const TrainSpec& spec) {
  TrainSpec out = spec;
  out.epochs = std::max(1, spec.epochs / 5);
  return out;
}

SoftmaxModel::SoftmaxModel(int num_logits, int feature_dim)
    : weights(Eigen::MatrixXd::Zero(num_logits, feature_dim)),
      bias(Eigen::VectorXd::Zero(num_logits)),
      trained_on(static_cast<std::size_t>(num_logits), 0) {}

bool operator==(const SoftmaxModel& a, const SoftmaxModel& b) {
  return a.weights.rows() == b.weights.rows() &&
         a.weights.cols() == b.weights.cols() && a.weights == b.weights &&
         a.bias == b.bias && a.trained_on == b.trained_on;
}

namespace {

// Feature rows and logit indices of a training set.
struct Design {
  Eigen::MatrixXd x;
  std::vector<int> logit;
};

Design make_design(const SoftmaxModel& model, std::span<const Instance> data) {
  Design d;
  d.x.resize(static_cast<Eigen::Index>(data.size()), model.feature_dim());
  d.logit.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Instance& inst = data[i];
    if (static_cast<int>(inst.features.size()) != model.feature_dim()) {
      throw std::invalid_argument("instance " + std::to_string(inst.id) +
                                  " has feature dimension " +
                                  std::to_string(inst.features.size()) +
                                  ", model expects " +
                                  std::to_string(model.feature_dim()));
    }
    if (inst.true_label < 1 || inst.true_label > model.num_logits()) {
      throw std::invalid_argument("instance " + std::to_string(inst.id) +
                                  " has label " + std::to_string(inst.true_label) +
                                  " outside 1.." +
                                  std::to_string(model.num_logits()));
    }
    for (int k = 0; k < model.feature_dim(); ++k) {
      d.x(static_cast<Eigen::Index>(i), k) = inst.features[k];
    }
    d.logit.push_back(inst.true_label - 1);
  }
  return d;
}

std::vector<int> active_logits(const SoftmaxModel& model, const Design& d) {
  std::vector<char> mask(model.num_logits(), 0);
  for (int j = 0; j < model.num_logits(); ++j) mask[j] = model.is_active(j);
  for (int y : d.logit) mask[y] = 1;
  std::vector<int> active;
  for (int j = 0; j < model.num_logits(); ++j) {
    if (mask[j]) active.push_back(j);
  }
  return active;
}

// Loss (and optionally gradient) over rows `rows` of the design, restricted
// to the `active` logits. Mean over rows plus the l2 term on active rows.
double evaluate(const SoftmaxModel& model, const Design& d,
                std::span<const std::size_t> rows, std::span<const int> active,
                double l2, Eigen::MatrixXd* grad_w, Eigen::VectorXd* grad_b) {
  const auto n_active = static_cast<Eigen::Index>(active.size());
  Eigen::VectorXd z(n_active);
  Eigen::VectorXd p(n_active);
  double loss = 0.0;
  if (grad_w != nullptr) {
    grad_w->setZero(model.num_logits(), model.feature_dim());
    grad_b->setZero(model.num_logits());
  }
  for (std::size_t row : rows) {
    const auto x = d.x.row(static_cast<Eigen::Index>(row));
    Eigen::Index best = 0;
    Eigen::Index target = -1;
    for (Eigen::Index a = 0; a < n_active; ++a) {
      const int j = active[a];
      z(a) = model.weights.row(j).dot(x) + model.bias(j);
      if (z(a) > z(best)) best = a;
      if (j == d.logit[row]) target = a;
    }
    // log-sum-exp as max + log1p(rest) keeps near-zero losses accurate.
    double rest = 0.0;
    for (Eigen::Index a = 0; a < n_active; ++a) {
      p(a) = std::exp(z(a) - z(best));
      if (a != best) rest += p(a);
    }
    loss += std::log1p(rest) + (z(best) - z(target));
    if (grad_w != nullptr) {
      p /= 1.0 + rest;
      p(target) -= 1.0;
      for (Eigen::Index a = 0; a < n_active; ++a) {
        grad_w->row(active[a]).noalias() += p(a) * x;
        (*grad_b)(active[a]) += p(a);
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  loss *= inv_n;
  double penalty = 0.0;
  for (int j : active) penalty += model.weights.row(j).squaredNorm();
  loss += 0.5 * l2 * penalty;
  if (grad_w != nullptr) {
    *grad_w *= inv_n;
    *grad_b *= inv_n;
    if (l2 != 0.0) {
      for (int j : active) grad_w->row(j) += l2 * model.weights.row(j);
    }
  }
  return loss;
}

void check_spec(const TrainSpec& spec) {
  if (spec.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (spec.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(spec.learning_rate >= 0.0) || !std::isfinite(spec.learning_rate)) {
    throw std::invalid_argument("learning_rate must be finite and >= 0");
  }
  if (!(spec.l2_penalty >= 0.0) || !std::isfinite(spec.l2_penalty)) {
    throw std::invalid_argument("l2_penalty must be finite and >= 0");
  }
}

}  // namespace

SoftmaxModel train(std::span<const Instance> data, int num_logits,
                   const TrainSpec& spec) {
  if (num_logits < 1) throw std::invalid_argument("num_logits must be >= 1");
  if (data.empty()) throw std::invalid_argument("training data is empty");
  return fine_tune(SoftmaxModel(num_logits,
                                static_cast<int>(data.front().features.size())),
                   data, spec);
}

SoftmaxModel fine_tune(SoftmaxModel model, std::span<const Instance> data,
                       const TrainSpec& spec) {
  check_spec(spec);
  if (data.empty()) throw std::invalid_argument("training data is empty");
  const Design d = make_design(model, data);
  const std::vector<int> active = active_logits(model, d);

  std::vector<std::size_t> order(data.size());
  Eigen::MatrixXd grad_w;
  Eigen::VectorXd grad_b;
  const auto batch = static_cast<std::size_t>(spec.batch_size);
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      evaluate(model, d, rows, active, spec.l2_penalty, &grad_w, &grad_b);
      for (int j : active) {
        model.weights.row(j) -= spec.learning_rate * grad_w.row(j);
        model.bias(j) -= spec.learning_rate * grad_b(j);
      }
    }
  }
  for (int y : d.logit) ++model.trained_on[y];
  return model;
}

ScoreMatrix predict_scores(const SoftmaxModel& model,
                           std::span<const Instance> instances,
                           std::optional<int> restrict_to) {
  const int width = restrict_to.value_or(model.num_logits());
  if (width < 1 || width > model.num_logits()) {
    throw std::invalid_argument("restrict_to must be in 1.." +
                                std::to_string(model.num_logits()));
  }
  ScoreMatrix out;
  out.k_known = width;
  out.rows.resize(static_cast<Eigen::Index>(instances.size()), width);
  out.instance_ids.reserve(instances.size());
  Eigen::VectorXd x(model.feature_dim());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    if (static_cast<int>(inst.features.size()) != model.feature_dim()) {
      throw std::invalid_argument("instance " + std::to_string(inst.id) +
                                  " has feature dimension " +
                                  std::to_string(inst.features.size()) +
                                  ", model expects " +
                                  std::to_string(model.feature_dim()));
    }
    x = Eigen::Map<const Eigen::VectorXd>(inst.features.data(), model.feature_dim());
    Eigen::VectorXd z = model.weights.topRows(width) * x + model.bias.head(width);
    z = (z.array() - z.maxCoeff()).exp();
    out.rows.row(static_cast<Eigen::Index>(i)) = z / z.sum();
    out.instance_ids.push_back(inst.id);
  }
  return out;
}

std::vector<LabelId> predict_labels(const SoftmaxModel& model,
                                    std::span<const Instance> instances) {
  std::vector<LabelId> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances) {
    if (static_cast<int>(inst.features.size()) != model.feature_dim()) {
      throw std::invalid_argument("instance " + std::to_string(inst.id) +
                                  " has the wrong feature dimension");
    }
    const Eigen::Map<const Eigen::VectorXd> x(inst.features.data(),
                                              model.feature_dim());
    const Eigen::VectorXd z = model.weights * x + model.bias;
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < z.size(); ++j) {
      if (z(j) > z(best)) best = j;
    }
    out.push_back(static_cast<LabelId>(best + 1));
  }
  return out;
}

LossGradient loss_and_gradient(const SoftmaxModel& model,
                               std::span<const Instance> batch,
                               double l2_penalty) {
  if (batch.empty()) throw std::invalid_argument("batch is empty");
  const Design d = make_design(model, batch);
  const std::vector<int> active = active_logits(model, d);
  std::vector<std::size_t> rows(batch.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  LossGradient out;
  out.loss = evaluate(model, d, rows, active, l2_penalty, &out.grad_weights,
                      &out.grad_bias);
  return out;
}

double gradient_check(const SoftmaxModel& model, std::span<const Instance> batch,
                      double l2_penalty) {
  constexpr double kStep = 1e-5;
  const LossGradient analytic = loss_and_gradient(model, batch, l2_penalty);
  const Design d = make_design(model, batch);
  const std::vector<int> active = active_logits(model, d);
  std::vector<std::size_t> rows(batch.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});

  SoftmaxModel probe = model;
  auto loss_at = [&] {
    return evaluate(probe, d, rows, active, l2_penalty, nullptr, nullptr);
  };
  auto rel_error = [](double a, double fd) {
    return std::abs(a - fd) / (std::abs(fd) + 1e-8);
  };
  double worst = 0.0;
  for (int j = 0; j < model.num_logits(); ++j) {
    for (int k = 0; k < model.feature_dim(); ++k) {
      const double saved = probe.weights(j, k);
      probe.weights(j, k) = saved + kStep;
      const double up = loss_at();
      probe.weights(j, k) = saved - kStep;
      const double down = loss_at();
      probe.weights(j, k) = saved;
      worst = std::max(worst, rel_error(analytic.grad_weights(j, k),
                                        (up - down) / (2 * kStep)));
    }
    const double saved = probe.bias(j);
    probe.bias(j) = saved + kStep;
    const double up = loss_at();
    probe.bias(j) = saved - kStep;
    const double down = loss_at();
    probe.bias(j) = saved;
    worst = std::max(worst, rel_error(analytic.grad_bias(j), (up - down) / (2 * kStep)));
  }
  return worst;
}

}  // namespace noveval

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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "noveval/types.hpp"

namespace noveval {

// Per-instance probability vectors over the K known classes.
struct ScoreMatrix {
  std::vector<InstanceId> instance_ids;
  int k_known = 0;
  Eigen::MatrixXd rows;  // num_instances x k_known

  std::size_t size() const { return instance_ids.size(); }

  // Row sums within `tolerance` of 1, entries in [0, 1], unique ids.
  // Throws InvariantError.
  void validate(double tolerance = 1e-6) const;
};

enum class ScorerMethod { kMaxProb, kCompMean, kEuclid, kMahalanobis, kExternal };

std::string_view to_string(ScorerMethod method);
std::optional<ScorerMethod> parse_scorer(std::string_view name);

// Confidence per instance (higher = more confidently known) and the order
// in which instances get flagged: ascending confidence, ties by ascending id.
struct ConfidenceRanking {
  ScorerMethod method = ScorerMethod::kMaxProb;
  std::vector<InstanceId> instance_ids;
  std::vector<double> confidence;
  std::vector<std::size_t> order;
};

ConfidenceRanking make_ranking(ScorerMethod method,
                               std::vector<InstanceId> instance_ids,
                               std::vector<double> confidence);

ConfidenceRanking score_maxprob(const ScoreMatrix& scores);
// 1 - mean of the row without its maximum entry. Needs k_known >= 2.
ConfidenceRanking score_compmean(const ScoreMatrix& scores);
// Negated distance to the column mean of all rows. Needs >= 2 rows.
ConfidenceRanking score_euclid(const ScoreMatrix& scores);
// Negated Mahalanobis distance to the column mean under the sample
// covariance regularized by ridge * (trace / d) * I.
ConfidenceRanking score_mahalanobis(const ScoreMatrix& scores, double ridge);

ConfidenceRanking score(ScorerMethod method, const ScoreMatrix& scores,
                        double ridge);

// Euclidean distance of each row of `points` to the column mean.
Eigen::VectorXd euclid_distances(const Eigen::MatrixXd& points);

// Squared Mahalanobis distance of each row of `points` to the column mean.
// Uses a Cholesky solve; throws InvariantError when the regularized
// covariance is not positive definite.
Eigen::VectorXd mahalanobis_sq_distances(const Eigen::MatrixXd& points,
                                         double ridge);

// Per-budget assignment: flagged instances get label 0, the rest the argmax
// known class (first index on ties).
struct DetectionReport {
  int budget = 0;
  std::vector<InstanceId> instance_ids;
  std::vector<LabelId> assignment;
};

// Flags the `budget` least confident instances. `ranking` and `scores` must
// list the same ids in the same order. Throws std::invalid_argument when
// budget is outside [0, num_instances] or the two disagree.
DetectionReport report_novelties(const ConfidenceRanking& ranking,
                                 const ScoreMatrix& scores, int budget);

// Contents of an external score file. The ranking is present only when the
// file carries a confidence column.
struct ExternalScores {
  ScoreMatrix scores;
  std::vector<LabelId> true_labels;
  std::optional<ConfidenceRanking> ranking;
};

// Reads `id,true_label,p_1,...,p_K[,confidence]`. Rows must sum to 1 within
// 1e-4 and are then renormalized. Throws FormatError with the line number.
ExternalScores parse_external_scores(std::istream& in, std::string_view name);
ExternalScores load_external_scores(const std::filesystem::path& path);

// Writes the same format; the confidence column is added when `ranking` is
// given.
void write_score_matrix(std::ostream& out, const ScoreMatrix& scores,
                        std::span<const LabelId> true_labels,
                        const ConfidenceRanking* ranking = nullptr);

}  // namespace noveval

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

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "noveval/accommodation.hpp"
#include "noveval/detection.hpp"
#include "noveval/feedback.hpp"
#include "noveval/types.hpp"

namespace noveval {

enum class Segment { kKnown = 0, kNovel = 1, kOverall = 2 };
enum class Averaging { kMicro, kMacro };

inline constexpr std::array<Segment, 3> kAllSegments = {
    Segment::kKnown, Segment::kNovel, Segment::kOverall};

std::string_view to_string(Segment segment);
std::string_view to_string(Averaging averaging);
std::optional<Segment> parse_segment(std::string_view name);
std::optional<Averaging> parse_averaging(std::string_view name);

struct SegmentScores {
  Segment segment = Segment::kOverall;
  Averaging averaging = Averaging::kMicro;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Known, novel and overall scores of one stage at one averaging.
struct StageScores {
  std::array<SegmentScores, 3> segments;

  const SegmentScores& operator[](Segment s) const {
    return segments[static_cast<std::size_t>(s)];
  }
};

// 2PR / (P + R), or 0 when P + R == 0.
double f1_score(double precision, double recall);

// Square confusion matrix over classes 0..num_classes-1 (rows = truth).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);

  void add(int truth, int predicted);

  int num_classes() const { return num_classes_; }
  long count(int truth, int predicted) const;
  long true_positives(int c) const { return count(c, c); }
  long support(int c) const { return row_totals_[c]; }
  long predicted(int c) const { return col_totals_[c]; }

 private:
  int num_classes_;
  std::vector<long> cells_;
  std::vector<long> row_totals_;
  std::vector<long> col_totals_;
};

// Aggregates the classes in `classes`.
//   micro: P = sum TP / sum predicted, R = sum TP / sum support (0 / 0 -> 0).
//   macro: P = mean per-class precision over all listed classes, 0 for a
//          class with no predictions; R = mean per-class recall over the
//          listed classes with nonzero support (0 if there are none).
SegmentScores aggregate(const ConfusionMatrix& cm, std::span<const int> classes,
                        Segment segment, Averaging averaging);

// (K+1)-class detection scores. Truth is the label for known instances and
// 0 for novel ones. Known = classes 1..K, novel = class 0, overall = 0..K.
StageScores detection_metrics(std::span<const Instance> eval_det,
                              const DetectionReport& report, int k_known,
                              Averaging averaging);

// (K+N)-class accommodation scores. Known = 1..K, novel = K+1..K+N.
// Throws std::invalid_argument for a prediction outside 1..K+N.
StageScores accommodation_metrics(std::span<const Instance> eval_acc,
                                  std::span<const LabelId> predictions,
                                  int k_known, int n_novel,
                                  Averaging averaging);

// Trapezoidal area with x rescaled to [0, 1]. Needs >= 2 points and
// strictly ascending x; throws std::invalid_argument otherwise.
double auc(std::span<const double> x, std::span<const double> y);

struct CurvePoint {
  int budget = 0;
  StageScores scores;
};

struct MetricCurve {
  Averaging averaging = Averaging::kMicro;
  std::vector<CurvePoint> points;
  // Per segment; nullopt when the curve has fewer than two points.
  std::array<std::optional<double>, 3> auc_precision;
  std::array<std::optional<double>, 3> auc_recall;
  std::array<std::optional<double>, 3> auc_f1;
};

// Fills in the AUCs for `points` (budgets must be strictly ascending).
MetricCurve make_curve(Averaging averaging, std::vector<CurvePoint> points);

// Detection sweep: one ranking, one report per budget.
MetricCurve detection_sweep(std::span<const Instance> eval_det,
                            const ConfidenceRanking& ranking,
                            const ScoreMatrix& scores,
                            std::span<const int> budget_grid, int k_known,
                            Averaging averaging);

// Accommodation sweep: rebuilds D^F and reruns `strategy` per budget.
MetricCurve accommodation_sweep(Strategy strategy, const SplitBundle& bundle,
                                const ConfidenceRanking& ranking,
                                const ScoreMatrix& scores,
                                const SoftmaxModel* base_model,
                                const TrainSpec& spec,
                                const ExperimentConfig& cfg,
                                Averaging averaging);

struct PerClassPoint {
  LabelId label = 0;
  int feedback_count = 0;
  double f1 = 0.0;
};

// One row per novel class: its D^F count and its accommodation-stage F1.
std::vector<PerClassPoint> per_class_scatter(const AccommodationRun& run,
                                             const FeedbackSet& fs,
                                             std::span<const Instance> eval_acc,
                                             int k_known, int n_novel);

}  // namespace noveval

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

#include "noveval/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "noveval/error.hpp"

namespace noveval {

std::string_view to_string(Segment segment) {
  switch (segment) {
    case Segment::kKnown: return "known";
    case Segment::kNovel: return "novel";
    case Segment::kOverall: return "overall";
  }
  return "unknown";
}

std::string_view to_string(Averaging averaging) {
  return averaging == Averaging::kMicro ? "micro" : "macro";
}

std::optional<Segment> parse_segment(std::string_view name) {
  for (Segment s : kAllSegments) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

std::optional<Averaging> parse_averaging(std::string_view name) {
  if (name == "micro") return Averaging::kMicro;
  if (name == "macro") return Averaging::kMacro;
  return std::nullopt;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : num_classes_(num_classes),
      cells_(static_cast<std::size_t>(num_classes) * num_classes, 0),
      row_totals_(num_classes, 0),
      col_totals_(num_classes, 0) {
  if (num_classes < 1) throw std::invalid_argument("confusion matrix needs >= 1 class");
}

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth < 0 || truth >= num_classes_ || predicted < 0 || predicted >= num_classes_) {
    throw std::invalid_argument("confusion entry (" + std::to_string(truth) + ", " +
                                std::to_string(predicted) + ") out of range");
  }
  ++cells_[static_cast<std::size_t>(truth) * num_classes_ + predicted];
  ++row_totals_[truth];
  ++col_totals_[predicted];
}

long ConfusionMatrix::count(int truth, int predicted) const {
  return cells_[static_cast<std::size_t>(truth) * num_classes_ + predicted];
}

namespace {
double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }
}  // namespace

SegmentScores aggregate(const ConfusionMatrix& cm, std::span<const int> classes,
                        Segment segment, Averaging averaging) {
  SegmentScores out;
  out.segment = segment;
  out.averaging = averaging;
  if (averaging == Averaging::kMicro) {
    double tp = 0, predicted = 0, support = 0;
    for (int c : classes) {
      tp += static_cast<double>(cm.true_positives(c));
      predicted += static_cast<double>(cm.predicted(c));
      support += static_cast<double>(cm.support(c));
    }
    out.precision = ratio(tp, predicted);
    out.recall = ratio(tp, support);
  } else {
    double precision_sum = 0.0, recall_sum = 0.0;
    int recall_classes = 0;
    for (int c : classes) {
      const auto tp = static_cast<double>(cm.true_positives(c));
      precision_sum += ratio(tp, static_cast<double>(cm.predicted(c)));
      if (cm.support(c) > 0) {
        recall_sum += tp / static_cast<double>(cm.support(c));
        ++recall_classes;
      }
    }
    out.precision = classes.empty() ? 0.0 : precision_sum / static_cast<double>(classes.size());
    out.recall = recall_classes ? recall_sum / recall_classes : 0.0;
  }
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

namespace {

std::vector<int> range_of(int first, int last) {
  std::vector<int> out(static_cast<std::size_t>(std::max(0, last - first + 1)));
  std::iota(out.begin(), out.end(), first);
  return out;
}

StageScores score_stage(const ConfusionMatrix& cm, const std::vector<int>& known,
                        const std::vector<int>& novel, Averaging averaging) {
  std::vector<int> all = known;
  all.insert(all.end(), novel.begin(), novel.end());
  StageScores out;
  out.segments[0] = aggregate(cm, known, Segment::kKnown, averaging);
  out.segments[1] = aggregate(cm, novel, Segment::kNovel, averaging);
  out.segments[2] = aggregate(cm, all, Segment::kOverall, averaging);
  return out;
}

}  // namespace

StageScores detection_metrics(std::span<const Instance> eval_det,
                              const DetectionReport& report, int k_known,
                              Averaging averaging) {
  if (report.instance_ids.size() != eval_det.size()) {
    throw InvariantError("report does not cover the detection set");
  }
  std::unordered_map<InstanceId, LabelId> assigned;
  assigned.reserve(eval_det.size());
  for (std::size_t i = 0; i < report.instance_ids.size(); ++i) {
    assigned.emplace(report.instance_ids[i], report.assignment[i]);
  }
  ConfusionMatrix cm(k_known + 1);
  for (const Instance& inst : eval_det) {
    const auto it = assigned.find(inst.id);
    if (it == assigned.end()) {
      throw InvariantError("report has no assignment for id " + std::to_string(inst.id));
    }
    const int truth = is_novel(inst.true_label, k_known) ? 0 : inst.true_label;
    cm.add(truth, it->second);
  }
  return score_stage(cm, range_of(1, k_known), {0}, averaging);
}

StageScores accommodation_metrics(std::span<const Instance> eval_acc,
                                  std::span<const LabelId> predictions,
                                  int k_known, int n_novel, Averaging averaging) {
  if (predictions.size() != eval_acc.size()) {
    throw std::invalid_argument("one prediction per accommodation instance is required");
  }
  const int total = k_known + n_novel;
  ConfusionMatrix cm(total + 1);
  for (std::size_t i = 0; i < eval_acc.size(); ++i) {
    if (predictions[i] < 1 || predictions[i] > total) {
      throw std::invalid_argument("accommodation prediction " +
                                  std::to_string(predictions[i]) + " outside 1.." +
                                  std::to_string(total));
    }
    cm.add(eval_acc[i].true_label, predictions[i]);
  }
  return score_stage(cm, range_of(1, k_known), range_of(k_known + 1, total), averaging);
}

double auc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("auc: x and y differ in length");
  if (x.size() < 2) throw std::invalid_argument("auc needs at least 2 points");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw std::invalid_argument("auc: x must be strictly ascending");
  }
  const double span = x.back() - x.front();
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    area += (x[i] - x[i - 1]) / span * (y[i] + y[i - 1]) * 0.5;
  }
  return area;
}

MetricCurve make_curve(Averaging averaging, std::vector<CurvePoint> points) {
  MetricCurve curve;
  curve.averaging = averaging;
  curve.points = std::move(points);
  if (curve.points.size() < 2) return curve;
  std::vector<double> x;
  for (const CurvePoint& p : curve.points) x.push_back(p.budget);
  for (Segment s : kAllSegments) {
    std::vector<double> precision, recall, f1;
    for (const CurvePoint& p : curve.points) {
      precision.push_back(p.scores[s].precision);
      recall.push_back(p.scores[s].recall);
      f1.push_back(p.scores[s].f1);
    }
    const auto slot = static_cast<std::size_t>(s);
    curve.auc_precision[slot] = auc(x, precision);
    curve.auc_recall[slot] = auc(x, recall);
    curve.auc_f1[slot] = auc(x, f1);
  }
  return curve;
}

MetricCurve detection_sweep(std::span<const Instance> eval_det,
                            const ConfidenceRanking& ranking,
                            const ScoreMatrix& scores,
                            std::span<const int> budget_grid, int k_known,
                            Averaging averaging) {
  std::vector<CurvePoint> points;
  for (int m : budget_grid) {
    const DetectionReport report = report_novelties(ranking, scores, m);
    points.push_back({m, detection_metrics(eval_det, report, k_known, averaging)});
  }
  return make_curve(averaging, std::move(points));
}

MetricCurve accommodation_sweep(Strategy strategy, const SplitBundle& bundle,
                                const ConfidenceRanking& ranking,
                                const ScoreMatrix& scores,
                                const SoftmaxModel* base_model,
                                const TrainSpec& spec,
                                const ExperimentConfig& cfg,
                                Averaging averaging) {
  std::vector<CurvePoint> points;
  for (int m : cfg.budget_grid) {
    const DetectionReport report = report_novelties(ranking, scores, m);
    const FeedbackSet fs = build_feedback(bundle.eval_det, report, cfg.k_known);
    const AccommodationRun run =
        accommodate_or_keep(strategy, bundle, fs, base_model, spec, cfg);
    points.push_back({m, accommodation_metrics(bundle.eval_acc, run.eval_predictions,
                                               cfg.k_known, cfg.n_novel, averaging)});
  }
  return make_curve(averaging, std::move(points));
}

std::vector<PerClassPoint> per_class_scatter(const AccommodationRun& run,
                                             const FeedbackSet& fs,
                                             std::span<const Instance> eval_acc,
                                             int k_known, int n_novel) {
  if (run.budget != fs.budget) {
    throw std::invalid_argument("run and feedback set come from different budgets");
  }
  if (run.eval_predictions.size() != eval_acc.size()) {
    throw std::invalid_argument("run predictions do not cover eval_acc");
  }
  ConfusionMatrix cm(k_known + n_novel + 1);
  for (std::size_t i = 0; i < eval_acc.size(); ++i) {
    cm.add(eval_acc[i].true_label, run.eval_predictions[i]);
  }
  const std::vector<int> histogram = feedback_histogram(fs, n_novel);
  std::vector<PerClassPoint> out;
  for (int j = 0; j < n_novel; ++j) {
    const int label = k_known + 1 + j;
    const auto tp = static_cast<double>(cm.true_positives(label));
    const double precision = ratio(tp, static_cast<double>(cm.predicted(label)));
    const double recall = ratio(tp, static_cast<double>(cm.support(label)));
    out.push_back({label, histogram[j], f1_score(precision, recall)});
  }
  return out;
}

}  // namespace noveval

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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "noveval/accommodation.hpp"
#include "noveval/classifier.hpp"
#include "noveval/detection.hpp"
#include "noveval/feedback.hpp"
#include "noveval/io.hpp"
#include "noveval/metrics.hpp"
#include "noveval/sweep.hpp"
#include "noveval/synthgen.hpp"
#include "support/oracles.hpp"

namespace {

using namespace noveval;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

struct Criterion {
  const char* name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> check;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::vector<Instance> with_labels(const std::vector<LabelId>& labels) {
  std::vector<Instance> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.push_back({static_cast<InstanceId>(i + 1), {0.0}, labels[i]});
  }
  return out;
}

ScoreMatrix to_matrix(const oracle::Dense& rows) {
  ScoreMatrix s;
  s.k_known = static_cast<int>(rows[0].size());
  s.rows.resize(static_cast<Eigen::Index>(rows.size()), s.k_known);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.instance_ids.push_back(static_cast<InstanceId>(i + 1));
    for (int j = 0; j < s.k_known; ++j) s.rows(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  return s;
}

Outcome metric_oracle() {
  Outcome o;
  std::mt19937_64 gen(20240601);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = std::uniform_int_distribution<int>(1, 9)(gen);
    const int n = std::uniform_int_distribution<int>(1, 10 - k)(gen);
    const int size = std::uniform_int_distribution<int>(1, 50)(gen);
    std::uniform_int_distribution<int> label(1, k + n), det(0, k);
    std::vector<LabelId> truth, acc_pred, det_assign;
    for (int i = 0; i < size; ++i) {
      truth.push_back(label(gen));
      acc_pred.push_back(label(gen));
      // Half the trials use near-correct predictions to cover high scores.
      det_assign.push_back(trial % 2 ? det(gen) : (truth.back() > k ? 0 : truth.back()));
    }
    const auto inst = with_labels(truth);
    DetectionReport report;
    for (const auto& x : inst) report.instance_ids.push_back(x.id);
    report.assignment = det_assign;
    std::vector<int> det_truth, t(truth.begin(), truth.end());
    for (LabelId l : truth) det_truth.push_back(l > k ? 0 : l);
    const std::vector<int> da(det_assign.begin(), det_assign.end());
    const std::vector<int> p(acc_pred.begin(), acc_pred.end());
    std::vector<int> known, novel;
    for (int c = 1; c <= k; ++c) known.push_back(c);
    for (int c = k + 1; c <= k + n; ++c) novel.push_back(c);
    std::vector<int> all = known, det_all = known;
    all.insert(all.end(), novel.begin(), novel.end());
    det_all.push_back(0);
    for (bool macro : {false, true}) {
      const auto avg = macro ? Averaging::kMacro : Averaging::kMicro;
      const auto d = detection_metrics(inst, report, k, avg);
      const auto a = accommodation_metrics(inst, acc_pred, k, n, avg);
      const oracle::Prf dref[3] = {oracle::brute_scores(det_truth, da, known, macro),
                                   oracle::brute_scores(det_truth, da, {0}, macro),
                                   oracle::brute_scores(det_truth, da, det_all, macro)};
      const oracle::Prf aref[3] = {oracle::brute_scores(t, p, known, macro),
                                   oracle::brute_scores(t, p, novel, macro),
                                   oracle::brute_scores(t, p, all, macro)};
      for (int g = 0; g < 3; ++g) {
        const bool same = d.segments[g].precision == dref[g].precision &&
                          d.segments[g].recall == dref[g].recall &&
                          d.segments[g].f1 == dref[g].f1 &&
                          a.segments[g].precision == aref[g].precision &&
                          a.segments[g].recall == aref[g].recall &&
                          a.segments[g].f1 == aref[g].f1;
        o.require(same, "mismatch in trial " + std::to_string(trial));
        checked += 6;
      }
    }
  }
  if (o.pass) o.detail = "200 cases, " + std::to_string(checked) + " numbers equal";
  return o;
}

Outcome scorer_correctness() {
  Outcome o;
  o.require(score_maxprob(to_matrix({{1, 0, 0}, {0, 1, 0}})).confidence[0] == 1.0,
            "maxprob one-hot");
  o.require(score_maxprob(to_matrix({{0.25, 0.25, 0.25, 0.25}, {1, 0, 0, 0}})).confidence[0] ==
                0.25,
            "maxprob uniform");
  o.require(score_maxprob(to_matrix({{0.9, 0.1}, {0.6, 0.4}, {0.5, 0.5}})).order ==
                std::vector<std::size_t>{2, 1, 0},
            "maxprob order");
  o.require(std::abs(score_compmean(to_matrix({{0.8, 0.1, 0.1}, {1, 0, 0}})).confidence[0] - 0.9) <=
                1e-15,
            "compmean [0.8,0.1,0.1]");
  o.require(score_compmean(to_matrix({{0.25, 0.25, 0.25, 0.25}, {1, 0, 0, 0}})).confidence[0] ==
                0.75,
            "compmean uniform");
  o.require(score_compmean(to_matrix({{0, 1, 0}, {1, 0, 0}})).confidence[0] == 1.0,
            "compmean one-hot");
  const auto same = score_euclid(to_matrix({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}}));
  o.require(std::all_of(same.confidence.begin(), same.confidence.end(),
                        [](double c) { return c == 0.0; }),
            "euclid identical rows");
  const auto sym = score_euclid(to_matrix({{1, 0}, {0, 1}}));
  o.require(std::abs(-sym.confidence[0] - std::sqrt(0.5)) <= 1e-15 &&
                std::abs(-sym.confidence[1] - std::sqrt(0.5)) <= 1e-15,
            "euclid symmetric pair");
  Eigen::MatrixXd var4(3, 1);
  var4 << -2.0, 0.0, 2.0;
  o.require(std::abs(mahalanobis_sq_distances(var4, 0.0)(2) - 1.0) <= 1e-15,
            "mahalanobis 1-D closed form");

  double worst = 0.0;
  std::mt19937_64 gen(99);
  for (int m = 0; m < 50; ++m) {
    const int k = 2 + m % 7;
    const int rows = 10 + 3 * m;
    const auto x = oracle::random_simplex_rows(gen, rows, k, 0.3 + 0.1 * (m % 5));
    const auto expect = oracle::mahalanobis_sq(x, 1e-6);
    const auto got = score_mahalanobis(to_matrix(x), 1e-6);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d2 = got.confidence[i] * got.confidence[i];
      worst = std::max(worst, std::abs(d2 - expect[i]) / std::max(std::abs(expect[i]), 1e-300));
    }
  }
  o.require(worst <= 1e-8, "mahalanobis rel error " + sci(worst));

  bool whitened_ok = true;
  for (int m = 0; m < 10; ++m) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd x(40, 5);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = z(gen) * (1.0 + j) + 0.5 * x(i, 0);
    }
    const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd l = (c.transpose() * c / 39.0).llt().matrixL();
    ScoreMatrix w;
    w.k_known = 5;
    w.rows = l.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();
    for (InstanceId i = 0; i < 40; ++i) w.instance_ids.push_back(i);
    whitened_ok = whitened_ok && score_mahalanobis(w, 1e-6).order == score_euclid(w).order;
  }
  o.require(whitened_ok, "whitened mahalanobis ranking differs from euclid");
  if (o.pass) o.detail = "closed forms exact; 50 matrices max rel err " + sci(worst);
  return o;
}

Outcome protocol_invariants() {
  Outcome o;
  std::mt19937_64 gen(4242);
  const ScorerMethod methods[] = {ScorerMethod::kMaxProb, ScorerMethod::kCompMean,
                                  ScorerMethod::kEuclid, ScorerMethod::kMahalanobis};
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 3 + trial % 4, n = 2 + trial % 3, size = 30 + 5 * trial;
    std::uniform_int_distribution<int> label(1, k + n);
    std::vector<LabelId> labels;
    for (int i = 0; i < size; ++i) labels.push_back(label(gen));
    const auto det = with_labels(labels);
    const auto s = to_matrix(oracle::random_simplex_rows(gen, size, k, 0.5));
    const auto ranking = score(methods[trial % 4], s, 1e-6);
    std::set<InstanceId> prev_flagged, prev_df;
    for (int m = 0; m <= size; ++m) {
      const auto report = report_novelties(ranking, s, m);
      std::set<InstanceId> flagged;
      for (std::size_t i = 0; i < report.assignment.size(); ++i) {
        if (report.assignment[i] == 0) flagged.insert(report.instance_ids[i]);
      }
      o.require(static_cast<int>(flagged.size()) == m, "flag count at m=" + std::to_string(m));
      o.require(std::includes(flagged.begin(), flagged.end(), prev_flagged.begin(),
                              prev_flagged.end()),
                "flagged set not monotone");
      const auto fs = build_feedback(det, report, k);
      std::set<InstanceId> df;
      for (const auto& x : fs.instances) {
        df.insert(x.id);
        o.require(is_novel(x.true_label, k), "known instance in D^F");
      }
      o.require(std::includes(df.begin(), df.end(), prev_df.begin(), prev_df.end()),
                "D^F not monotone");
      long novel_tp = 0;
      for (std::size_t i = 0; i < det.size(); ++i) {
        novel_tp += is_novel(det[i].true_label, k) && report.assignment[i] == 0;
      }
      o.require(static_cast<long>(fs.size()) == novel_tp, "|D^F| != novel TP");
      prev_flagged = std::move(flagged);
      prev_df = std::move(df);
    }
  }
  if (o.pass) o.detail = "20 rankings, every budget 0..n";
  return o;
}

Outcome trivial_boundary() {
  Outcome o;
  const auto cfg = ExperimentConfig::desk_scale();
  const auto bundle = generate(cfg, GeneratorSpec::from_config(cfg));
  const auto model = train_base_model(bundle.d_train, cfg, TrainSpec::from_config(cfg));
  const auto s = predict_scores(model, bundle.eval_det, cfg.k_known);
  const auto report = report_novelties(score_maxprob(s), s, cfg.eval_det_size());
  for (auto a : {Averaging::kMicro, Averaging::kMacro}) {
    const auto m = detection_metrics(bundle.eval_det, report, cfg.k_known, a);
    o.require(m[Segment::kNovel].recall == 1.0, "novel recall != 1");
    o.require(m[Segment::kKnown].recall == 0.0, "known recall != 0");
  }
  const auto fs = build_feedback(bundle.eval_det, report, cfg.k_known);
  const auto total_novel = std::count_if(bundle.eval_det.begin(), bundle.eval_det.end(),
                                         [&](const Instance& x) { return is_novel(x.true_label, cfg.k_known); });
  o.require(static_cast<long>(fs.size()) == total_novel, "|D^F| != novel count");
  if (o.pass) {
    o.detail = "novel R=1, known R=0, |D^F|=" + std::to_string(fs.size()) + " of " +
               std::to_string(total_novel);
  }
  return o;
}

Outcome classifier_numerics() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> z(0.0, 0.7);
    SoftmaxModel m(5, 4);
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 4; ++k) m.weights(j, k) = z(gen);
      m.bias(j) = z(gen);
      m.trained_on[j] = 1;
    }
    std::vector<Instance> batch;
    for (int i = 0; i < 8; ++i) {
      Instance x{i, {}, 1 + static_cast<LabelId>(gen() % 5)};
      for (int k = 0; k < 4; ++k) x.features.push_back(z(gen) * 2);
      batch.push_back(x);
    }
    worst = std::max(worst, gradient_check(m, batch, 0.01));
  }
  o.require(worst < 1e-4, "gradient check " + sci(worst));

  const auto cfg = ExperimentConfig::desk_scale();
  const auto bundle = generate(cfg, GeneratorSpec::from_config(cfg));
  const auto spec = TrainSpec::from_config(cfg);
  o.require(train(bundle.d_train, cfg.num_classes(), spec) ==
                train(bundle.d_train, cfg.num_classes(), spec),
            "retraining not bit-identical");

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Instance> toy;
  for (int i = 0; i < 60; ++i) {
    const LabelId y = 1 + i % 2;
    const double c = y == 1 ? -2.0 : 2.0;
    toy.push_back({i, {c + u(gen), c + u(gen)}, y});
  }
  TrainSpec toy_spec;
  toy_spec.epochs = 50;
  const auto pred = predict_labels(train(toy, 2, toy_spec), toy);
  int hits = 0;
  for (std::size_t i = 0; i < toy.size(); ++i) hits += pred[i] == toy[i].true_label;
  o.require(hits == static_cast<int>(toy.size()), "separable accuracy " + std::to_string(hits));
  if (o.pass) o.detail = "grad err max " + sci(worst) + "; bit-identical; toy acc 1.0";
  return o;
}

Outcome trends() {
  Outcome o;
  const int kSeeds = 10;
  auto cfg = ExperimentConfig::desk_scale();
  const auto& grid = cfg.budget_grid;
  const std::size_t nb = grid.size();
  // [strategy][budget] seed-mean values, macro averaging.
  std::map<std::string, std::vector<double>> overall_f1, known_f1, novel_f1, known_recall;
  for (const char* s : {"retrain", "finetune_df", "finetune_sampled"}) {
    overall_f1[s].assign(nb, 0.0);
    known_f1[s].assign(nb, 0.0);
    novel_f1[s].assign(nb, 0.0);
    known_recall[s].assign(nb, 0.0);
  }
  for (int seed = 1; seed <= kSeeds; ++seed) {
    cfg.seed = static_cast<std::uint64_t>(seed);
    const auto bundle = generate(cfg, GeneratorSpec::from_config(cfg));
    SweepOptions opt;
    opt.averagings = {Averaging::kMacro};
    const auto res = run_sweep(cfg, bundle, opt);
    for (const auto& r : res.rows) {
      if (r.strategy == kDetectionStage) continue;
      const auto b = static_cast<std::size_t>(
          std::find(grid.begin(), grid.end(), r.budget) - grid.begin());
      if (r.segment == Segment::kOverall) overall_f1[r.strategy][b] += r.f1 / kSeeds;
      if (r.segment == Segment::kKnown) {
        known_f1[r.strategy][b] += r.f1 / kSeeds;
        known_recall[r.strategy][b] += r.recall / kSeeds;
      }
      if (r.segment == Segment::kNovel) novel_f1[r.strategy][b] += r.f1 / kSeeds;
    }
  }
  const auto& retrain = overall_f1["retrain"];
  bool a = true;
  for (std::size_t b = 1; b < nb; ++b) a = a && retrain[b] >= retrain[b - 1];
  const double gap = known_recall["retrain"][nb - 1] - known_recall["finetune_df"][nb - 1];
  const bool bb = gap >= 0.20;
  bool c = true;
  double c_margin = 1.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const double d = overall_f1["finetune_sampled"][b] - overall_f1["finetune_df"][b];
    c = c && d >= 0.0;
    c_margin = std::min(c_margin, d);
  }
  bool d = true;
  for (std::size_t b = 0; b + 1 < nb; ++b) d = d && known_f1["retrain"][b] >= novel_f1["retrain"][b];
  o.require(a, "(a) retrain overall F1 not non-decreasing");
  o.require(bb, "(b) forgetting gap " + fmt(gap) + " < 0.20");
  o.require(c, "(c) sampled below df by " + fmt(-c_margin));
  o.require(d, "(d) known F1 below novel F1 under retrain");
  o.detail = std::string(o.pass ? "" : o.detail + "; ") + "(a) " + (a ? "ok" : "FAIL") +
             " retrain F1 " + fmt(retrain.front(), 3) + "->" + fmt(retrain.back(), 3) + "; (b) " +
             (bb ? "ok" : "FAIL") + " gap " + fmt(gap, 3) + "; (c) " + (c ? "ok" : "FAIL") +
             " min margin " + fmt(c_margin, 3) + "; (d) " + (d ? "ok" : "FAIL") + "; " +
             std::to_string(kSeeds) + " seeds";
  return o;
}

Outcome auc_examples() {
  Outcome o;
  const std::vector<double> x = {0.0, 0.5, 1.0}, y = {0.2, 0.4, 0.6};
  // Hand trapezoid: 0.5 * (0.2 + 0.4) / 2 + 0.5 * (0.4 + 0.6) / 2 = 0.4.
  const double got = auc(x, y);
  o.require(got == 0.4, "3-point AUC " + sci(got));
  for (double cval : {0.0, 0.25, 0.7, 1.0}) {
    const std::vector<double> cx = {20, 40, 60, 80, 100, 200}, cy(6, cval);
    o.require(auc(cx, cy) == cval, "constant curve " + std::to_string(cval));
  }
  if (o.pass) o.detail = "3-point = 0.4; constant curves exact";
  return o;
}

Outcome end_to_end_determinism() {
  Outcome o;
  const auto cfg = ExperimentConfig::desk_scale();
  const auto bundle = generate(cfg, GeneratorSpec::from_config(cfg));
  SweepOptions opt;
  opt.scorers = {ScorerMethod::kMaxProb, ScorerMethod::kCompMean, ScorerMethod::kEuclid,
                 ScorerMethod::kMahalanobis};
  const auto a = oracle::scratch_dir("acceptance_run_a");
  const auto b = oracle::scratch_dir("acceptance_run_b");
  run_sweep_to_dir(cfg, generate(cfg, GeneratorSpec::from_config(cfg)), opt, a);
  run_sweep_to_dir(cfg, bundle, opt, b);
  for (const char* f : {"results.csv", "summary.json"}) {
    o.require(read_file(a / f) == read_file(b / f), std::string(f) + " differs");
  }
  if (o.pass) o.detail = "results.csv sha256 " + sha256_file(a / "results.csv").substr(0, 16);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"metric_oracle_equivalence", 10, metric_oracle},
      {"scorer_correctness", 10, scorer_correctness},
      {"protocol_invariants", 5, protocol_invariants},
      {"trivial_system_boundary", 0, trivial_boundary},
      {"classifier_numerics", 0, classifier_numerics},
      {"qualitative_trends", 300, trends},
      {"auc_examples", 0, auc_examples},
      {"end_to_end_determinism", 0, end_to_end_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      o.pass = false;
      o.detail += "; runtime " + fmt(secs, 2) + " s over limit " + fmt(c.time_limit_s, 0) + " s";
    }
    failed += !o.pass;
    std::printf("%s %-28s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}

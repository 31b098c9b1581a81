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

#include "noveval/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "noveval/classifier.hpp"
#include "noveval/error.hpp"
#include "noveval/feedback.hpp"
#include "noveval/io.hpp"

namespace noveval {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// One detection method with the score matrix it reports from.
struct MethodPlan {
  std::string name;
  ConfidenceRanking ranking;
  const ScoreMatrix* scores = nullptr;
};

struct Plan {
  ExperimentConfig cfg;
  const SplitBundle* bundle = nullptr;
  TrainSpec spec;
  SoftmaxModel base;
  ScoreMatrix model_scores;
  ScoreMatrix external_scores;
  std::vector<MethodPlan> methods;
};

ScoreMatrix align_external(const ExternalScores& ext, const SplitBundle& bundle,
                           int k_known, std::optional<ConfidenceRanking>& ranking) {
  if (ext.scores.k_known != k_known) {
    throw FormatError("external scores have " + std::to_string(ext.scores.k_known) +
                      " probability columns, expected K = " + std::to_string(k_known));
  }
  std::unordered_map<InstanceId, std::size_t> row_of;
  for (std::size_t i = 0; i < ext.scores.size(); ++i) row_of[ext.scores.instance_ids[i]] = i;
  if (row_of.size() != bundle.eval_det.size()) {
    throw FormatError("external scores cover " + std::to_string(row_of.size()) +
                      " instances, eval_det has " + std::to_string(bundle.eval_det.size()));
  }
  ScoreMatrix out;
  out.k_known = k_known;
  out.rows.resize(static_cast<Eigen::Index>(bundle.eval_det.size()), k_known);
  std::vector<double> confidence;
  for (std::size_t i = 0; i < bundle.eval_det.size(); ++i) {
    const InstanceId id = bundle.eval_det[i].id;
    const auto it = row_of.find(id);
    if (it == row_of.end()) {
      throw FormatError("external scores lack eval_det id " + std::to_string(id));
    }
    out.instance_ids.push_back(id);
    out.rows.row(static_cast<Eigen::Index>(i)) =
        ext.scores.rows.row(static_cast<Eigen::Index>(it->second));
    if (ext.ranking) confidence.push_back(ext.ranking->confidence[it->second]);
  }
  if (ext.ranking) {
    ranking = make_ranking(ScorerMethod::kExternal, out.instance_ids, std::move(confidence));
  } else {
    ConfidenceRanking r = score_maxprob(out);
    r.method = ScorerMethod::kExternal;
    ranking = std::move(r);
  }
  return out;
}

std::unique_ptr<Plan> make_plan(const ExperimentConfig& cfg, const SplitBundle& bundle,
                                const SweepOptions& options) {
  if (const auto v = validate_config(cfg); !v.empty()) {
    throw ConfigError("invalid config: " + v.front().field + " " + v.front().reason);
  }
  check_bundle(bundle, cfg.k_known, cfg.n_novel);
  for (int m : cfg.budget_grid) {
    if (m > static_cast<int>(bundle.eval_det.size())) {
      throw ConfigError("budget " + std::to_string(m) + " exceeds the detection set");
    }
  }
  auto plan = std::make_unique<Plan>();
  plan->cfg = cfg;
  plan->bundle = &bundle;
  plan->spec = TrainSpec::from_config(cfg);
  plan->base = train_base_model(bundle.d_train, cfg, plan->spec);
  plan->model_scores = predict_scores(plan->base, bundle.eval_det, cfg.k_known);
  for (ScorerMethod m : options.scorers) {
    if (m == ScorerMethod::kExternal) continue;
    plan->methods.push_back({std::string(to_string(m)),
                             score(m, plan->model_scores, cfg.ridge),
                             &plan->model_scores});
  }
  if (options.external) {
    std::optional<ConfidenceRanking> ranking;
    plan->external_scores = align_external(*options.external, bundle, cfg.k_known, ranking);
    plan->methods.push_back({"external", std::move(*ranking), &plan->external_scores});
  }
  if (plan->methods.empty()) throw ConfigError("no detection methods selected");
  return plan;
}

struct Cell {
  std::size_t method = 0;
  Strategy strategy = Strategy::kRetrain;
  int budget = 0;
};

struct CellResult {
  // Segment-major, both averagings (micro then macro).
  std::vector<SegmentScores> scores;
  std::vector<PerClassPoint> per_class;
};

CellResult compute_cell(const Plan& plan, const Cell& cell) {
  const MethodPlan& method = plan.methods[cell.method];
  const DetectionReport report =
      report_novelties(method.ranking, *method.scores, cell.budget);
  const FeedbackSet fs = build_feedback(plan.bundle->eval_det, report, plan.cfg.k_known);
  const AccommodationRun run = accommodate_or_keep(cell.strategy, *plan.bundle, fs,
                                                   &plan.base, plan.spec, plan.cfg);
  CellResult out;
  StageScores by_avg[2] = {
      accommodation_metrics(plan.bundle->eval_acc, run.eval_predictions,
                            plan.cfg.k_known, plan.cfg.n_novel, Averaging::kMicro),
      accommodation_metrics(plan.bundle->eval_acc, run.eval_predictions,
                            plan.cfg.k_known, plan.cfg.n_novel, Averaging::kMacro)};
  for (Segment s : kAllSegments) {
    out.scores.push_back(by_avg[0][s]);
    out.scores.push_back(by_avg[1][s]);
  }
  out.per_class = per_class_scatter(run, fs, plan.bundle->eval_acc, plan.cfg.k_known,
                                    plan.cfg.n_novel);
  return out;
}

std::string cell_name(const Plan& plan, const Cell& cell) {
  return plan.methods[cell.method].name + "__" + std::string(to_string(cell.strategy)) +
         "__" + std::to_string(cell.budget) + ".csv";
}

std::string encode_cell(const CellResult& r) {
  std::ostringstream out;
  for (const SegmentScores& s : r.scores) {
    out << "score," << to_string(s.segment) << ',' << to_string(s.averaging) << ','
        << format_double(s.precision) << ',' << format_double(s.recall) << ','
        << format_double(s.f1) << '\n';
  }
  for (const PerClassPoint& p : r.per_class) {
    out << "class," << p.label << ',' << p.feedback_count << ',' << format_double(p.f1)
        << '\n';
  }
  out << "end\n";
  return out.str();
}

std::optional<CellResult> decode_cell(const std::string& text) {
  CellResult r;
  std::istringstream in(text);
  std::string line;
  bool complete = false;
  try {
    while (std::getline(in, line)) {
      if (line == "end") {
        complete = true;
        break;
      }
      const auto cols = split_csv(line);
      if (cols[0] == "score" && cols.size() == 6) {
        SegmentScores s;
        const auto seg = parse_segment(cols[1]);
        const auto avg = parse_averaging(cols[2]);
        if (!seg || !avg) return std::nullopt;
        s.segment = *seg;
        s.averaging = *avg;
        s.precision = parse_double(cols[3]);
        s.recall = parse_double(cols[4]);
        s.f1 = parse_double(cols[5]);
        r.scores.push_back(s);
      } else if (cols[0] == "class" && cols.size() == 4) {
        PerClassPoint p;
        p.label = std::stoi(std::string(cols[1]));
        p.feedback_count = std::stoi(std::string(cols[2]));
        p.f1 = parse_double(cols[3]);
        r.per_class.push_back(p);
      } else {
        return std::nullopt;
      }
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (!complete || r.scores.size() != 6) return std::nullopt;
  return r;
}

struct CellCache {
  fs::path dir;
};

// Runs every cell, reusing cached results. Returns nullopt if stopped early.
std::optional<std::vector<CellResult>> run_cells(const Plan& plan,
                                                 const std::vector<Cell>& cells,
                                                 int jobs, const CellCache* cache,
                                                 std::optional<std::size_t> stop_after) {
  std::vector<std::optional<CellResult>> results(cells.size());
  if (cache != nullptr) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const fs::path file = cache->dir / cell_name(plan, cells[i]);
      if (fs::exists(file)) results[i] = decode_cell(read_file(file));
    }
  }
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!results[i]) pending.push_back(i);
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> started{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) return;
      if (stop_after && started.fetch_add(1) >= *stop_after) return;
      const std::size_t i = pending[slot];
      try {
        CellResult r = compute_cell(plan, cells[i]);
        if (cache != nullptr) {
          write_file_atomic(cache->dir / cell_name(plan, cells[i]), encode_cell(r));
          // Re-read so cached and fresh runs hold identical values.
          r = *decode_cell(encode_cell(r));
        }
        results[i] = std::move(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(pending.size());
      }
    }
  };
  unsigned n_threads = jobs > 0 ? static_cast<unsigned>(jobs)
                                : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, std::max<std::size_t>(1, pending.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<CellResult> out;
  out.reserve(cells.size());
  for (auto& r : results) {
    if (!r) return std::nullopt;
    out.push_back(std::move(*r));
  }
  return out;
}

std::optional<SweepResults> sweep_impl(const ExperimentConfig& cfg,
                                       const SplitBundle& bundle,
                                       const SweepOptions& options,
                                       const CellCache* cache,
                                       std::optional<std::size_t> stop_after) {
  const auto plan = make_plan(cfg, bundle, options);
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < plan->methods.size(); ++m) {
    for (Strategy s : options.strategies) {
      for (int budget : cfg.budget_grid) cells.push_back({m, s, budget});
    }
  }
  auto cell_results = run_cells(*plan, cells, options.jobs, cache, stop_after);
  if (!cell_results) return std::nullopt;

  auto wanted = [&](Averaging a) {
    return std::find(options.averagings.begin(), options.averagings.end(), a) !=
           options.averagings.end();
  };
  SweepResults out;
  std::size_t cell_index = 0;
  for (const MethodPlan& method : plan->methods) {
    for (int budget : cfg.budget_grid) {
      const DetectionReport report = report_novelties(method.ranking, *method.scores, budget);
      const StageScores by_avg[2] = {
          detection_metrics(bundle.eval_det, report, cfg.k_known, Averaging::kMicro),
          detection_metrics(bundle.eval_det, report, cfg.k_known, Averaging::kMacro)};
      for (Segment s : kAllSegments) {
        for (const StageScores& stage : by_avg) {
          const SegmentScores& sc = stage[s];
          if (!wanted(sc.averaging)) continue;
          out.rows.push_back({method.name, std::string(kDetectionStage), budget, s,
                              sc.averaging, sc.precision, sc.recall, sc.f1});
        }
      }
      const FeedbackSet fs = build_feedback(bundle.eval_det, report, cfg.k_known);
      const std::vector<int> hist = feedback_histogram(fs, cfg.n_novel);
      for (int j = 0; j < cfg.n_novel; ++j) {
        out.feedback.push_back({method.name, budget, cfg.k_known + 1 + j, hist[j]});
      }
    }
    for (Strategy strategy : options.strategies) {
      for (int budget : cfg.budget_grid) {
        const CellResult& r = (*cell_results)[cell_index++];
        for (const SegmentScores& sc : r.scores) {
          if (!wanted(sc.averaging)) continue;
          out.rows.push_back({method.name, std::string(to_string(strategy)), budget,
                              sc.segment, sc.averaging, sc.precision, sc.recall, sc.f1});
        }
        for (const PerClassPoint& p : r.per_class) {
          out.per_class.push_back({method.name, std::string(to_string(strategy)), budget,
                                   p.label, p.feedback_count, p.f1});
        }
      }
    }
  }
  return out;
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json config_echo(const ExperimentConfig& cfg) {
  ordered_json echo = ordered_json::object();
  std::istringstream in(format_config(cfg));
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    echo[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return echo;
}

std::vector<std::string> method_names(const SweepOptions& options) {
  std::vector<std::string> out;
  for (ScorerMethod m : options.scorers) {
    if (m != ScorerMethod::kExternal) out.emplace_back(to_string(m));
  }
  if (options.external) out.emplace_back("external");
  return out;
}

std::string sweep_fingerprint(const ExperimentConfig& cfg, const SweepOptions& options) {
  std::ostringstream out;
  out << kToolVersion << '\n' << format_config(cfg);
  if (options.external) {
    const ExternalScores& ext = *options.external;
    write_score_matrix(out, ext.scores, ext.true_labels,
                       ext.ranking ? &*ext.ranking : nullptr);
  }
  return sha256_hex(out.str());
}

}  // namespace

SweepResults run_sweep(const ExperimentConfig& cfg, const SplitBundle& bundle,
                       const SweepOptions& options) {
  return *sweep_impl(cfg, bundle, options, nullptr, std::nullopt);
}

std::vector<AucEntry> summarize_auc(std::span<const ResultRow> rows) {
  struct Series {
    AucEntry key;
    std::vector<double> x, p, r, f;
  };
  std::vector<Series> series;
  std::map<std::tuple<std::string, std::string, int, int>, std::size_t> index;
  for (const ResultRow& row : rows) {
    const auto key = std::make_tuple(row.method, row.strategy,
                                     static_cast<int>(row.segment),
                                     static_cast<int>(row.averaging));
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, series.size()).first;
      Series s;
      s.key = {row.method, row.strategy, row.segment, row.averaging, 0, 0, 0};
      series.push_back(std::move(s));
    }
    Series& s = series[it->second];
    s.x.push_back(row.budget);
    s.p.push_back(row.precision);
    s.r.push_back(row.recall);
    s.f.push_back(row.f1);
  }
  std::vector<AucEntry> out;
  for (Series& s : series) {
    if (s.x.size() < 2) continue;
    AucEntry e = s.key;
    e.precision = auc(s.x, s.p);
    e.recall = auc(s.x, s.r);
    e.f1 = auc(s.x, s.f);
    out.push_back(std::move(e));
  }
  return out;
}

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << "method,strategy,budget,segment,averaging,precision,recall,f1\n";
  for (const ResultRow& r : rows) {
    out << r.method << ',' << r.strategy << ',' << r.budget << ',' << to_string(r.segment)
        << ',' << to_string(r.averaging) << ',' << format_double(r.precision) << ','
        << format_double(r.recall) << ',' << format_double(r.f1) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in, std::string_view name) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "method,strategy,budget,segment,averaging,precision,recall,f1") {
    throw FormatError(std::string(name) + ":1: unexpected results header");
  }
  std::vector<ResultRow> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    const auto seg = cols.size() == 8 ? parse_segment(cols[3]) : std::nullopt;
    const auto avg = cols.size() == 8 ? parse_averaging(cols[4]) : std::nullopt;
    if (!seg || !avg) {
      throw FormatError(std::string(name) + ":" + std::to_string(line_no) +
                        ": malformed results row");
    }
    try {
      out.push_back({std::string(cols[0]), std::string(cols[1]),
                     std::stoi(std::string(cols[2])), *seg, *avg, parse_double(cols[5]),
                     parse_double(cols[6]), parse_double(cols[7])});
    } catch (const std::exception&) {
      throw FormatError(std::string(name) + ":" + std::to_string(line_no) +
                        ": malformed number");
    }
  }
  return out;
}

void write_manifest(const fs::path& out_dir, const ExperimentConfig& cfg,
                    const SweepOptions* options, std::span<const std::string> artifacts) {
  ordered_json j;
  j["tool"] = std::string(kToolVersion);
  j["seed"] = cfg.seed;
  j["config"] = config_echo(cfg);
  j["budget_grid"] = cfg.budget_grid;
  if (options != nullptr) {
    j["scorers"] = method_names(*options);
    std::vector<std::string> strategies;
    for (Strategy s : options->strategies) strategies.emplace_back(to_string(s));
    j["strategies"] = strategies;
  }
  ordered_json digests = ordered_json::object();
  for (const std::string& rel : artifacts) digests[rel] = sha256_file(out_dir / rel);
  j["artifacts"] = digests;
  write_file_atomic(out_dir / "manifest.json", json_text(j));
}

bool run_sweep_to_dir(const ExperimentConfig& cfg, const SplitBundle& bundle,
                      const SweepOptions& options, const fs::path& out_dir,
                      const SweepDirOptions& dir_options) {
  CellCache cache{out_dir / "cells"};
  const std::string fingerprint = sweep_fingerprint(cfg, options);
  const fs::path stamp = cache.dir / "fingerprint";
  if (fs::exists(cache.dir) &&
      (!fs::exists(stamp) || read_file(stamp) != fingerprint + "\n")) {
    fs::remove_all(cache.dir);
  }
  fs::create_directories(cache.dir);
  write_file_atomic(stamp, fingerprint + "\n");

  const auto results =
      sweep_impl(cfg, bundle, options, &cache, dir_options.stop_after_cells);
  if (!results) return false;

  std::vector<std::string> artifacts;
  auto emit = [&](const std::string& rel, const std::string& text) {
    write_file_atomic(out_dir / rel, text);
    artifacts.push_back(rel);
  };

  std::ostringstream csv;
  write_results_csv(csv, results->rows);
  emit("results.csv", csv.str());

  ordered_json summary;
  summary["tool"] = std::string(kToolVersion);
  summary["seed"] = cfg.seed;
  summary["config"] = config_echo(cfg);
  summary["scorers"] = method_names(options);
  std::vector<std::string> strategies;
  for (Strategy s : options.strategies) strategies.emplace_back(to_string(s));
  summary["strategies"] = strategies;
  ordered_json aucs = ordered_json::array();
  for (const AucEntry& e : summarize_auc(results->rows)) {
    aucs.push_back({{"method", e.method},
                    {"strategy", e.strategy},
                    {"segment", std::string(to_string(e.segment))},
                    {"averaging", std::string(to_string(e.averaging))},
                    {"auc_precision", e.precision},
                    {"auc_recall", e.recall},
                    {"auc_f1", e.f1}});
  }
  summary["auc"] = aucs;
  emit("summary.json", json_text(summary));

  std::ostringstream fb;
  fb << "method,budget,label,count\n";
  for (const FeedbackCountRow& r : results->feedback) {
    fb << r.method << ',' << r.budget << ',' << r.label << ',' << r.count << '\n';
  }
  emit("feedback_counts.csv", fb.str());

  std::ostringstream pc;
  pc << "method,strategy,budget,label,feedback_count,f1\n";
  for (const PerClassRow& r : results->per_class) {
    pc << r.method << ',' << r.strategy << ',' << r.budget << ',' << r.label << ','
       << r.feedback_count << ',' << format_double(r.f1) << '\n';
  }
  emit("per_class.csv", pc.str());

  std::map<std::string, std::string> plots;
  std::vector<std::string> plot_order;
  for (const ResultRow& r : results->rows) {
    const std::string rel = "plots/" + r.method + "__" + r.strategy + "__" +
                            std::string(to_string(r.segment)) + "__" +
                            std::string(to_string(r.averaging)) + ".tsv";
    auto [it, inserted] = plots.emplace(rel, "budget\tf1\n");
    if (inserted) plot_order.push_back(rel);
    it->second += std::to_string(r.budget) + "\t" + format_double(r.f1) + "\n";
  }
  for (const std::string& rel : plot_order) emit(rel, plots[rel]);

  write_manifest(out_dir, cfg, &options, artifacts);
  return true;
}

namespace {

std::ifstream open_output(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing sweep output " + path.string() + " (run sweep first)");
  return in;
}

std::vector<std::vector<std::string>> read_simple_csv(const fs::path& path,
                                                      std::string_view header) {
  auto in = open_output(path);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw FormatError(path.string() + ":1: unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    for (auto c : split_csv(line)) cols.emplace_back(c);
    rows.push_back(std::move(cols));
  }
  return rows;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string fixed4(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << v;
  return out.str();
}

}  // namespace

std::string run_report(const fs::path& out_dir) {
  auto results_in = open_output(out_dir / "results.csv");
  const std::vector<ResultRow> rows =
      read_results_csv(results_in, (out_dir / "results.csv").string());
  const auto feedback =
      read_simple_csv(out_dir / "feedback_counts.csv", "method,budget,label,count");
  const auto per_class = read_simple_csv(out_dir / "per_class.csv",
                                         "method,strategy,budget,label,feedback_count,f1");
  const fs::path report_dir = out_dir / "report";
  fs::create_directories(report_dir);

  std::map<std::string, std::string> files;
  std::vector<std::string> order;
  auto append = [&](const std::string& rel, const std::string& header,
                    const std::string& line) {
    auto [it, inserted] = files.emplace(rel, header);
    if (inserted) order.push_back(rel);
    it->second += line;
  };
  for (const auto& r : feedback) {
    if (r.size() != 4) throw FormatError("feedback_counts.csv: malformed row");
    append("histogram__" + r[0] + "__" + r[1] + ".tsv", "label\tcount\n",
           r[2] + "\t" + r[3] + "\n");
  }
  for (const auto& r : per_class) {
    if (r.size() != 6) throw FormatError("per_class.csv: malformed row");
    append("scatter__" + r[0] + "__" + r[1] + "__" + r[2] + ".tsv",
           "label\tfeedback_count\tf1\n", r[3] + "\t" + r[4] + "\t" + r[5] + "\n");
  }

  // Known vs novel F1 per accommodation point.
  std::map<std::tuple<std::string, std::string, int, std::string>, std::pair<double, double>>
      kvn;
  std::vector<std::tuple<std::string, std::string, int, std::string>> kvn_order;
  for (const ResultRow& r : rows) {
    if (r.strategy == kDetectionStage || r.segment == Segment::kOverall) continue;
    const auto key = std::make_tuple(r.method, r.strategy, r.budget,
                                     std::string(to_string(r.averaging)));
    auto [it, inserted] = kvn.emplace(key, std::make_pair(0.0, 0.0));
    if (inserted) kvn_order.push_back(key);
    (r.segment == Segment::kKnown ? it->second.first : it->second.second) = r.f1;
  }
  std::string kvn_text = "method\tstrategy\tbudget\taveraging\tknown_f1\tnovel_f1\n";
  for (const auto& key : kvn_order) {
    const auto& [m, s, b, a] = key;
    kvn_text += m + "\t" + s + "\t" + std::to_string(b) + "\t" + a + "\t" +
                format_double(kvn[key].first) + "\t" + format_double(kvn[key].second) +
                "\n";
  }
  files.emplace("known_vs_novel.tsv", kvn_text);
  order.push_back("known_vs_novel.tsv");

  std::string table = pad("method", 13) + pad("stage", 18) + pad("averaging", 11) +
                      pad("auc_f1_known", 14) + pad("auc_f1_novel", 14) +
                      "auc_f1_overall\n";
  std::map<std::tuple<std::string, std::string, std::string>, std::array<double, 3>> auc_rows;
  std::vector<std::tuple<std::string, std::string, std::string>> auc_order;
  for (const AucEntry& e : summarize_auc(rows)) {
    const auto key =
        std::make_tuple(e.method, e.strategy, std::string(to_string(e.averaging)));
    auto [it, inserted] = auc_rows.emplace(key, std::array<double, 3>{});
    if (inserted) auc_order.push_back(key);
    it->second[static_cast<std::size_t>(e.segment)] = e.f1;
  }
  for (const auto& key : auc_order) {
    const auto& [m, s, a] = key;
    const auto& v = auc_rows[key];
    table += pad(m, 13) + pad(s, 18) + pad(a, 11) + pad(fixed4(v[0]), 14) +
             pad(fixed4(v[1]), 14) + fixed4(v[2]) + "\n";
  }
  files.emplace("summary.txt", table);
  order.push_back("summary.txt");

  for (const std::string& rel : order) write_file_atomic(report_dir / rel, files[rel]);
  return table;
}

}  // namespace noveval

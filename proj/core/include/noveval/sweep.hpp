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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noveval/accommodation.hpp"
#include "noveval/config.hpp"
#include "noveval/detection.hpp"
#include "noveval/metrics.hpp"
#include "noveval/types.hpp"

namespace noveval {

inline constexpr std::string_view kToolVersion = "noveval 0.1.0";
// Strategy column value for detection-stage rows of the results CSV.
inline constexpr std::string_view kDetectionStage = "detection";

struct SweepOptions {
  std::vector<ScorerMethod> scorers = {ScorerMethod::kMaxProb};
  std::vector<Strategy> strategies = {Strategy::kRetrain, Strategy::kFinetuneDf,
                                      Strategy::kFinetuneSampled};
  std::vector<Averaging> averagings = {Averaging::kMicro, Averaging::kMacro};
  // Adds the "external" method. Its ids must match Eval_Det. Without a
  // confidence column the external rows are ranked by max probability.
  std::optional<ExternalScores> external;
  // Worker threads for sweep cells; 0 picks the hardware concurrency.
  int jobs = 0;
};

// One line of results.csv.
struct ResultRow {
  std::string method;
  std::string strategy;  // kDetectionStage or a Strategy name
  int budget = 0;
  Segment segment = Segment::kOverall;
  Averaging averaging = Averaging::kMicro;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct FeedbackCountRow {
  std::string method;
  int budget = 0;
  LabelId label = 0;
  int count = 0;
};

struct PerClassRow {
  std::string method;
  std::string strategy;
  int budget = 0;
  LabelId label = 0;
  int feedback_count = 0;
  double f1 = 0.0;
};

// All rows in canonical order: method, then strategy (detection first, then
// the requested strategies), then budget, segment and averaging.
struct SweepResults {
  std::vector<ResultRow> rows;
  std::vector<FeedbackCountRow> feedback;
  std::vector<PerClassRow> per_class;
};

struct AucEntry {
  std::string method;
  std::string strategy;
  Segment segment = Segment::kOverall;
  Averaging averaging = Averaging::kMicro;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Full two-stage pipeline in memory: base model on D^T, scoring, ranking,
// then for each budget the report, feedback and every strategy.
SweepResults run_sweep(const ExperimentConfig& cfg, const SplitBundle& bundle,
                       const SweepOptions& options);

// AUC per (method, strategy, segment, averaging) over the budget axis.
// Empty when the grid has fewer than two budgets.
std::vector<AucEntry> summarize_auc(std::span<const ResultRow> rows);

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows);
std::vector<ResultRow> read_results_csv(std::istream& in, std::string_view name);

struct SweepDirOptions {
  // Stop after computing this many new cells (simulates an interruption).
  std::optional<std::size_t> stop_after_cells;
};

// File-backed sweep into `out_dir`:
//   cells/           one cached file per (method, strategy, budget)
//   results.csv      method,strategy,budget,segment,averaging,precision,recall,f1
//   summary.json     config echo, seed and AUCs
//   feedback_counts.csv, per_class.csv, plots/*.tsv, manifest.json
// Cells already present from an earlier run with the same configuration are
// reused, so an interrupted sweep resumes where it stopped. Returns false if
// stopped early.
bool run_sweep_to_dir(const ExperimentConfig& cfg, const SplitBundle& bundle,
                      const SweepOptions& options,
                      const std::filesystem::path& out_dir,
                      const SweepDirOptions& dir_options = {});

// Reads a finished sweep directory and writes report/: per-budget feedback
// histograms, per-class scatter files, the known-vs-novel table and
// summary.txt. Returns the summary table. Throws Error when sweep outputs
// are missing.
std::string run_report(const std::filesystem::path& out_dir);

// manifest.json with the config echo, run settings and SHA-256 digests of
// `artifacts` (paths relative to `out_dir`).
void write_manifest(const std::filesystem::path& out_dir,
                    const ExperimentConfig& cfg, const SweepOptions* options,
                    std::span<const std::string> artifacts);

}  // namespace noveval

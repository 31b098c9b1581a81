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

// noveval: two-stage novelty detection / accommodation experiment runner.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noveval/accommodation.hpp"
#include "noveval/classifier.hpp"
#include "noveval/config.hpp"
#include "noveval/detection.hpp"
#include "noveval/error.hpp"
#include "noveval/feedback.hpp"
#include "noveval/io.hpp"
#include "noveval/metrics.hpp"
#include "noveval/sweep.hpp"
#include "noveval/synthgen.hpp"

namespace fs = std::filesystem;
using namespace noveval;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFormat = 3;
constexpr int kExitInternal = 4;

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

ExperimentConfig load_checked_config(const CommonArgs& args) {
  ExperimentConfig cfg =
      args.config.empty() ? ExperimentConfig::desk_scale() : load_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  const auto violations = validate_config(cfg);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid config (" << violations.size() << " violation"
        << (violations.size() == 1 ? "" : "s") << "):";
    for (const auto& v : violations) msg << "\n  " << v.field << ": " << v.reason;
    throw ConfigError(msg.str());
  }
  return cfg;
}

SplitBundle bundle_for(const ExperimentConfig& cfg, const std::string& splits) {
  SplitBundle bundle = splits.empty()
                           ? generate(cfg, GeneratorSpec::from_config(cfg))
                           : load_bundle(splits);
  check_bundle(bundle, cfg.k_known, cfg.n_novel);
  return bundle;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::vector<std::string>& names, Parse parse,
                          const char* what) {
  std::vector<T> out;
  for (const std::string& name : names) {
    const auto v = parse(name);
    if (!v) throw ConfigError(std::string("unknown ") + what + " '" + name + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<Averaging> parse_averagings(const std::string& name) {
  if (name == "both") return {Averaging::kMicro, Averaging::kMacro};
  const auto a = parse_averaging(name);
  if (!a) throw ConfigError("--averaging must be micro, macro or both");
  return {*a};
}

void print_stage(std::ostream& out, std::string_view label, const StageScores& s) {
  out << label;
  for (Segment seg : kAllSegments) {
    out << "  " << to_string(seg) << " P=" << format_double(s[seg].precision)
        << " R=" << format_double(s[seg].recall) << " F1=" << format_double(s[seg].f1);
  }
  out << '\n';
}

std::string dump(auto&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

void add_common(CLI::App* cmd, CommonArgs& args, bool need_out = true) {
  cmd->add_option("--config", args.config, "key=value experiment config file");
  auto* out = cmd->add_option("--out", args.out, "output directory");
  if (need_out) out->required();
  cmd->add_option("--seed", args.seed, "override the config seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage novelty detection and accommodation evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonArgs common;
  std::string splits, model_path, report_path, feedback_path, external, averaging = "both";
  std::vector<std::string> scorers = {"maxprob"};
  std::vector<std::string> strategies = {"retrain", "finetune_df", "finetune_sampled"};
  std::optional<int> budget;
  int jobs = 0;
  std::optional<std::size_t> stop_after;

  auto* generate_cmd = app.add_subcommand("generate", "write the synthetic split CSVs");
  add_common(generate_cmd, common);

  auto* train_cmd = app.add_subcommand("train", "train the K+N-logit base model on D^T");
  add_common(train_cmd, common);
  train_cmd->add_option("--splits", splits, "directory with the split CSVs");

  auto* detect_cmd = app.add_subcommand("detect", "score Eval_Det and report novelties");
  add_common(detect_cmd, common);
  detect_cmd->add_option("--splits", splits, "directory with the split CSVs");
  detect_cmd->add_option("--model", model_path, "base model checkpoint");
  detect_cmd->add_option("--scorers", scorers, "maxprob, compmean, euclid, mahalanobis")
      ->delimiter(',');
  detect_cmd->add_option("--external-scores", external, "score-matrix CSV to rank instead");
  detect_cmd->add_option("--budget", budget, "number of reported novelties")->required();
  detect_cmd->add_option("--averaging", averaging, "micro, macro or both");

  auto* feedback_cmd = app.add_subcommand("feedback", "build D^F from a detection report");
  add_common(feedback_cmd, common);
  feedback_cmd->add_option("--splits", splits, "directory with the split CSVs");
  feedback_cmd->add_option("--report", report_path, "detection report CSV")->required();

  auto* accommodate_cmd =
      app.add_subcommand("accommodate", "incorporate D^F and evaluate on Eval_Acc");
  add_common(accommodate_cmd, common);
  accommodate_cmd->add_option("--splits", splits, "directory with the split CSVs");
  accommodate_cmd->add_option("--feedback", feedback_path, "feedback CSV")->required();
  accommodate_cmd->add_option("--model", model_path, "base model for fine-tuning");
  accommodate_cmd->add_option("--strategies", strategies,
                              "retrain, finetune_df, finetune_sampled")
      ->delimiter(',');
  accommodate_cmd->add_option("--averaging", averaging, "micro, macro or both");

  auto* sweep_cmd = app.add_subcommand("sweep", "run the full budget sweep");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--splits", splits, "directory with the split CSVs");
  sweep_cmd->add_option("--scorers", scorers, "maxprob, compmean, euclid, mahalanobis")
      ->delimiter(',');
  sweep_cmd->add_option("--strategies", strategies,
                        "retrain, finetune_df, finetune_sampled")
      ->delimiter(',');
  sweep_cmd->add_option("--external-scores", external, "extra score-matrix CSV method");
  sweep_cmd->add_option("--averaging", averaging, "micro, macro or both");
  sweep_cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  sweep_cmd->add_option("--stop-after", stop_after, "stop after N new cells")
      ->group("");

  auto* report_cmd = app.add_subcommand("report", "tables and analyses from a sweep");
  report_cmd->add_option("--out", common.out, "sweep output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const fs::path out = common.out;
    if (*generate_cmd) {
      const ExperimentConfig cfg = load_checked_config(common);
      const SplitBundle bundle = generate(cfg, GeneratorSpec::from_config(cfg));
      save_bundle(out, bundle, cfg.feature_dim);
      write_file_atomic(out / "config.txt", format_config(cfg));
      const std::vector<std::string> files = {"d_train.csv", "eval_det.csv",
                                              "eval_acc.csv", "config.txt"};
      write_manifest(out, cfg, nullptr, files);
      std::cout << "d_train.csv " << bundle.d_train.size() << " rows\n"
                << "eval_det.csv " << bundle.eval_det.size() << " rows\n"
                << "eval_acc.csv " << bundle.eval_acc.size() << " rows\n";
    } else if (*train_cmd) {
      const ExperimentConfig cfg = load_checked_config(common);
      const SplitBundle bundle = bundle_for(cfg, splits);
      const SoftmaxModel model =
          train_base_model(bundle.d_train, cfg, TrainSpec::from_config(cfg));
      save_model(out / "model.txt", model);
      std::cout << "model.txt " << model.num_logits() << " logits x "
                << model.feature_dim() << " features\n";
    } else if (*detect_cmd) {
      const ExperimentConfig cfg = load_checked_config(common);
      const SplitBundle bundle = bundle_for(cfg, splits);
      const auto averagings = parse_averagings(averaging);
      std::vector<std::pair<std::string, std::pair<ConfidenceRanking, ScoreMatrix>>> runs;
      if (!external.empty()) {
        ExternalScores ext = load_external_scores(external);
        ConfidenceRanking ranking = ext.ranking ? *ext.ranking : score_maxprob(ext.scores);
        runs.push_back({"external", {std::move(ranking), std::move(ext.scores)}});
      } else {
        const SoftmaxModel model =
            model_path.empty()
                ? train_base_model(bundle.d_train, cfg, TrainSpec::from_config(cfg))
                : load_model(model_path);
        const ScoreMatrix scores = predict_scores(model, bundle.eval_det, cfg.k_known);
        write_file_atomic(out / "scores.csv", dump([&](std::ostream& o) {
                            write_score_matrix(o, scores, labels_of(bundle.eval_det));
                          }));
        for (ScorerMethod m : parse_list<ScorerMethod>(scorers, parse_scorer, "scorer")) {
          runs.push_back({std::string(to_string(m)), {score(m, scores, cfg.ridge), scores}});
        }
      }
      for (const auto& [name, run] : runs) {
        const DetectionReport report = report_novelties(run.first, run.second, *budget);
        write_file_atomic(out / ("report_" + name + ".csv"),
                          dump([&](std::ostream& o) { write_report(o, report); }));
        for (Averaging a : averagings) {
          print_stage(std::cout, name + " " + std::string(to_string(a)),
                      detection_metrics(bundle.eval_det, report, cfg.k_known, a));
        }
      }
    } else if (*feedback_cmd) {
      const ExperimentConfig cfg = load_checked_config(common);
      const SplitBundle bundle = bundle_for(cfg, splits);
      std::ifstream in(report_path, std::ios::binary);
      if (!in) throw FormatError("cannot open " + report_path);
      const DetectionReport report = read_report(in, report_path);
      const FeedbackSet fs = build_feedback(bundle.eval_det, report, cfg.k_known);
      save_instances(out / "feedback.csv", fs.instances, cfg.feature_dim);
      std::string hist = "label\tcount\n";
      const auto counts = feedback_histogram(fs, cfg.n_novel);
      for (int j = 0; j < cfg.n_novel; ++j) {
        hist += std::to_string(cfg.k_known + 1 + j) + "\t" + std::to_string(counts[j]) + "\n";
      }
      write_file_atomic(out / "feedback_histogram.tsv", hist);
      std::cout << "feedback.csv " << fs.size() << " rows (budget " << fs.budget << ")\n";
    } else if (*accommodate_cmd) {
      const ExperimentConfig cfg = load_checked_config(common);
      const SplitBundle bundle = bundle_for(cfg, splits);
      const auto averagings = parse_averagings(averaging);
      FeedbackSet fs;
      fs.k_known = cfg.k_known;
      fs.instances = load_instances(feedback_path);
      for (const Instance& inst : fs.instances) {
        if (!is_novel(inst.true_label, cfg.k_known) || inst.true_label > cfg.num_classes()) {
          throw FormatError(feedback_path + ": instance " + std::to_string(inst.id) +
                            " is not a novel-class instance");
        }
        ++fs.per_class_counts[inst.true_label];
      }
      const TrainSpec spec = TrainSpec::from_config(cfg);
      std::optional<SoftmaxModel> base;
      const auto chosen = parse_list<Strategy>(strategies, parse_strategy, "strategy");
      for (Strategy s : chosen) {
        if (s != Strategy::kRetrain && !base) {
          base = model_path.empty() ? train_base_model(bundle.d_train, cfg, spec)
                                    : load_model(model_path);
        }
        const AccommodationRun run =
            run_accommodation(s, bundle, fs, base ? &*base : nullptr, spec, cfg);
        std::string preds = "id,true_label,predicted_label\n";
        for (std::size_t i = 0; i < run.eval_ids.size(); ++i) {
          preds += std::to_string(run.eval_ids[i]) + "," +
                   std::to_string(bundle.eval_acc[i].true_label) + "," +
                   std::to_string(run.eval_predictions[i]) + "\n";
        }
        write_file_atomic(out / ("predictions_" + std::string(to_string(s)) + ".csv"), preds);
        for (Averaging a : averagings) {
          print_stage(std::cout, std::string(to_string(s)) + " " + std::string(to_string(a)),
                      accommodation_metrics(bundle.eval_acc, run.eval_predictions,
                                            cfg.k_known, cfg.n_novel, a));
        }
      }
    } else if (*sweep_cmd) {
      const ExperimentConfig cfg = load_checked_config(common);
      const SplitBundle bundle = bundle_for(cfg, splits);
      SweepOptions options;
      options.scorers = parse_list<ScorerMethod>(scorers, parse_scorer, "scorer");
      options.strategies = parse_list<Strategy>(strategies, parse_strategy, "strategy");
      options.averagings = parse_averagings(averaging);
      options.jobs = jobs;
      if (!external.empty()) options.external = load_external_scores(external);
      if (!run_sweep_to_dir(cfg, bundle, options, out, {stop_after})) {
        std::cout << "sweep stopped early; rerun to resume\n";
        return 0;
      }
      std::cout << "wrote " << (out / "results.csv").string() << "\n";
    } else if (*report_cmd) {
      std::cout << run_report(out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "input format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}

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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "noveval/io.hpp"
#include "support/oracles.hpp"

namespace noveval {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt";
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = std::string("\"") + NOVEVAL_CLI_PATH + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

int line_count(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = oracle::scratch_dir(std::string("cli_") +
                               ::testing::UnitTest::GetInstance()->current_test_info()->name());
    config_ = dir_ / "desk.cfg";
    std::ofstream(config_) << "# desk run\nbudget_grid=20,100,200\n";
  }

  std::string cfg() const { return "--config \"" + config_.string() + "\""; }
  std::string at(const std::string& rel) const { return "\"" + (dir_ / rel).string() + "\""; }

  fs::path dir_;
  fs::path config_;
};

TEST_F(Cli, GenerateWritesDocumentedRowCounts) {
  const auto r = run("generate " + cfg() + " --out " + at("a"), dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir_ / "a" / "d_train.csv"), 1 + 10 * 50);
  EXPECT_EQ(line_count(dir_ / "a" / "eval_det.csv"), 1 + 20 * 20);
  EXPECT_EQ(line_count(dir_ / "a" / "eval_acc.csv"), 1 + 20 * 40);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "manifest.json"));
}

TEST_F(Cli, GenerateIsByteIdentical) {
  ASSERT_EQ(run("generate " + cfg() + " --out " + at("a"), dir_).code, 0);
  ASSERT_EQ(run("generate " + cfg() + " --out " + at("b"), dir_).code, 0);
  for (const char* f : {"d_train.csv", "eval_det.csv", "eval_acc.csv", "config.txt",
                        "manifest.json"}) {
    EXPECT_EQ(sha256_file(dir_ / "a" / f), sha256_file(dir_ / "b" / f)) << f;
  }
  ASSERT_EQ(run("generate " + cfg() + " --seed 5 --out " + at("c"), dir_).code, 0);
  EXPECT_NE(sha256_file(dir_ / "a" / "d_train.csv"), sha256_file(dir_ / "c" / "d_train.csv"));
}

TEST_F(Cli, CorruptConfigExitsWithTwo) {
  std::ofstream(config_) << "k_known=0\nbudget_grid=50,40\n";
  const auto r = run("generate " + cfg() + " --out " + at("a"), dir_);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("k_known"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("budget_grid"), std::string::npos) << r.err;

  std::ofstream(config_) << "mystery=1\n";
  EXPECT_EQ(run("generate " + cfg() + " --out " + at("a"), dir_).code, 2);
  EXPECT_EQ(run("generate --out", dir_).code, 2);
  EXPECT_EQ(run("bogus", dir_).code, 2);
}

TEST_F(Cli, MalformedSplitsExitWithThree) {
  fs::create_directories(dir_ / "s");
  std::ofstream(dir_ / "s" / "d_train.csv") << "id,true_label,f_1\n1,1,abc\n";
  std::ofstream(dir_ / "s" / "eval_det.csv") << "id,true_label,f_1\n";
  std::ofstream(dir_ / "s" / "eval_acc.csv") << "id,true_label,f_1\n";
  const auto r = run("train " + cfg() + " --splits " + at("s") + " --out " + at("m"), dir_);
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("d_train.csv:2"), std::string::npos) << r.err;
}

TEST_F(Cli, StagewiseCommandsChain) {
  ASSERT_EQ(run("generate " + cfg() + " --out " + at("s"), dir_).code, 0);
  auto r = run("train " + cfg() + " --splits " + at("s") + " --out " + at("m"), dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  r = run("detect " + cfg() + " --splits " + at("s") + " --model " + at("m/model.txt") +
              " --budget 200 --scorers maxprob,euclid --out " + at("d"),
          dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("maxprob"), std::string::npos);
  EXPECT_EQ(line_count(dir_ / "d" / "report_maxprob.csv"), 1 + 400);
  EXPECT_EQ(line_count(dir_ / "d" / "scores.csv"), 1 + 400);
  r = run("feedback " + cfg() + " --splits " + at("s") + " --report " +
              at("d/report_maxprob.csv") + " --out " + at("f"),
          dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir_ / "f" / "feedback_histogram.tsv"), 1 + 10);
  r = run("accommodate " + cfg() + " --splits " + at("s") + " --feedback " +
              at("f/feedback.csv") + " --model " + at("m/model.txt") + " --out " + at("a"),
          dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* s : {"retrain", "finetune_df", "finetune_sampled"}) {
    EXPECT_EQ(line_count(dir_ / "a" / ("predictions_" + std::string(s) + ".csv")), 1 + 800) << s;
  }
  EXPECT_EQ(run("detect " + cfg() + " --splits " + at("s") + " --out " + at("d"), dir_).code, 2);
}

TEST_F(Cli, SweepWithExternalScoresAndReport) {
  ASSERT_EQ(run("generate " + cfg() + " --out " + at("s"), dir_).code, 0);
  ASSERT_EQ(run("detect " + cfg() + " --splits " + at("s") + " --budget 1 --out " + at("d"), dir_)
                .code,
            0);
  auto r = run("sweep " + cfg() + " --splits " + at("s") + " --strategies retrain" +
                   " --external-scores " + at("d/scores.csv") + " --out " + at("o"),
               dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string results = read_file(dir_ / "o" / "results.csv");
  EXPECT_EQ(results.substr(0, results.find('\n')),
            "method,strategy,budget,segment,averaging,precision,recall,f1");
  int external_retrain = 0;
  std::ifstream in(dir_ / "o" / "results.csv");
  std::string line;
  while (std::getline(in, line)) external_retrain += line.rfind("external,retrain,", 0) == 0;
  EXPECT_EQ(external_retrain, 3 * 3 * 2);
  r = run("report --out " + at("o"), dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("auc_f1_overall"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "report" / "histogram__maxprob__200.tsv"));
}

TEST_F(Cli, InterruptedSweepResumesByteIdentical) {
  ASSERT_EQ(run("generate " + cfg() + " --out " + at("s"), dir_).code, 0);
  const std::string sweep = "sweep " + cfg() + " --splits " + at("s") + " --jobs 1 --out ";
  ASSERT_EQ(run(sweep + at("whole"), dir_).code, 0);
  auto r = run(sweep + at("part") + " --stop-after 4", dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("stopped early"), std::string::npos);
  ASSERT_EQ(run(sweep + at("part"), dir_).code, 0);
  for (const char* f : {"results.csv", "summary.json", "feedback_counts.csv", "per_class.csv",
                        "manifest.json"}) {
    EXPECT_EQ(sha256_file(dir_ / "whole" / f), sha256_file(dir_ / "part" / f)) << f;
  }
}

TEST_F(Cli, SweepWithoutSplitsGeneratesInMemory) {
  const auto r = run("sweep " + cfg() + " --strategies finetune_sampled --averaging macro --out " +
                         at("o"),
                     dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir_ / "o" / "results.csv"), 1 + 2 * 3 * 3);
  EXPECT_EQ(run("sweep " + cfg() + " --scorers nope --out " + at("o"), dir_).code, 2);
}

}  // namespace
}  // namespace noveval

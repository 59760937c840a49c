/*
 * Copyright 2026 The Actigate Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli/commands.h"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "actigate/activation_store.h"
#include "actigate/error.h"
#include "actigate/file_io.h"
#include "actigate/probe_model.h"
#include "actigate/synthetic_data.h"
#include "cli/cli_io.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace actigate::cli {
namespace {

using nlohmann::json;
using testing::TempDir;

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

json ReadJson(const std::filesystem::path& p) { return json::parse(ReadFile(p)); }

std::vector<ScoreRow> ParseScores(const std::string& text) {
  TempDir dir;
  WriteFileAtomic(dir / "scores.csv", text);
  return ReadScoreCsv(dir / "scores.csv");
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    tmp_ = new TempDir();
    store_ = (tmp_->path() / "store").string();
    ASSERT_EQ(RunCli({"generate", "--out", store_, "--n", "240", "--dim", "8", "--len-min", "4",
                      "--len-max", "10", "--seed", "3"}),
              kExitOk);
    ASSERT_EQ(RunCli({"train", "--store", store_, "--out", Dir("train"), "--hidden", "8",
                      "--epochs", "4", "--lr", "0.005", "--batch", "16"}),
              kExitOk);
  }
  static void TearDownTestSuite() {
    delete tmp_;
    tmp_ = nullptr;
  }
  static std::string Dir(const std::string& name) { return (tmp_->path() / name).string(); }
  static std::string Checkpoint() { return Dir("train") + "/probe.ckpt"; }

  static TempDir* tmp_;
  static std::string store_;
};

TempDir* CliTest::tmp_ = nullptr;
std::string CliTest::store_;

TEST_F(CliTest, GenerateWritesReadableStore) {
  const ActivationStore store = ActivationStore::Open(store_);
  EXPECT_EQ(store.size(), 240u);
  const json run = ReadJson(std::filesystem::path(store_) / "run.json");
  EXPECT_EQ(run["subcommand"], "generate");
  EXPECT_EQ(run["config"]["n"], 240);
  for (const char* key : {"seed", "inputs", "outputs", "tool_version", "started_at", "finished_at"}) {
    EXPECT_TRUE(run.contains(key)) << key;
  }
}

TEST_F(CliTest, GenerateIsReproducible) {
  const std::string other = Dir("store2");
  ASSERT_EQ(RunCli({"generate", "--out", other, "--n", "240", "--dim", "8", "--len-min", "4",
                    "--len-max", "10", "--seed", "3"}),
            kExitOk);
  EXPECT_EQ(ReadFile(std::filesystem::path(other) / "activations.bin"),
            ReadFile(std::filesystem::path(store_) / "activations.bin"));
  EXPECT_EQ(ReadFile(std::filesystem::path(other) / "manifest.jsonl"),
            ReadFile(std::filesystem::path(store_) / "manifest.jsonl"));
  // Regenerating over an existing store replaces it.
  ASSERT_EQ(RunCli({"generate", "--out", other, "--n", "20", "--dim", "8"}), kExitOk);
  EXPECT_EQ(ActivationStore::Open(other).size(), 20u);
}

TEST_F(CliTest, TrainWritesContractFiles) {
  const std::filesystem::path out = Dir("train");
  for (const char* f : {"probe.ckpt", "history.csv", "summary.json", "run.json"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  const ProbeParams p = LoadCheckpoint(out / "probe.ckpt");
  EXPECT_EQ(p.input_dim(), 8);
  EXPECT_EQ(p.hidden_dim(), 8);
  const auto history = Lines(ReadFile(out / "history.csv"));
  EXPECT_EQ(history.front(), "epoch,loss,ce,huber,val_auroc,cal_gap");
  const json summary = ReadJson(out / "summary.json");
  for (const char* key : {"config", "seed", "n_records", "best_epoch", "best_val_auroc",
                          "data_order_fingerprint", "epochs_completed"}) {
    EXPECT_TRUE(summary.contains(key)) << key;
  }
  EXPECT_EQ(history.size(), 1 + summary["epochs_completed"].get<std::size_t>());
}

TEST_F(CliTest, LambdaChangesWeightsNotDataOrder) {
  const std::vector<std::string> common = {"--store", store_, "--hidden", "8", "--epochs", "2",
                                           "--patience", "5"};
  auto with = [&](const std::string& out, const std::string& lambda) {
    std::vector<std::string> args = {"train", "--out", Dir(out), "--lambda", lambda};
    args.insert(args.end(), common.begin(), common.end());
    return RunCli(args);
  };
  ASSERT_EQ(with("l0", "0"), kExitOk);
  ASSERT_EQ(with("l5", "0.5"), kExitOk);
  EXPECT_NE(ReadFile(Dir("l0") + "/probe.ckpt"), ReadFile(Dir("l5") + "/probe.ckpt"));
  EXPECT_EQ(ReadJson(Dir("l0") + "/summary.json")["data_order_fingerprint"],
            ReadJson(Dir("l5") + "/summary.json")["data_order_fingerprint"]);
  // Same flags twice give the same checkpoint bytes.
  ASSERT_EQ(with("l0b", "0"), kExitOk);
  EXPECT_EQ(ReadFile(Dir("l0") + "/probe.ckpt"), ReadFile(Dir("l0b") + "/probe.ckpt"));
}

TEST_F(CliTest, MissingStoreIsIoError) {
  const std::string missing = Dir("no-such-store");
  ::testing::internal::CaptureStderr();
  const int code = RunCli({"train", "--store", missing, "--out", Dir("never")});
  const std::string err = ::testing::internal::GetCapturedStderr();
  EXPECT_EQ(code, kExitIo);
  EXPECT_NE(err.find(missing), std::string::npos) << err;
  EXPECT_FALSE(std::filesystem::exists(Dir("never") + "/run.json"));
}

TEST_F(CliTest, BadFlagsAreUsageErrors) {
  ::testing::internal::CaptureStderr();
  ::testing::internal::CaptureStdout();
  EXPECT_EQ(RunCli({"train", "--store"}), kExitUsage);
  EXPECT_EQ(RunCli({"frobnicate"}), kExitUsage);
  EXPECT_EQ(RunCli({"score", "--store", store_, "--out", Dir("x"), "--scorer", "magic"}), kExitUsage);
  ::testing::internal::GetCapturedStdout();
  ::testing::internal::GetCapturedStderr();
}

TEST_F(CliTest, InvalidConfigIsValidationError) {
  ::testing::internal::CaptureStderr();
  EXPECT_EQ(RunCli({"train", "--store", store_, "--out", Dir("bad"), "--delta", "0"}),
            kExitValidation);
  EXPECT_EQ(RunCli({"score", "--store", store_, "--out", Dir("bad")}), kExitValidation);
  ::testing::internal::GetCapturedStderr();
}

TEST_F(CliTest, ProbeScoresAreProbabilitiesAndStable) {
  ASSERT_EQ(RunCli({"score", "--store", store_, "--checkpoint", Checkpoint(), "--out", Dir("s1")}),
            kExitOk);
  ASSERT_EQ(RunCli({"score", "--store", store_, "--checkpoint", Checkpoint(), "--out", Dir("s2")}),
            kExitOk);
  const std::string csv = ReadFile(Dir("s1") + "/scores.csv");
  EXPECT_EQ(csv, ReadFile(Dir("s2") + "/scores.csv"));
  const auto rows = ParseScores(csv);
  ASSERT_EQ(rows.size(), 240u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ASSERT_TRUE(rows[i].score.has_value());
    EXPECT_GT(*rows[i].score, 0.0);
    EXPECT_LT(*rows[i].score, 1.0);
    if (i > 0) EXPECT_LT(rows[i - 1].id, rows[i].id);
  }
}

TEST_F(CliTest, LengthNormalizedScorerFlagsMissingLogProbs) {
  TempDir dir;
  std::mt19937_64 rng(4);
  {
    ActivationStore store = ActivationStore::Create(dir.path());
    for (int i = 0; i < 6; ++i) {
      ActivationRecord r = testing::RandomRecord("r" + std::to_string(i), rng);
      r.label = i % 2;
      if (i < 2) {
        r.token_logprobs.reset();
      } else {
        r.token_logprobs = std::vector<double>(static_cast<std::size_t>(r.answer_len), -0.1 * i);
      }
      store.Write(r);
    }
  }
  ::testing::internal::CaptureStderr();
  ASSERT_EQ(RunCli({"score", "--store", dir.path().string(), "--scorer", "lognorm", "--out",
                    (dir / "out").string()}),
            kExitOk);
  ::testing::internal::GetCapturedStderr();
  const auto rows = ReadScoreCsv(dir / "out" / "scores.csv");
  EXPECT_FALSE(rows[0].score.has_value());
  EXPECT_FALSE(rows[1].score.has_value());
  EXPECT_NEAR(*rows[2].score, std::exp(-0.2), 1e-15);
  const json run = ReadJson(dir / "out" / "run.json");
  EXPECT_EQ(run["flagged_ids"], json({"r0", "r1"}));

  ASSERT_EQ(RunCli({"eval", "--scores", (dir / "out" / "scores.csv").string(), "--store",
                    dir.path().string(), "--out", (dir / "eval").string()}),
            kExitOk);
  EXPECT_EQ(ReadJson(dir / "eval" / "auroc.json")["n_flagged"], 2);
  EXPECT_EQ(ReadJson(dir / "eval" / "auroc.json")["n"], 4);
}

TEST_F(CliTest, EvalSweepShape) {
  ASSERT_EQ(RunCli({"score", "--store", store_, "--checkpoint", Checkpoint(), "--out", Dir("se")}),
            kExitOk);
  ASSERT_EQ(RunCli({"eval", "--scores", Dir("se") + "/scores.csv", "--store", store_, "--name",
                    "probe", "--out", Dir("ev")}),
            kExitOk);
  const auto sweep = Lines(ReadFile(Dir("ev") + "/sweep.csv"));
  ASSERT_EQ(sweep.size(), 11u);
  EXPECT_EQ(sweep[0], "threshold,P,R,rouge_display,rouge_mask,mask_pct");
  EXPECT_EQ(sweep[1].substr(0, 2), "0,");
  const json auroc = ReadJson(Dir("ev") + "/auroc.json");
  EXPECT_EQ(auroc["scorer"], "probe");
  EXPECT_GE(auroc["auroc"].get<double>(), 0.0);
  EXPECT_LE(auroc["auroc"].get<double>(), 1.0);
  EXPECT_EQ(ReadJson(Dir("ev") + "/sweep.json")["rows"].size(), 10u);
}

TEST_F(CliTest, OracleScoresGivePerfectPrecision) {
  const ActivationStore store = ActivationStore::Open(store_);
  std::vector<ScoreRow> rows;
  for (const auto& e : store.entries()) rows.push_back({e.id, static_cast<double>(e.label), e.label});
  const std::string scores = Dir("oracle.csv");
  WriteFileAtomic(scores, ScoresToCsv(rows));
  ASSERT_EQ(RunCli({"eval", "--scores", scores, "--store", store_, "--out", Dir("oracle")}), kExitOk);
  const auto sweep = Lines(ReadFile(Dir("oracle") + "/sweep.csv"));
  for (std::size_t i = 2; i < sweep.size(); ++i) {
    EXPECT_EQ(sweep[i].substr(sweep[i].find(',') + 1, 4), "1,1,") << sweep[i];
  }
  EXPECT_EQ(ReadJson(Dir("oracle") + "/auroc.json")["auroc"], 1.0);
}

TEST_F(CliTest, EvalRejectsLabelMismatch) {
  const ActivationStore store = ActivationStore::Open(store_);
  std::vector<ScoreRow> rows;
  for (const auto& e : store.entries()) rows.push_back({e.id, 0.5, 1 - e.label});
  WriteFileAtomic(Dir("flipped.csv"), ScoresToCsv(rows));
  ::testing::internal::CaptureStderr();
  EXPECT_EQ(RunCli({"eval", "--scores", Dir("flipped.csv"), "--store", store_, "--out", Dir("flip")}),
            kExitValidation);
  ::testing::internal::GetCapturedStderr();
}

TEST_F(CliTest, GateWritesDecisions) {
  const std::vector<ScoreRow> rows = {{"a", 0.9, 1}, {"b", 0.2, 0}, {"c", std::nullopt, 1}, {"d", 0.5, 0}};
  WriteFileAtomic(Dir("gate.csv"), ScoresToCsv(rows));
  ASSERT_EQ(RunCli({"gate", "--scores", Dir("gate.csv"), "--threshold", "0.5", "--out", Dir("gate")}),
            kExitOk);
  const auto lines = Lines(ReadFile(Dir("gate") + "/decisions.csv"));
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "id,score,label,decision");
  EXPECT_EQ(lines[1].substr(lines[1].rfind(',') + 1), "display");
  EXPECT_EQ(lines[2].substr(lines[2].rfind(',') + 1), "mask");
  EXPECT_EQ(lines[3].substr(lines[3].rfind(',') + 1), "unscored");
  EXPECT_EQ(lines[4].substr(lines[4].rfind(',') + 1), "display");
  ::testing::internal::CaptureStderr();
  EXPECT_EQ(RunCli({"gate", "--scores", Dir("gate.csv"), "--threshold", "1.5", "--out", Dir("g2")}),
            kExitValidation);
  ::testing::internal::GetCapturedStderr();
}

TEST_F(CliTest, BenchReportsEveryGroup) {
  ::testing::internal::CaptureStdout();
  const int code = RunCli({"bench", "--checkpoint", Checkpoint(), "--store", store_, "--repeats",
                           "3", "--out", Dir("bench")});
  const std::string out = ::testing::internal::GetCapturedStdout();
  ASSERT_EQ(code, kExitOk);
  const auto csv = Lines(ReadFile(Dir("bench") + "/bench.csv"));
  EXPECT_EQ(csv[0], "layer,context,n_records,mean_rows,avg_ms,p99_ms");
  EXPECT_EQ(csv.size(), 5u);  // one layer, four context sizes
  const json j = ReadJson(Dir("bench") + "/bench.json");
  EXPECT_EQ(j["repeats"], 3);
  std::size_t total = 0;
  for (const auto& g : j["groups"]) {
    total += g["n_records"].get<std::size_t>();
    EXPECT_GE(g["p99_ms"].get<double>(), 0.0);
  }
  EXPECT_EQ(total, 240u);
  EXPECT_FALSE(out.empty());
}

TEST_F(CliTest, BenchRejectsTooFewRepeats) {
  ::testing::internal::CaptureStderr();
  ::testing::internal::CaptureStdout();
  EXPECT_EQ(RunCli({"bench", "--checkpoint", Checkpoint(), "--store", store_, "--repeats", "2",
                    "--out", Dir("bench2")}),
            kExitUsage);
  ::testing::internal::GetCapturedStdout();
  ::testing::internal::GetCapturedStderr();
}

TEST(CsvIo, QuotingRoundTrip) {
  EXPECT_EQ(CsvField("plain"), "plain");
  EXPECT_EQ(CsvField("a,b"), "\"a,b\"");
  EXPECT_EQ(CsvField("say \"hi\""), "\"say \"\"hi\"\"\"");
  const std::vector<ScoreRow> rows = {{"x,1", 0.25, 1}, {"y\"2", std::nullopt, 0}};
  const auto back = ParseScores(ScoresToCsv(rows));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id, "x,1");
  EXPECT_EQ(*back[0].score, 0.25);
  EXPECT_EQ(back[1].id, "y\"2");
  EXPECT_FALSE(back[1].score.has_value());
  EXPECT_THROW(ParseScores("id,score\n"), ValidationError);
  EXPECT_THROW(ParseScores("id,score,label\na,0.5,3\n"), ValidationError);
  EXPECT_THROW(ParseScores("id,score,label\na,zz,1\n"), ValidationError);
}

}  // namespace
}  // namespace actigate::cli

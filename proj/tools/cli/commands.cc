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

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "actigate/activation_store.h"
#include "actigate/error.h"
#include "actigate/evaluation.h"
#include "actigate/file_io.h"
#include "actigate/probe_model.h"
#include "actigate/scorer.h"
#include "actigate/synthetic_data.h"
#include "actigate/training.h"
#include "cli/bench.h"
#include "cli/cli_io.h"
#include "json.hpp"

namespace actigate::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = ACTIGATE_VERSION;

void InitLogging() {
  static const bool initialized = [] {
    auto logger = spdlog::stderr_logger_st("actigate");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("ACTIGATE_LOG")) {
      level = spdlog::level::from_str(env);
    }
    spdlog::set_level(level);
    return true;
  }();
  (void)initialized;
}

struct GenerateOptions {
  std::string out;
  SyntheticConfig config;
  std::string contexts = "1,3,5,7";
};

struct TrainOptions {
  std::string store;
  std::string out;
  std::optional<int> layer;
  TrainingConfig config;
};

struct ScoreOptions {
  std::string store;
  std::string checkpoint;
  std::string scorer = "probe";
  std::string out;
  std::optional<int> layer;
};

struct GateOptions {
  std::string scores;
  double threshold = 0.5;
  std::string out;
};

struct EvalOptions {
  std::string scores;
  std::string store;
  std::string thresholds = "0.1:0.9:0.1";
  std::string name = "scores";
  std::string out;
};

struct BenchOptions {
  std::string checkpoint;
  std::string store;
  int repeats = kMinBenchRepeats;
  std::optional<int> layer;
  std::string out;
};

// Collects output files in memory and writes them only once the command has
// finished, each through an atomic rename.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {}

  void Add(const std::string& name, std::string contents) {
    files_.emplace_back(name, std::move(contents));
  }

  json Names() const {
    json names = json::array();
    for (const auto& f : files_) names.push_back((dir_ / f.first).string());
    return names;
  }

  void Commit() const {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw StorageError("cannot create output directory " + dir_.string());
    for (const auto& [name, contents] : files_) WriteFileAtomic(dir_ / name, contents);
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

json RunManifest(const std::string& subcommand, json config, std::optional<std::uint64_t> seed,
                 json inputs, json outputs, const std::string& started) {
  json j;
  j["subcommand"] = subcommand;
  j["config"] = std::move(config);
  j["seed"] = seed ? json(*seed) : json();
  j["inputs"] = std::move(inputs);
  j["outputs"] = std::move(outputs);
  j["tool_version"] = kVersion;
  j["started_at"] = started;
  j["finished_at"] = UtcTimestamp();
  return j;
}

json TrainingConfigJson(const TrainingConfig& c) {
  return {{"delta", c.delta},
          {"lambda", c.lambda},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"hidden_dim", c.hidden_dim},
          {"init_scale", c.init_scale},
          {"clip_norm", c.clip_norm},
          {"validation_fraction", c.validation_fraction},
          {"patience", c.patience}};
}

std::vector<int> ParseIntList(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(piece, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != piece.size()) {
      throw ValidationError("bad integer list '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<ActivationRecord> LoadRecords(const ActivationStore& store,
                                          std::optional<int> layer) {
  std::vector<ActivationRecord> records;
  for (const auto& id : store.SortedIds()) {
    ActivationRecord r = store.Read(id);
    if (layer && r.layer != *layer) continue;
    records.push_back(std::move(r));
  }
  if (records.empty()) {
    throw ValidationError("no records in " + store.dir().string() +
                          (layer ? " for layer " + std::to_string(*layer) : ""));
  }
  return records;
}

int RunGenerate(const GenerateOptions& opts) {
  const std::string started = UtcTimestamp();
  SyntheticConfig config = opts.config;
  config.context_doc_counts = ParseIntList(opts.contexts);
  config.Validate();

  const fs::path out(opts.out);
  if (fs::exists(out) && !fs::is_empty(out) &&
      !fs::exists(out / ActivationStore::kManifestName)) {
    throw StorageError("refusing to replace non-store directory " + out.string());
  }
  fs::path staging = out;
  staging += ".staging";
  std::error_code ec;
  fs::remove_all(staging, ec);
  WriteSyntheticStore(config, staging);
  const json manifest =
      RunManifest("generate", json::parse(config.ToJson()), config.seed, json::object(),
                  json::array({out.string()}), started);
  WriteFileAtomic(staging / "run.json", manifest.dump(2) + "\n");
  fs::remove_all(out, ec);
  fs::rename(staging, out, ec);
  if (ec) throw StorageError("cannot move generated store into " + out.string());
  spdlog::info("wrote {} records to {}", config.n, out.string());
  return kExitOk;
}

int RunTrain(const TrainOptions& opts) {
  const std::string started = UtcTimestamp();
  opts.config.Validate();
  const ActivationStore store = ActivationStore::Open(opts.store);
  const auto records = LoadRecords(store, opts.layer);
  std::vector<Example> examples;
  examples.reserve(records.size());
  for (const auto& r : records) examples.push_back({r.activations, r.label});

  const TrainResult result = Train(examples, opts.config, [](const EpochStats& e) {
    spdlog::info("epoch {} loss {:.6f} ce {:.6f} huber {:.6f} val_auroc {:.4f} cal_gap {:.4f}",
                 e.epoch, e.loss, e.cross_entropy, e.huber, e.val_auroc, e.calibration_gap);
  });

  char fingerprint[32];
  std::snprintf(fingerprint, sizeof(fingerprint), "%016llx",
                static_cast<unsigned long long>(result.history.order_fingerprint));
  const EpochStats& best = result.history.epochs[static_cast<std::size_t>(result.history.best_epoch - 1)];
  json summary{{"config", TrainingConfigJson(opts.config)},
               {"seed", opts.config.seed},
               {"layer", opts.layer ? json(*opts.layer) : json()},
               {"n_records", records.size()},
               {"input_dim", result.params.input_dim()},
               {"hidden_dim", result.params.hidden_dim()},
               {"train_size", result.history.train_size},
               {"validation_size", result.history.validation_size},
               {"epochs_completed", result.history.epochs.size()},
               {"best_epoch", result.history.best_epoch},
               {"best_val_auroc", std::isfinite(best.val_auroc) ? json(best.val_auroc) : json()},
               {"best_huber", best.huber},
               {"data_order_fingerprint", fingerprint}};

  OutputDir out(opts.out);
  out.Add("probe.ckpt", EncodeCheckpoint(result.params));
  out.Add("history.csv", HistoryToCsv(result.history));
  out.Add("summary.json", summary.dump(2) + "\n");
  json config = TrainingConfigJson(opts.config);
  config["layer"] = opts.layer ? json(*opts.layer) : json();
  out.Add("run.json",
          RunManifest("train", config, opts.config.seed, {{"store", opts.store}}, out.Names(),
                      started)
                  .dump(2) +
              "\n");
  out.Commit();
  return kExitOk;
}

int RunScore(const ScoreOptions& opts) {
  const std::string started = UtcTimestamp();
  Scorer scorer;
  if (opts.scorer == "probe") {
    if (opts.checkpoint.empty()) throw ValidationError("--checkpoint is required for the probe scorer");
    scorer = MakeProbeScorer(LoadCheckpoint(opts.checkpoint));
  } else {
    scorer = MakeLengthNormalizedScorer();
  }
  const ActivationStore store = ActivationStore::Open(opts.store);
  const auto records = LoadRecords(store, opts.layer);

  std::vector<ScoreRow> rows;
  json flagged = json::array();
  for (const auto& r : records) {
    ScoreRow row{r.id, scorer(r), r.label};
    if (!row.score) flagged.push_back(r.id);
    rows.push_back(std::move(row));
  }
  if (!flagged.empty()) {
    spdlog::warn("{} records could not be scored by {} (no token log-probs)", flagged.size(),
                 opts.scorer);
  }

  OutputDir out(opts.out);
  out.Add("scores.csv", ScoresToCsv(rows));
  json inputs{{"store", opts.store}};
  if (!opts.checkpoint.empty()) inputs["checkpoint"] = opts.checkpoint;
  json manifest = RunManifest(
      "score",
      {{"scorer", opts.scorer}, {"layer", opts.layer ? json(*opts.layer) : json()}},
      std::nullopt, inputs, out.Names(), started);
  manifest["flagged_ids"] = flagged;
  out.Add("run.json", manifest.dump(2) + "\n");
  out.Commit();
  return kExitOk;
}

int RunGate(const GateOptions& opts) {
  const std::string started = UtcTimestamp();
  const auto rows = ReadScoreCsv(opts.scores);
  std::string csv = "id,score,label,decision\n";
  std::size_t displayed = 0;
  std::size_t masked = 0;
  std::size_t unscored = 0;
  for (const auto& r : rows) {
    std::string decision = "unscored";
    if (r.score) {
      const GateDecision d = Gate(*r.score, opts.threshold);
      decision = d.action == GateAction::kDisplay ? "display" : "mask";
      (d.action == GateAction::kDisplay ? displayed : masked) += 1;
    } else {
      ++unscored;
    }
    csv += CsvField(r.id) + "," + (r.score ? FormatDouble(*r.score) : "NA") + "," +
           std::to_string(r.label) + "," + decision + "\n";
  }
  OutputDir out(opts.out);
  out.Add("decisions.csv", csv);
  json manifest = RunManifest("gate", {{"threshold", opts.threshold}}, std::nullopt,
                              {{"scores", opts.scores}}, out.Names(), started);
  manifest["counts"] = {{"display", displayed}, {"mask", masked}, {"unscored", unscored}};
  out.Add("run.json", manifest.dump(2) + "\n");
  out.Commit();
  return kExitOk;
}

int RunEval(const EvalOptions& opts) {
  const std::string started = UtcTimestamp();
  std::vector<double> thresholds = ParseThresholdGrid(opts.thresholds);
  if (std::find(thresholds.begin(), thresholds.end(), 0.0) == thresholds.end()) {
    thresholds.insert(thresholds.begin(), 0.0);
  }
  std::sort(thresholds.begin(), thresholds.end());

  const auto rows = ReadScoreCsv(opts.scores);
  const ActivationStore store = ActivationStore::Open(opts.store);
  std::vector<ScoredRecord> scored;
  std::vector<double> scores;
  std::vector<int> labels;
  std::map<std::string, const ManifestEntry*, std::less<>> by_id;
  for (const auto& e : store.entries()) by_id.emplace(e.id, &e);
  std::size_t flagged = 0;
  for (const auto& row : rows) {
    if (!row.score) {
      ++flagged;
      continue;
    }
    auto it = by_id.find(row.id);
    if (it == by_id.end()) throw ValidationError("score row for unknown id " + row.id);
    if (it->second->label != row.label) {
      throw ValidationError("label of " + row.id + " disagrees with the store");
    }
    scored.push_back({*row.score, row.label, it->second->answer, it->second->reference_answer});
    scores.push_back(*row.score);
    labels.push_back(row.label);
  }
  const auto sweep = Sweep(scored, thresholds);
  const double auroc = Auroc(scores, labels);
  const auto n_pos = std::count(labels.begin(), labels.end(), 1);
  json auroc_json{{"scorer", opts.name},
                  {"auroc", auroc},
                  {"calibration_gap", CalibrationGap(scores, labels)},
                  {"n", scores.size()},
                  {"n_positive", n_pos},
                  {"n_negative", static_cast<long>(labels.size()) - n_pos},
                  {"n_flagged", flagged}};

  OutputDir out(opts.out);
  out.Add("sweep.csv", SweepToCsv(sweep));
  out.Add("sweep.json", SweepToJson(sweep));
  out.Add("auroc.json", auroc_json.dump(2) + "\n");
  out.Add("run.json", RunManifest("eval", {{"thresholds", thresholds}, {"name", opts.name}},
                                  std::nullopt, {{"scores", opts.scores}, {"store", opts.store}},
                                  out.Names(), started)
                              .dump(2) +
                          "\n");
  out.Commit();
  return kExitOk;
}

int RunBenchCommand(const BenchOptions& opts) {
  const std::string started = UtcTimestamp();
  const ProbeParams params = LoadCheckpoint(opts.checkpoint);
  const ActivationStore store = ActivationStore::Open(opts.store);
  const auto records = LoadRecords(store, opts.layer);
  const auto groups = RunBench(params, records, opts.repeats);

  OutputDir out(opts.out);
  out.Add("bench.csv", BenchToCsv(groups));
  out.Add("bench.json", BenchToJson(groups, opts.repeats));
  out.Add("run.json",
          RunManifest("bench",
                      {{"repeats", opts.repeats}, {"layer", opts.layer ? json(*opts.layer) : json()}},
                      std::nullopt, {{"checkpoint", opts.checkpoint}, {"store", opts.store}},
                      out.Names(), started)
                  .dump(2) +
              "\n");
  out.Commit();
  for (const auto& g : groups) {
    std::printf("layer %d context %d: avg %.3f ms  p99 %.3f ms  (%zu samples)\n", g.layer,
                g.context_doc_count, g.avg_ms, g.p99_ms, g.samples);
  }
  return kExitOk;
}

}  // namespace

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const StorageError*>(&e) != nullptr) return kExitIo;
  if (dynamic_cast<const fs::filesystem_error*>(&e) != nullptr) return kExitIo;
  if (dynamic_cast<const Error*>(&e) != nullptr) return kExitValidation;
  return kExitIo;
}

int RunCli(const std::vector<std::string>& args) {
  InitLogging();
  CLI::App app{"actigate: activation-probe confidence scoring and answer gating", "actigate"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic activation store");
  generate->add_option("--out", gen.out, "Store directory")->required();
  generate->add_option("--n", gen.config.n, "Number of records");
  generate->add_option("--dim", gen.config.dim, "Activation width");
  generate->add_option("--len-min", gen.config.min_answer_len, "Shortest answer (tokens)");
  generate->add_option("--len-max", gen.config.max_answer_len, "Longest answer (tokens)");
  generate->add_option("--mu", gen.config.signal, "Planted signal strength");
  generate->add_option("--rho", gen.config.autocorrelation, "AR(1) noise autocorrelation");
  generate->add_option("--pos-frac", gen.config.positive_fraction, "Fraction of correct answers");
  generate->add_option("--logprob-corr", gen.config.logprob_correlation,
                       "Correlation of the log-prob latent with the label");
  generate->add_option("--seed", gen.config.seed, "Record seed");
  generate->add_option("--direction-seed", gen.config.direction_seed, "Signal direction seed");
  generate->add_option("--layer", gen.config.layer, "Layer tag written to every record");
  generate->add_option("--contexts", gen.contexts, "Comma-separated context sizes");
  generate->add_option("--id-prefix", gen.config.id_prefix, "Record id prefix");

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train the probe on a store");
  train->add_option("--store", tr.store, "Store directory")->required();
  train->add_option("--out", tr.out, "Output directory")->required();
  train->add_option("--layer", tr.layer, "Only use records from this layer");
  train->add_option("--delta", tr.config.delta, "Huber transition point");
  train->add_option("--lambda", tr.config.lambda, "Regularizer weight");
  train->add_option("--lr", tr.config.learning_rate, "Learning rate");
  train->add_option("--batch", tr.config.batch_size, "Mini-batch size");
  train->add_option("--epochs", tr.config.epochs, "Maximum epochs");
  train->add_option("--seed", tr.config.seed, "Seed for init and shuffling");
  train->add_option("--hidden", tr.config.hidden_dim, "LSTM hidden size");
  train->add_option("--clip", tr.config.clip_norm, "Global gradient norm clip");
  train->add_option("--val-frac", tr.config.validation_fraction, "Validation fraction");
  train->add_option("--patience", tr.config.patience, "Early stopping patience");

  ScoreOptions sc;
  auto* score = app.add_subcommand("score", "Score every record of a store");
  score->add_option("--store", sc.store, "Store directory")->required();
  score->add_option("--checkpoint", sc.checkpoint, "Probe checkpoint");
  score->add_option("--scorer", sc.scorer, "probe or lognorm")
      ->check(CLI::IsMember({"probe", "lognorm"}));
  score->add_option("--layer", sc.layer, "Only score records from this layer");
  score->add_option("--out", sc.out, "Output directory")->required();

  GateOptions gt;
  auto* gate = app.add_subcommand("gate", "Display or mask each scored answer");
  gate->add_option("--scores", gt.scores, "Score CSV")->required();
  gate->add_option("--threshold", gt.threshold, "Display iff score >= threshold");
  gate->add_option("--out", gt.out, "Output directory")->required();

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "Threshold sweep and AUROC");
  eval->add_option("--scores", ev.scores, "Score CSV")->required();
  eval->add_option("--store", ev.store, "Store the scores refer to")->required();
  eval->add_option("--thresholds", ev.thresholds, "start:stop:step (0 is always added)");
  eval->add_option("--name", ev.name, "Scorer name in auroc.json");
  eval->add_option("--out", ev.out, "Output directory")->required();

  BenchOptions bn;
  auto* bench = app.add_subcommand("bench", "Probe scoring latency per (layer, context)");
  bench->add_option("--checkpoint", bn.checkpoint, "Probe checkpoint")->required();
  bench->add_option("--store", bn.store, "Store directory")->required();
  bench->add_option("--repeats", bn.repeats, "Timed passes over the store")
      ->check(CLI::Range(kMinBenchRepeats, 1000000));
  bench->add_option("--layer", bn.layer, "Only time records from this layer");
  bench->add_option("--out", bn.out, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (app.get_subcommands().size() == 1) {
      std::cerr << app.get_subcommands().front()->help();
    }
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return RunGenerate(gen);
    if (train->parsed()) return RunTrain(tr);
    if (score->parsed()) return RunScore(sc);
    if (gate->parsed()) return RunGate(gt);
    if (eval->parsed()) return RunEval(ev);
    if (bench->parsed()) return RunBenchCommand(bn);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return ExitCodeFor(e);
  }
  return kExitUsage;
}

}  // namespace actigate::cli

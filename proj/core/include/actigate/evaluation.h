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

#ifndef ACTIGATE_EVALUATION_H_
#define ACTIGATE_EVALUATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace actigate {

enum class GateAction { kDisplay, kMask };

struct GateDecision {
  GateAction action = GateAction::kMask;
  double threshold = 0.0;
  double score = 0.0;
};

// Displays iff score >= threshold. Both must lie in [0, 1].
GateDecision Gate(double score, double threshold);

struct ScoredRecord {
  double score = 0.0;
  int label = 0;
  std::string answer;
  std::optional<std::string> reference;
};

struct SweepRow {
  double threshold = 0.0;
  // 1.0 when nothing is displayed; see `precision_undefined`.
  double precision = 1.0;
  double recall = 0.0;
  // Mean ROUGE-L F over the displayed / masked records that have a
  // reference; nullopt when there are none.
  std::optional<double> rouge_l_display;
  std::optional<double> rouge_l_mask;
  double mask_rate = 0.0;
  double display_rate = 0.0;
  std::size_t n_display = 0;
  std::size_t n_mask = 0;
  std::size_t n_correct_displayed = 0;
  bool precision_undefined = false;
};

// One row per threshold, in the given order. Recall is 1 when the set has no
// correct records (nothing can be missed).
std::vector<SweepRow> Sweep(std::span<const ScoredRecord> records,
                            std::span<const double> thresholds);

// Inclusive grid start, start + step, ..., stop computed from integer steps.
std::vector<double> ThresholdGrid(double start, double stop, double step);
// Parses "a:b:step".
std::vector<double> ParseThresholdGrid(std::string_view spec);

// Probability that a random positive outranks a random negative, ties
// counting one half, via average ranks. Throws ValidationError unless both
// classes are present.
double Auroc(std::span<const double> scores, std::span<const int> labels);

// Lowercased alphanumeric runs.
std::vector<std::string> RougeTokenize(std::string_view text);
std::size_t LcsLength(std::span<const std::string> a,
                      std::span<const std::string> b);

struct RougeL {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  std::size_t lcs = 0;
  bool empty_input = false;  // either side tokenized to nothing
};

RougeL RougeLScore(std::string_view candidate, std::string_view reference);

// |mean max-class probability - accuracy| where each score is the
// probability of class 1 and the prediction is score >= 0.5.
double CalibrationGap(std::span<const double> scores, std::span<const int> labels);

// threshold,P,R,rouge_display,rouge_mask,mask_pct
std::string SweepToCsv(std::span<const SweepRow> rows);
std::string SweepToJson(std::span<const SweepRow> rows);

}  // namespace actigate

#endif  // ACTIGATE_EVALUATION_H_

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

#include "actigate/evaluation.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "actigate/error.h"
#include "json.hpp"

namespace actigate {
namespace {

void CheckUnit(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw ValidationError(std::string(what) + " must lie in [0, 1], got " +
                          std::to_string(v));
  }
}

void CheckLabels(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
  }
}

std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

GateDecision Gate(double score, double threshold) {
  CheckUnit(score, "score");
  CheckUnit(threshold, "threshold");
  return {score >= threshold ? GateAction::kDisplay : GateAction::kMask, threshold, score};
}

std::vector<SweepRow> Sweep(std::span<const ScoredRecord> records,
                            std::span<const double> thresholds) {
  if (records.empty()) throw ValidationError("sweep: no records");
  std::vector<std::optional<double>> rouge(records.size());
  std::size_t n_correct = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ScoredRecord& r = records[i];
    CheckUnit(r.score, "score");
    if (r.label != 0 && r.label != 1) throw ValidationError("labels must be 0 or 1");
    n_correct += static_cast<std::size_t>(r.label);
    if (r.reference) rouge[i] = RougeLScore(r.answer, *r.reference).f;
  }

  std::vector<SweepRow> rows;
  rows.reserve(thresholds.size());
  const auto n = static_cast<double>(records.size());
  for (double tau : thresholds) {
    CheckUnit(tau, "threshold");
    SweepRow row;
    row.threshold = tau;
    double rouge_display = 0.0;
    double rouge_mask = 0.0;
    std::size_t n_rouge_display = 0;
    std::size_t n_rouge_mask = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const bool display = Gate(records[i].score, tau).action == GateAction::kDisplay;
      if (display) {
        ++row.n_display;
        row.n_correct_displayed += static_cast<std::size_t>(records[i].label);
        if (rouge[i]) {
          rouge_display += *rouge[i];
          ++n_rouge_display;
        }
      } else {
        ++row.n_mask;
        if (rouge[i]) {
          rouge_mask += *rouge[i];
          ++n_rouge_mask;
        }
      }
    }
    if (row.n_display == 0) {
      row.precision = 1.0;
      row.precision_undefined = true;
    } else {
      row.precision = static_cast<double>(row.n_correct_displayed) /
                      static_cast<double>(row.n_display);
    }
    row.recall = n_correct == 0 ? 1.0
                                : static_cast<double>(row.n_correct_displayed) /
                                      static_cast<double>(n_correct);
    row.mask_rate = static_cast<double>(row.n_mask) / n;
    row.display_rate = static_cast<double>(row.n_display) / n;
    if (n_rouge_display > 0) {
      row.rouge_l_display = rouge_display / static_cast<double>(n_rouge_display);
    }
    if (n_rouge_mask > 0) row.rouge_l_mask = rouge_mask / static_cast<double>(n_rouge_mask);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> ThresholdGrid(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) ||
      !(step > 0.0) || stop < start) {
    throw ValidationError("threshold grid needs finite start <= stop and step > 0");
  }
  if (start < 0.0 || stop > 1.0) throw ValidationError("thresholds must lie in [0, 1]");
  const double span = (stop - start) / step;
  const auto count = static_cast<long long>(std::floor(span + 1e-9));
  std::vector<double> grid;
  for (long long k = 0; k <= count; ++k) {
    const double v = start + static_cast<double>(k) * step;
    grid.push_back(std::round(v * 1e12) / 1e12);
  }
  return grid;
}

std::vector<double> ParseThresholdGrid(std::string_view spec) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t colon = spec.find(':', pos);
    const std::string piece(spec.substr(pos, colon == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : colon - pos));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(piece, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != piece.size()) {
      throw ValidationError("bad threshold grid '" + std::string(spec) +
                            "', expected start:stop:step");
    }
    parts.push_back(v);
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  if (parts.size() != 3) {
    throw ValidationError("bad threshold grid '" + std::string(spec) +
                          "', expected start:stop:step");
  }
  return ThresholdGrid(parts[0], parts[1], parts[2]);
}

double Auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DimensionError("auroc: length mismatch");
  CheckLabels(labels);
  for (double s : scores) {
    if (std::isnan(s)) throw ValidationError("auroc: NaN score");
  }
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw ValidationError("auroc needs both classes present");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) positive_rank_sum += avg_rank;
    }
    i = j;
  }
  const auto p = static_cast<double>(n_pos);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(n_neg));
}

std::vector<std::string> RougeTokenize(std::string_view text) {
  // Bytes >= 0x80 count as word characters so UTF-8 words stay whole.
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t LcsLength(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeL RougeLScore(std::string_view candidate, std::string_view reference) {
  const auto cand = RougeTokenize(candidate);
  const auto ref = RougeTokenize(reference);
  RougeL out;
  if (cand.empty() || ref.empty()) {
    out.empty_input = true;
    return out;
  }
  out.lcs = LcsLength(cand, ref);
  if (out.lcs == 0) return out;
  const auto lcs = static_cast<double>(out.lcs);
  out.precision = lcs / static_cast<double>(cand.size());
  out.recall = lcs / static_cast<double>(ref.size());
  // 2PR / (P + R) reduces to 2 LCS / (|cand| + |ref|).
  out.f = 2.0 * lcs / static_cast<double>(cand.size() + ref.size());
  return out;
}

double CalibrationGap(std::span<const double> scores, std::span<const int> labels) {
  if (scores.empty()) throw ValidationError("calibration gap: empty input");
  if (scores.size() != labels.size()) throw DimensionError("calibration gap: length mismatch");
  CheckLabels(labels);
  double conf = 0.0;
  double correct = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    CheckUnit(scores[i], "score");
    const int pred = scores[i] >= 0.5 ? 1 : 0;
    conf += std::max(scores[i], 1.0 - scores[i]);
    if (pred == labels[i]) correct += 1.0;
  }
  const auto n = static_cast<double>(scores.size());
  return std::abs(conf / n - correct / n);
}

std::string SweepToCsv(std::span<const SweepRow> rows) {
  std::string out = "threshold,P,R,rouge_display,rouge_mask,mask_pct\n";
  for (const SweepRow& r : rows) {
    out += FormatNumber(r.threshold) + "," + FormatNumber(r.precision) + "," +
           FormatNumber(r.recall) + "," +
           (r.rouge_l_display ? FormatNumber(*r.rouge_l_display) : "") + "," +
           (r.rouge_l_mask ? FormatNumber(*r.rouge_l_mask) : "") + "," +
           FormatNumber(100.0 * r.mask_rate) + "\n";
  }
  return out;
}

std::string SweepToJson(std::span<const SweepRow> rows) {
  using nlohmann::json;
  json table = json::array();
  json counts = json::array();
  for (const SweepRow& r : rows) {
    table.push_back({{"threshold", r.threshold},
                     {"P", r.precision},
                     {"R", r.recall},
                     {"rouge_display", r.rouge_l_display ? json(*r.rouge_l_display) : json()},
                     {"rouge_mask", r.rouge_l_mask ? json(*r.rouge_l_mask) : json()},
                     {"mask_pct", 100.0 * r.mask_rate}});
    counts.push_back({{"threshold", r.threshold},
                      {"n_display", r.n_display},
                      {"n_mask", r.n_mask},
                      {"n_correct_displayed", r.n_correct_displayed},
                      {"precision_undefined", r.precision_undefined}});
  }
  json doc{{"columns", {"threshold", "P", "R", "rouge_display", "rouge_mask", "mask_pct"}},
           {"rows", table},
           {"counts", counts}};
  return doc.dump(2) + "\n";
}

}  // namespace actigate

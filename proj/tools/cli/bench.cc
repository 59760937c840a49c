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

#include "cli/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <utility>

#include "actigate/error.h"
#include "cli/cli_io.h"
#include "json.hpp"

namespace actigate::cli {

std::vector<BenchGroup> RunBench(const ProbeParams& params,
                                 const std::vector<ActivationRecord>& records,
                                 int repeats) {
  if (repeats < kMinBenchRepeats) {
    throw ValidationError("bench needs at least " + std::to_string(kMinBenchRepeats) +
                          " repeats");
  }
  if (records.empty()) throw ValidationError("bench: no records");

  volatile double sink = 0.0;
  for (const auto& r : records) sink = sink + Confidence(Classify(r.activations, params));

  using Key = std::pair<int, int>;
  std::map<Key, std::vector<double>> samples;
  std::map<Key, std::pair<std::size_t, double>> sizes;  // records, total rows
  for (const auto& r : records) {
    auto& s = sizes[{r.layer, r.context_doc_count}];
    s.first += 1;
    s.second += static_cast<double>(r.activations.rows());
  }
  for (int rep = 0; rep < repeats; ++rep) {
    for (const auto& r : records) {
      const auto start = std::chrono::steady_clock::now();
      sink = sink + Confidence(Classify(r.activations, params));
      const auto stop = std::chrono::steady_clock::now();
      samples[{r.layer, r.context_doc_count}].push_back(
          std::chrono::duration<double, std::milli>(stop - start).count());
    }
  }

  std::vector<BenchGroup> groups;
  for (auto& [key, times] : samples) {
    BenchGroup g;
    g.layer = key.first;
    g.context_doc_count = key.second;
    g.n_records = sizes[key].first;
    g.mean_rows = sizes[key].second / static_cast<double>(g.n_records);
    g.samples = times.size();
    double total = 0.0;
    for (double t : times) total += t;
    g.avg_ms = total / static_cast<double>(times.size());
    std::sort(times.begin(), times.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.99 * static_cast<double>(times.size())));
    g.p99_ms = times[std::max<std::size_t>(rank, 1) - 1];
    groups.push_back(g);
  }
  return groups;
}

std::string BenchToCsv(const std::vector<BenchGroup>& groups) {
  std::string out = "layer,context,n_records,mean_rows,avg_ms,p99_ms\n";
  for (const auto& g : groups) {
    out += std::to_string(g.layer) + "," + std::to_string(g.context_doc_count) + "," +
           std::to_string(g.n_records) + "," + FormatDouble(g.mean_rows) + "," +
           FormatDouble(g.avg_ms) + "," + FormatDouble(g.p99_ms) + "\n";
  }
  return out;
}

std::string BenchToJson(const std::vector<BenchGroup>& groups, int repeats) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& g : groups) {
    rows.push_back({{"layer", g.layer},
                    {"context", g.context_doc_count},
                    {"n_records", g.n_records},
                    {"mean_rows", g.mean_rows},
                    {"avg_ms", g.avg_ms},
                    {"p99_ms", g.p99_ms},
                    {"samples", g.samples}});
  }
  return nlohmann::json{{"repeats", repeats}, {"groups", rows}}.dump(2) + "\n";
}

}  // namespace actigate::cli

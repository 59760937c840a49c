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

#ifndef ACTIGATE_TOOLS_CLI_BENCH_H_
#define ACTIGATE_TOOLS_CLI_BENCH_H_

#include <string>
#include <vector>

#include "actigate/activation_store.h"
#include "actigate/probe_model.h"

namespace actigate::cli {

inline constexpr int kMinBenchRepeats = 3;

// Latency of the probe scoring pass for one (layer, context size) bucket.
struct BenchGroup {
  int layer = 0;
  int context_doc_count = 0;
  std::size_t n_records = 0;
  double mean_rows = 0.0;
  double avg_ms = 0.0;
  double p99_ms = 0.0;  // nearest-rank over repeats x records samples
  std::size_t samples = 0;
};

// Scores every record once as warmup (not timed), then `repeats` timed passes
// over all records on the calling thread. Groups are ordered by layer, then
// context size. Throws ValidationError if repeats < kMinBenchRepeats.
std::vector<BenchGroup> RunBench(const ProbeParams& params,
                                 const std::vector<ActivationRecord>& records,
                                 int repeats);

std::string BenchToCsv(const std::vector<BenchGroup>& groups);
std::string BenchToJson(const std::vector<BenchGroup>& groups, int repeats);

}  // namespace actigate::cli

#endif  // ACTIGATE_TOOLS_CLI_BENCH_H_

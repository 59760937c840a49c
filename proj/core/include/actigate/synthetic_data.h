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

#ifndef ACTIGATE_SYNTHETIC_DATA_H_
#define ACTIGATE_SYNTHETIC_DATA_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "actigate/activation_store.h"

namespace actigate {

// Generator for activation datasets with a planted correctness signal.
//
// Each record draws y ~ Bernoulli(positive_fraction) and an answer length L
// uniform in [min_answer_len, max_answer_len]. The L + 1 rows follow a
// unit-variance AR(1) process, and a random contiguous sub-span covering 30%
// to 60% of the rows is shifted by (2y - 1) * signal along a unit direction.
// The direction depends only on `direction_seed`, so datasets drawn with
// different `seed`s share it. Token log-probs carry a weaker signal: the
// latent quality driving them has correlation `logprob_correlation` with y.
// Answers copy the reference with fewer substitutions when y = 1.
struct SyntheticConfig {
  int n = 1000;
  int dim = 64;
  int min_answer_len = 8;
  int max_answer_len = 24;
  double signal = 2.0;
  double autocorrelation = 0.5;
  double positive_fraction = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t direction_seed = 0;
  int layer = 16;
  std::vector<int> context_doc_counts = {1, 3, 5, 7};
  double logprob_correlation = 0.4;
  std::string id_prefix = "syn";

  void Validate() const;
  std::string ToJson() const;
};

std::vector<ActivationRecord> GenerateSynthetic(const SyntheticConfig& config);

// Unit direction the signal is planted along.
std::vector<double> SignalDirection(int dim, std::uint64_t direction_seed);

// Writes a fresh store at `dir`: config as the header line, then every record.
void WriteSyntheticStore(const SyntheticConfig& config,
                         const std::filesystem::path& dir);

}  // namespace actigate

#endif  // ACTIGATE_SYNTHETIC_DATA_H_

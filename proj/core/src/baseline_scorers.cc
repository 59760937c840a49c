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

#include "actigate/baseline_scorers.h"

#include <cmath>

#include "actigate/error.h"

namespace actigate {
namespace {

void CheckLogProbs(std::span<const double> lp) {
  if (lp.empty()) throw ValidationError("token log-probs: empty sequence");
  for (double v : lp) {
    if (!std::isfinite(v) || v > 0.0) {
      throw ValidationError("token log-probs must be finite and <= 0");
    }
  }
}

}  // namespace

double SequenceLogProb(std::span<const double> token_logprobs) {
  CheckLogProbs(token_logprobs);
  double sum = 0.0;
  for (double v : token_logprobs) sum += v;
  return sum;
}

double LengthNormalizedScore(std::span<const double> token_logprobs) {
  const double total = SequenceLogProb(token_logprobs);
  return std::exp(total / static_cast<double>(token_logprobs.size()));
}

}  // namespace actigate

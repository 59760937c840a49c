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

#ifndef ACTIGATE_BASELINE_SCORERS_H_
#define ACTIGATE_BASELINE_SCORERS_H_

#include <span>

namespace actigate {

// Token log-probabilities must be nonempty, finite and <= 0; both functions
// throw ValidationError otherwise.

// log P(s | x): the sum of token log-probabilities.
double SequenceLogProb(std::span<const double> token_logprobs);

// Geometric mean of token probabilities, exp(mean log-prob), in (0, 1].
double LengthNormalizedScore(std::span<const double> token_logprobs);

}  // namespace actigate

#endif  // ACTIGATE_BASELINE_SCORERS_H_

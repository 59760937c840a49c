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

#include "actigate/scorer.h"

#include "actigate/baseline_scorers.h"

namespace actigate {

Scorer MakeProbeScorer(ProbeParams params) {
  return [params = std::move(params)](const ActivationRecord& r) -> std::optional<double> {
    return Confidence(Classify(r.activations, params));
  };
}

Scorer MakeLengthNormalizedScorer() {
  return [](const ActivationRecord& r) -> std::optional<double> {
    if (!r.token_logprobs || r.token_logprobs->empty()) return std::nullopt;
    return LengthNormalizedScore(*r.token_logprobs);
  };
}

}  // namespace actigate

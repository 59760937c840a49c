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

#ifndef ACTIGATE_SCORER_H_
#define ACTIGATE_SCORER_H_

#include <functional>
#include <optional>

#include "actigate/activation_store.h"
#include "actigate/probe_model.h"

namespace actigate {

// Maps a record to a confidence-like score, or nullopt when the record lacks
// what the scorer needs.
using Scorer = std::function<std::optional<double>(const ActivationRecord&)>;

// softmax(z)_1 of the probe. Throws DimensionError on a width mismatch.
Scorer MakeProbeScorer(ProbeParams params);
// Length-normalized token probability; nullopt without token_logprobs.
Scorer MakeLengthNormalizedScorer();

}  // namespace actigate

#endif  // ACTIGATE_SCORER_H_

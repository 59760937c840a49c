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

#include "actigate/synthetic_data.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <random>
#include <string>

#include "actigate/error.h"
#include "json.hpp"

namespace actigate {
namespace {

constexpr std::array<const char*, 48> kVocabulary = {
    "account",  "balance",   "transfer", "fee",      "statement", "deposit",
    "limit",    "card",      "payment",  "interest", "rate",      "fund",
    "portfolio", "dividend", "tax",      "form",     "online",    "branch",
    "wire",     "routing",   "number",   "days",     "business",  "within",
    "the",      "your",      "a",        "is",       "must",      "can",
    "be",       "after",     "before",   "request",  "approved",  "pending",
    "margin",   "trade",     "settlement", "beneficiary", "rollover", "ira",
    "minimum",  "monthly",   "annual",   "waived",   "verify",    "identity"};

double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi].
int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  return lo + std::min(hi - lo, static_cast<int>(Uniform01(rng) * span));
}

const char* RandomWord(std::mt19937_64& rng) {
  return kVocabulary[static_cast<std::size_t>(
      UniformInt(rng, 0, static_cast<int>(kVocabulary.size()) - 1))];
}

std::string Join(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::string FormatId(const std::string& prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return prefix + "-" + buf;
}

}  // namespace

void SyntheticConfig::Validate() const {
  if (n < 2) throw ValidationError("synthetic: n must be >= 2");
  if (dim < 1) throw ValidationError("synthetic: dim must be >= 1");
  if (min_answer_len < 1 || max_answer_len < min_answer_len) {
    throw ValidationError("synthetic: need 1 <= min_answer_len <= max_answer_len");
  }
  if (!(signal >= 0.0) || !std::isfinite(signal)) {
    throw ValidationError("synthetic: signal must be >= 0");
  }
  if (!(autocorrelation >= 0.0 && autocorrelation < 1.0)) {
    throw ValidationError("synthetic: autocorrelation must lie in [0, 1)");
  }
  if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0)) {
    throw ValidationError("synthetic: positive fraction must lie in [0, 1]");
  }
  if (!(logprob_correlation >= 0.0 && logprob_correlation < 1.0)) {
    throw ValidationError("synthetic: logprob correlation must lie in [0, 1)");
  }
  if (layer < 1) throw ValidationError("synthetic: layer must be >= 1");
  if (context_doc_counts.empty()) {
    throw ValidationError("synthetic: need at least one context size");
  }
  for (int k : context_doc_counts) {
    if (k < 0) throw ValidationError("synthetic: context sizes must be >= 0");
  }
  if (id_prefix.empty()) throw ValidationError("synthetic: id prefix must be nonempty");
}

std::string SyntheticConfig::ToJson() const {
  nlohmann::json j{{"n", n},
                   {"dim", dim},
                   {"min_answer_len", min_answer_len},
                   {"max_answer_len", max_answer_len},
                   {"signal", signal},
                   {"autocorrelation", autocorrelation},
                   {"positive_fraction", positive_fraction},
                   {"seed", seed},
                   {"direction_seed", direction_seed},
                   {"layer", layer},
                   {"context_doc_counts", context_doc_counts},
                   {"logprob_correlation", logprob_correlation},
                   {"id_prefix", id_prefix}};
  return j.dump();
}

std::vector<double> SignalDirection(int dim, std::uint64_t direction_seed) {
  if (dim < 1) throw ValidationError("signal direction: dim must be >= 1");
  std::mt19937_64 rng(direction_seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  std::vector<double> u(static_cast<std::size_t>(dim));
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (double& v : u) {
      v = normal(rng);
      norm += v * v;
    }
  }
  norm = std::sqrt(norm);
  for (double& v : u) v /= norm;
  return u;
}

std::vector<ActivationRecord> GenerateSynthetic(const SyntheticConfig& config) {
  config.Validate();
  const std::vector<double> direction = SignalDirection(config.dim, config.direction_seed);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal;

  const double p = config.positive_fraction;
  const double label_scale = (p > 0.0 && p < 1.0) ? 1.0 / std::sqrt(p * (1.0 - p)) : 0.0;
  const double r = config.logprob_correlation;
  const double rho = config.autocorrelation;
  const double innovation = std::sqrt(1.0 - rho * rho);
  const auto d = static_cast<std::size_t>(config.dim);

  std::vector<ActivationRecord> out;
  out.reserve(static_cast<std::size_t>(config.n));
  for (int index = 0; index < config.n; ++index) {
    ActivationRecord rec;
    rec.id = FormatId(config.id_prefix, index);
    rec.label = Uniform01(rng) < p ? 1 : 0;
    rec.answer_len = UniformInt(rng, config.min_answer_len, config.max_answer_len);
    rec.context_doc_count = config.context_doc_counts[static_cast<std::size_t>(
        UniformInt(rng, 0, static_cast<int>(config.context_doc_counts.size()) - 1))];
    rec.layer = config.layer;
    rec.prefix_len = 32 + 48 * rec.context_doc_count;

    const auto rows = static_cast<std::size_t>(rec.answer_len) + 1;
    Matrix m(rows, d);
    std::vector<double> state(d);
    for (std::size_t t = 0; t < rows; ++t) {
      for (std::size_t k = 0; k < d; ++k) {
        const double eps = normal(rng);
        state[k] = t == 0 ? eps : rho * state[k] + innovation * eps;
      }
      for (std::size_t k = 0; k < d; ++k) m(t, k) = static_cast<float>(state[k]);
    }
    const int span_lo = static_cast<int>(std::ceil(0.3 * static_cast<double>(rows)));
    const int span_hi = std::max(span_lo, static_cast<int>(std::ceil(0.6 * static_cast<double>(rows))));
    const int span_len = UniformInt(rng, span_lo, span_hi);
    const int span_start = UniformInt(rng, 0, static_cast<int>(rows) - span_len);
    const double shift = (2.0 * rec.label - 1.0) * config.signal;
    for (int t = span_start; t < span_start + span_len; ++t) {
      for (std::size_t k = 0; k < d; ++k) {
        m(static_cast<std::size_t>(t), k) = static_cast<float>(
            static_cast<double>(m(static_cast<std::size_t>(t), k)) + shift * direction[k]);
      }
    }
    rec.activations = std::move(m);

    // Latent answer quality with correlation r to the standardized label.
    const double quality = r * (rec.label - p) * label_scale + std::sqrt(1.0 - r * r) * normal(rng);
    std::vector<double> logprobs(static_cast<std::size_t>(rec.answer_len));
    for (double& lp : logprobs) lp = -0.35 * std::exp(-0.6 * quality + 0.25 * normal(rng));
    rec.token_logprobs = std::move(logprobs);

    const int ref_len = UniformInt(rng, 6, 14);
    std::vector<std::string> reference;
    for (int i = 0; i < ref_len; ++i) reference.emplace_back(RandomWord(rng));
    const double substitute = rec.label == 1 ? 0.15 : 0.55;
    std::vector<std::string> answer;
    for (const std::string& w : reference) {
      if (Uniform01(rng) < substitute) {
        answer.emplace_back(RandomWord(rng));
      } else {
        answer.push_back(w);
      }
    }
    rec.question = "What does the policy say about " + std::string(RandomWord(rng)) + " " +
                   std::string(RandomWord(rng)) + "?";
    rec.answer = Join(answer);
    rec.reference_answer = Join(reference);
    out.push_back(std::move(rec));
  }
  return out;
}

void WriteSyntheticStore(const SyntheticConfig& config, const std::filesystem::path& dir) {
  const auto records = GenerateSynthetic(config);
  ActivationStore store = ActivationStore::Create(dir);
  nlohmann::json header{{"generator", "synthetic"},
                        {"config", nlohmann::json::parse(config.ToJson())}};
  store.WriteHeader(header.dump());
  for (const auto& rec : records) store.Write(rec);
}

}  // namespace actigate

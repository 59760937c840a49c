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

#ifndef ACTIGATE_PROBE_MODEL_H_
#define ACTIGATE_PROBE_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "actigate/matrix.h"

namespace actigate {

// Gate blocks of the LSTM weight matrices, in storage order.
enum class Gate : int { kInput = 0, kForget = 1, kCell = 2, kOutput = 3 };

// Parameters of the sequence classifier: one unidirectional LSTM layer over
// the answer-span activations and a 2-logit head reading the final hidden
// state.
//
// All entries live in one contiguous buffer, in the checkpoint order
//   input_weights    (4h x d)
//   recurrent_weights(4h x h)
//   gate_bias        (4h)
//   head_weights     (2 x h)
//   head_bias        (2)
// Gate blocks are stacked as (input, forget, cell, output). Head row 0 is the
// "incorrect" logit and row 1 the "correct" logit.
class ProbeParams {
 public:
  ProbeParams() = default;
  // Zero-initialized.
  ProbeParams(int input_dim, int hidden_dim);

  int input_dim() const { return input_dim_; }
  int hidden_dim() const { return hidden_dim_; }

  std::span<double> input_weights() { return Block(0, InputWeightsSize()); }
  std::span<const double> input_weights() const {
    return Block(0, InputWeightsSize());
  }
  std::span<double> recurrent_weights() {
    return Block(RecurrentOffset(), RecurrentWeightsSize());
  }
  std::span<const double> recurrent_weights() const {
    return Block(RecurrentOffset(), RecurrentWeightsSize());
  }
  std::span<double> gate_bias() { return Block(BiasOffset(), GateCount()); }
  std::span<const double> gate_bias() const {
    return Block(BiasOffset(), GateCount());
  }
  std::span<double> head_weights() {
    return Block(HeadOffset(), 2 * static_cast<std::size_t>(hidden_dim_));
  }
  std::span<const double> head_weights() const {
    return Block(HeadOffset(), 2 * static_cast<std::size_t>(hidden_dim_));
  }
  std::span<double> head_bias() { return Block(HeadBiasOffset(), 2); }
  std::span<const double> head_bias() const {
    return Block(HeadBiasOffset(), 2);
  }

  // Every trainable entry in checkpoint order.
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  bool AllFinite() const;
  bool SameShape(const ProbeParams& other) const {
    return input_dim_ == other.input_dim_ && hidden_dim_ == other.hidden_dim_;
  }
  friend bool operator==(const ProbeParams&, const ProbeParams&) = default;

 private:
  std::size_t GateCount() const { return 4 * static_cast<std::size_t>(hidden_dim_); }
  std::size_t InputWeightsSize() const {
    return GateCount() * static_cast<std::size_t>(input_dim_);
  }
  std::size_t RecurrentWeightsSize() const {
    return GateCount() * static_cast<std::size_t>(hidden_dim_);
  }
  std::size_t RecurrentOffset() const { return InputWeightsSize(); }
  std::size_t BiasOffset() const {
    return RecurrentOffset() + RecurrentWeightsSize();
  }
  std::size_t HeadOffset() const { return BiasOffset() + GateCount(); }
  std::size_t HeadBiasOffset() const {
    return HeadOffset() + 2 * static_cast<std::size_t>(hidden_dim_);
  }
  std::span<double> Block(std::size_t offset, std::size_t n) {
    return std::span<double>(values_).subspan(offset, n);
  }
  std::span<const double> Block(std::size_t offset, std::size_t n) const {
    return std::span<const double>(values_).subspan(offset, n);
  }

  int input_dim_ = 0;
  int hidden_dim_ = 0;
  std::vector<double> values_;
};

// Two-class logits; `incorrect` is z_0 and `correct` is z_1.
struct Logits {
  double incorrect = 0.0;
  double correct = 0.0;
};

// Deterministic for a fixed seed. Every weight is uniform in
// +-scale/sqrt(fan_in), where fan_in is d for the input weights and h for the
// recurrent and head weights. Forget-gate biases start at 1, all others at 0.
ProbeParams InitParams(int input_dim, int hidden_dim, std::uint64_t seed,
                       double scale = 1.0);

// Per-step values kept for backpropagation through time. Step t (0-based)
// stores post-activation gates and the cell/hidden state after the step.
struct LstmTrace {
  std::size_t steps = 0;
  std::size_t hidden_dim = 0;
  std::vector<double> gates;   // steps x 4h: i, f, g, o
  std::vector<double> cells;   // steps x h
  std::vector<double> hidden;  // steps x h

  std::span<const double> gates_at(std::size_t t) const {
    return {gates.data() + t * 4 * hidden_dim, 4 * hidden_dim};
  }
  std::span<const double> cell_at(std::size_t t) const {
    return {cells.data() + t * hidden_dim, hidden_dim};
  }
  std::span<const double> hidden_at(std::size_t t) const {
    return {hidden.data() + t * hidden_dim, hidden_dim};
  }
  std::span<const double> final_hidden() const { return hidden_at(steps - 1); }
};

// Runs the LSTM from h_0 = c_0 = 0 and returns the final hidden state.
// Throws DimensionError on a column mismatch or empty sequence and
// ValidationError on non-finite input.
std::vector<double> LstmForward(const Matrix& sequence, const ProbeParams& params);
LstmTrace LstmForwardTrace(const Matrix& sequence, const ProbeParams& params);

// z = W_c h + b_c.
Logits ApplyHead(std::span<const double> hidden, const ProbeParams& params);
Logits Classify(const Matrix& sequence, const ProbeParams& params);

// softmax(z)_1, evaluated as sigmoid(z_1 - z_0).
double Confidence(const Logits& z);

// Checkpoint: "PRBP", version byte, u32 d, u32 h, then all parameter blocks
// as float32 little-endian in the order documented on ProbeParams.
inline constexpr char kCheckpointMagic[4] = {'P', 'R', 'B', 'P'};
inline constexpr std::uint8_t kCheckpointVersion = 0x01;

std::string EncodeCheckpoint(const ProbeParams& params);
ProbeParams DecodeCheckpoint(std::string_view bytes);
void SaveCheckpoint(const ProbeParams& params, const std::filesystem::path& path);
ProbeParams LoadCheckpoint(const std::filesystem::path& path);

// Rounds every entry to the nearest float32, i.e. the value a checkpoint
// round trip yields.
ProbeParams QuantizeToFloat32(ProbeParams params);

}  // namespace actigate

#endif  // ACTIGATE_PROBE_MODEL_H_

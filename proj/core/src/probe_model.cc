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

#include "actigate/probe_model.h"

#include <cmath>
#include <random>
#include <string>

#include "actigate/error.h"
#include "actigate/file_io.h"
#include "byte_io.h"

namespace actigate {
namespace {

double Sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementation.
double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void FillUniform(std::span<double> out, double bound, std::mt19937_64& rng) {
  for (double& v : out) v = (2.0 * Uniform01(rng) - 1.0) * bound;
}

void CheckSequence(const Matrix& sequence, const ProbeParams& params) {
  if (params.input_dim() < 1 || params.hidden_dim() < 1) {
    throw DimensionError("probe parameters are uninitialized");
  }
  if (sequence.rows() == 0) throw DimensionError("empty activation sequence");
  if (sequence.cols() != static_cast<std::size_t>(params.input_dim())) {
    throw DimensionError("sequence width " + std::to_string(sequence.cols()) +
                         " does not match probe input dim " +
                         std::to_string(params.input_dim()));
  }
  if (!sequence.AllFinite()) throw ValidationError("sequence contains non-finite values");
}

}  // namespace

ProbeParams::ProbeParams(int input_dim, int hidden_dim)
    : input_dim_(input_dim), hidden_dim_(hidden_dim) {
  if (input_dim < 1 || hidden_dim < 1) {
    throw ValidationError("probe dims must be >= 1");
  }
  const auto d = static_cast<std::size_t>(input_dim);
  const auto h = static_cast<std::size_t>(hidden_dim);
  values_.assign(4 * h * d + 4 * h * h + 4 * h + 2 * h + 2, 0.0);
}

bool ProbeParams::AllFinite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

ProbeParams InitParams(int input_dim, int hidden_dim, std::uint64_t seed, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ValidationError("init scale must be positive");
  }
  ProbeParams p(input_dim, hidden_dim);
  std::mt19937_64 rng(seed);
  FillUniform(p.input_weights(), scale / std::sqrt(static_cast<double>(input_dim)), rng);
  const double recurrent_bound = scale / std::sqrt(static_cast<double>(hidden_dim));
  FillUniform(p.recurrent_weights(), recurrent_bound, rng);
  FillUniform(p.head_weights(), recurrent_bound, rng);
  auto bias = p.gate_bias();
  const auto h = static_cast<std::size_t>(hidden_dim);
  for (std::size_t j = 0; j < h; ++j) {
    bias[static_cast<std::size_t>(Gate::kForget) * h + j] = 1.0;
  }
  return p;
}

LstmTrace LstmForwardTrace(const Matrix& sequence, const ProbeParams& params) {
  CheckSequence(sequence, params);
  const auto d = static_cast<std::size_t>(params.input_dim());
  const auto h = static_cast<std::size_t>(params.hidden_dim());
  const std::size_t gates = 4 * h;

  LstmTrace trace;
  trace.steps = sequence.rows();
  trace.hidden_dim = h;
  trace.gates.resize(trace.steps * gates);
  trace.cells.resize(trace.steps * h);
  trace.hidden.resize(trace.steps * h);

  const auto wx = params.input_weights();
  const auto wh = params.recurrent_weights();
  const auto b = params.gate_bias();
  std::vector<double> x(d);
  std::vector<double> pre(gates);
  std::vector<double> h_prev(h, 0.0);
  std::vector<double> c_prev(h, 0.0);

  for (std::size_t t = 0; t < trace.steps; ++t) {
    const auto row = sequence.row(t);
    for (std::size_t k = 0; k < d; ++k) x[k] = row[k];
    for (std::size_t j = 0; j < gates; ++j) {
      double acc = b[j];
      const double* wxj = wx.data() + j * d;
      for (std::size_t k = 0; k < d; ++k) acc += wxj[k] * x[k];
      const double* whj = wh.data() + j * h;
      for (std::size_t k = 0; k < h; ++k) acc += whj[k] * h_prev[k];
      pre[j] = acc;
    }
    double* g = trace.gates.data() + t * gates;
    double* c = trace.cells.data() + t * h;
    double* hh = trace.hidden.data() + t * h;
    for (std::size_t j = 0; j < h; ++j) {
      const double in = Sigmoid(pre[j]);
      const double forget = Sigmoid(pre[h + j]);
      const double cell = std::tanh(pre[2 * h + j]);
      const double out = Sigmoid(pre[3 * h + j]);
      g[j] = in;
      g[h + j] = forget;
      g[2 * h + j] = cell;
      g[3 * h + j] = out;
      c[j] = forget * c_prev[j] + in * cell;
      hh[j] = out * std::tanh(c[j]);
    }
    std::copy(c, c + h, c_prev.begin());
    std::copy(hh, hh + h, h_prev.begin());
  }
  return trace;
}

std::vector<double> LstmForward(const Matrix& sequence, const ProbeParams& params) {
  CheckSequence(sequence, params);
  const auto d = static_cast<std::size_t>(params.input_dim());
  const auto h = static_cast<std::size_t>(params.hidden_dim());
  const std::size_t gates = 4 * h;
  const auto wx = params.input_weights();
  const auto wh = params.recurrent_weights();
  const auto b = params.gate_bias();

  std::vector<double> x(d);
  std::vector<double> pre(gates);
  std::vector<double> hidden(h, 0.0);
  std::vector<double> cell(h, 0.0);
  for (std::size_t t = 0; t < sequence.rows(); ++t) {
    const auto row = sequence.row(t);
    for (std::size_t k = 0; k < d; ++k) x[k] = row[k];
    for (std::size_t j = 0; j < gates; ++j) {
      double acc = b[j];
      const double* wxj = wx.data() + j * d;
      for (std::size_t k = 0; k < d; ++k) acc += wxj[k] * x[k];
      const double* whj = wh.data() + j * h;
      for (std::size_t k = 0; k < h; ++k) acc += whj[k] * hidden[k];
      pre[j] = acc;
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double in = Sigmoid(pre[j]);
      const double forget = Sigmoid(pre[h + j]);
      const double candidate = std::tanh(pre[2 * h + j]);
      const double out = Sigmoid(pre[3 * h + j]);
      cell[j] = forget * cell[j] + in * candidate;
      hidden[j] = out * std::tanh(cell[j]);
    }
  }
  return hidden;
}

Logits ApplyHead(std::span<const double> hidden, const ProbeParams& params) {
  const auto h = static_cast<std::size_t>(params.hidden_dim());
  if (hidden.size() != h) throw DimensionError("hidden state size mismatch");
  const auto w = params.head_weights();
  const auto b = params.head_bias();
  Logits z{b[0], b[1]};
  for (std::size_t k = 0; k < h; ++k) {
    z.incorrect += w[k] * hidden[k];
    z.correct += w[h + k] * hidden[k];
  }
  return z;
}

Logits Classify(const Matrix& sequence, const ProbeParams& params) {
  return ApplyHead(LstmForward(sequence, params), params);
}

double Confidence(const Logits& z) {
  if (!std::isfinite(z.incorrect) || !std::isfinite(z.correct)) {
    throw ValidationError("non-finite logits");
  }
  return Sigmoid(z.correct - z.incorrect);
}

std::string EncodeCheckpoint(const ProbeParams& params) {
  if (params.size() == 0) throw ValidationError("cannot encode empty probe parameters");
  if (!params.AllFinite()) throw ValidationError("probe parameters contain non-finite values");
  std::string out;
  out.reserve(13 + 4 * params.size());
  out.append(kCheckpointMagic, sizeof(kCheckpointMagic));
  out.push_back(static_cast<char>(kCheckpointVersion));
  internal::AppendU32(out, static_cast<std::uint32_t>(params.input_dim()));
  internal::AppendU32(out, static_cast<std::uint32_t>(params.hidden_dim()));
  for (double v : params.values()) internal::AppendF32(out, static_cast<float>(v));
  return out;
}

ProbeParams DecodeCheckpoint(std::string_view bytes) {
  constexpr std::size_t kHeader = 13;
  if (bytes.size() < kHeader) throw CorruptionError("checkpoint truncated in header");
  if (bytes.substr(0, 4) != std::string_view(kCheckpointMagic, 4)) {
    throw CorruptionError("checkpoint magic mismatch");
  }
  if (static_cast<std::uint8_t>(bytes[4]) != kCheckpointVersion) {
    throw CorruptionError("unsupported checkpoint version");
  }
  const std::uint32_t d = internal::ReadU32(bytes, 5);
  const std::uint32_t h = internal::ReadU32(bytes, 9);
  if (d < 1 || h < 1 || d > (1u << 20) || h > (1u << 16)) {
    throw CorruptionError("checkpoint dims out of range");
  }
  ProbeParams p(static_cast<int>(d), static_cast<int>(h));
  if (bytes.size() != kHeader + 4 * p.size()) {
    throw CorruptionError("checkpoint size does not match its dims");
  }
  auto values = p.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = internal::ReadF32(bytes, kHeader + 4 * i);
  }
  if (!p.AllFinite()) throw CorruptionError("checkpoint contains non-finite values");
  return p;
}

void SaveCheckpoint(const ProbeParams& params, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeCheckpoint(params));
}

ProbeParams LoadCheckpoint(const std::filesystem::path& path) {
  return DecodeCheckpoint(ReadFile(path));
}

ProbeParams QuantizeToFloat32(ProbeParams params) {
  for (double& v : params.values()) v = static_cast<float>(v);
  return params;
}

}  // namespace actigate

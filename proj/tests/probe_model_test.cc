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

#include <algorithm>
#include <cmath>
#include <random>

#include "actigate/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace actigate {
namespace {

using testing::RandomMatrix;
using testing::TempDir;

double Sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// d = 1, h = 1 parameters with hand-picked values.
ProbeParams ScalarParams() {
  ProbeParams p(1, 1);
  const double wx[4] = {0.4, -0.3, 0.8, 0.2};
  const double wh[4] = {0.5, -0.6, 0.9, 0.3};
  const double b[4] = {0.1, 1.0, -0.2, 0.05};
  for (int g = 0; g < 4; ++g) {
    p.input_weights()[g] = wx[g];
    p.recurrent_weights()[g] = wh[g];
    p.gate_bias()[g] = b[g];
  }
  p.head_weights()[0] = -0.7;
  p.head_weights()[1] = 1.3;
  p.head_bias()[0] = 0.3;
  p.head_bias()[1] = -0.2;
  return p;
}

// Direct scalar execution of the cell equations.
double ScalarLstm(const ProbeParams& p, const std::vector<double>& xs) {
  const auto wx = p.input_weights();
  const auto wh = p.recurrent_weights();
  const auto b = p.gate_bias();
  double h = 0.0;
  double c = 0.0;
  for (double x : xs) {
    const double i = Sig(wx[0] * x + wh[0] * h + b[0]);
    const double f = Sig(wx[1] * x + wh[1] * h + b[1]);
    const double g = std::tanh(wx[2] * x + wh[2] * h + b[2]);
    const double o = Sig(wx[3] * x + wh[3] * h + b[3]);
    c = f * c + i * g;
    h = o * std::tanh(c);
  }
  return h;
}

Matrix Column(const std::vector<double>& xs) {
  Matrix m(xs.size(), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) m(i, 0) = static_cast<float>(xs[i]);
  return m;
}

TEST(InitParams, DeterministicForSeed) {
  const ProbeParams a = InitParams(4, 8, 0);
  const ProbeParams b = InitParams(4, 8, 0);
  EXPECT_EQ(EncodeCheckpoint(a), EncodeCheckpoint(b));
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == InitParams(4, 8, 1));
}

TEST(InitParams, WeightsWithinFanInBound) {
  const int d = 5;
  const int h = 7;
  const ProbeParams p = InitParams(d, h, 42);
  const double bx = 1.0 / std::sqrt(static_cast<double>(d));
  const double bh = 1.0 / std::sqrt(static_cast<double>(h));
  for (double v : p.input_weights()) EXPECT_LE(std::abs(v), bx);
  for (double v : p.recurrent_weights()) EXPECT_LE(std::abs(v), bh);
  for (double v : p.head_weights()) EXPECT_LE(std::abs(v), bh);
  const auto bias = p.gate_bias();
  for (int j = 0; j < 4 * h; ++j) {
    const bool forget = j >= h && j < 2 * h;
    EXPECT_EQ(bias[static_cast<std::size_t>(j)], forget ? 1.0 : 0.0) << j;
  }
  EXPECT_EQ(p.head_bias()[0], 0.0);
  EXPECT_EQ(p.head_bias()[1], 0.0);
}

TEST(InitParams, RejectsNonPositiveDims) {
  EXPECT_THROW(InitParams(0, 3, 0), ValidationError);
  EXPECT_THROW(InitParams(3, 0, 0), ValidationError);
}

TEST(LstmForward, ZeroWeightsGiveZeroState) {
  std::mt19937_64 rng(1);
  const ProbeParams zero(3, 4);
  const auto h = LstmForward(RandomMatrix(6, 3, rng, 5.0), zero);
  for (double v : h) EXPECT_EQ(v, 0.0);
}

TEST(LstmForward, SingleStepMatchesHandExecution) {
  const ProbeParams p = ScalarParams();
  const auto h = LstmForward(Column({0.5}), p);
  ASSERT_EQ(h.size(), 1u);
  // Frozen from an independent scalar evaluation.
  EXPECT_NEAR(h[0], 0.06067444126695372, 1e-15);
  EXPECT_NEAR(h[0], ScalarLstm(p, {0.5}), 1e-15);
}

TEST(LstmForward, TwoStepsMatchHandExecution) {
  const ProbeParams p = ScalarParams();
  const auto h = LstmForward(Column({0.5, -1.25}), p);
  EXPECT_NEAR(h[0], -0.1086616398297532, 1e-15);
}

TEST(LstmForward, TraceAgreesWithForward) {
  std::mt19937_64 rng(2);
  const ProbeParams p = InitParams(3, 5, 9);
  const Matrix seq = RandomMatrix(7, 3, rng);
  const auto h = LstmForward(seq, p);
  const LstmTrace trace = LstmForwardTrace(seq, p);
  ASSERT_EQ(trace.steps, 7u);
  const auto fh = trace.final_hidden();
  for (std::size_t k = 0; k < h.size(); ++k) EXPECT_EQ(h[k], fh[k]);
}

TEST(LstmForward, OrderSensitive) {
  const ProbeParams p = InitParams(1, 4, 3);
  const auto forward = LstmForward(Column({1.0, -0.5, 2.0}), p);
  const auto reversed = LstmForward(Column({2.0, -0.5, 1.0}), p);
  EXPECT_NE(forward, reversed);
}

TEST(LstmForward, PermutationChangesLogitsAcrossSeeds) {
  int changed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const ProbeParams p = InitParams(4, 6, seed);
    const Matrix seq = RandomMatrix(6, 4, rng);
    Matrix shuffled = seq;
    std::vector<std::size_t> order = {5, 4, 3, 2, 1, 0};
    for (std::size_t r = 0; r < 6; ++r) {
      std::copy(seq.row(order[r]).begin(), seq.row(order[r]).end(), shuffled.row(r).begin());
    }
    const Logits a = Classify(seq, p);
    const Logits b = Classify(shuffled, p);
    if (a.correct != b.correct || a.incorrect != b.incorrect) ++changed;
  }
  EXPECT_EQ(changed, 20);
}

TEST(LstmForward, Errors) {
  const ProbeParams p = InitParams(3, 2, 0);
  EXPECT_THROW(LstmForward(Matrix(4, 2), p), DimensionError);
  EXPECT_THROW(LstmForward(Matrix(0, 3), p), DimensionError);
  Matrix bad(2, 3);
  bad(1, 1) = std::numeric_limits<float>::infinity();
  EXPECT_THROW(LstmForward(bad, p), ValidationError);
}

TEST(Classify, ZeroRecurrentOutputGivesHeadBias) {
  ProbeParams p(2, 3);
  p.head_weights()[0] = 0.9;
  p.head_weights()[4] = -1.7;
  p.head_bias()[0] = 0.3;
  p.head_bias()[1] = -0.2;
  std::mt19937_64 rng(3);
  const Logits z = Classify(RandomMatrix(4, 2, rng), p);
  EXPECT_EQ(z.incorrect, 0.3);
  EXPECT_EQ(z.correct, -0.2);
}

TEST(Classify, ScalarInstanceMatchesHandComputation) {
  const ProbeParams p = ScalarParams();
  const Logits z = Classify(Column({0.5}), p);
  EXPECT_NEAR(z.incorrect, 0.2575278911131324, 1e-15);
  EXPECT_NEAR(z.correct, -0.12112322635296018, 1e-15);
}

TEST(Classify, PureFunction) {
  std::mt19937_64 rng(4);
  const ProbeParams p = InitParams(3, 4, 5);
  const Matrix seq = RandomMatrix(5, 3, rng);
  const Logits a = Classify(seq, p);
  const Logits b = Classify(seq, p);
  EXPECT_EQ(a.correct, b.correct);
  EXPECT_EQ(a.incorrect, b.incorrect);
}

TEST(Confidence, KnownValues) {
  EXPECT_EQ(Confidence({0.0, 0.0}), 0.5);
  EXPECT_NEAR(Confidence({0.0, std::log(3.0)}), 0.75, 1e-15);
}

TEST(Confidence, ShiftInvariantAndStrictlyInside) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal(0.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double a = normal(rng);
    const double b = normal(rng);
    const double t = normal(rng);
    const double c = Confidence({a, b});
    EXPECT_GT(c, 0.0);
    EXPECT_LT(c, 1.0);
    EXPECT_NEAR(c, Confidence({a + t, b + t}), 1e-12);
  }
  // Large logits do not overflow.
  EXPECT_NEAR(Confidence({1000.0, 1001.0}), Sig(1.0), 1e-15);
  EXPECT_THROW(Confidence({std::nan(""), 0.0}), ValidationError);
}

TEST(Checkpoint, LayoutAndRoundTrip) {
  const ProbeParams p = QuantizeToFloat32(InitParams(3, 2, 7));
  const std::string bytes = EncodeCheckpoint(p);
  EXPECT_EQ(bytes.substr(0, 4), "PRBP");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), kCheckpointVersion);
  EXPECT_EQ(bytes.size(), 13u + 4u * p.size());

  TempDir dir;
  SaveCheckpoint(p, dir / "p.ckpt");
  const ProbeParams loaded = LoadCheckpoint(dir / "p.ckpt");
  EXPECT_TRUE(loaded == p);

  std::mt19937_64 rng(8);
  const Matrix seq = RandomMatrix(5, 3, rng);
  const Logits a = Classify(seq, p);
  const Logits b = Classify(seq, loaded);
  EXPECT_EQ(a.correct, b.correct);
  EXPECT_EQ(a.incorrect, b.incorrect);
}

TEST(Checkpoint, QuantizedParamsReencodeIdentically) {
  const ProbeParams raw = InitParams(4, 3, 11);
  const ProbeParams once = DecodeCheckpoint(EncodeCheckpoint(raw));
  EXPECT_EQ(EncodeCheckpoint(once), EncodeCheckpoint(raw));
  EXPECT_TRUE(once == QuantizeToFloat32(raw));
}

TEST(Checkpoint, CorruptionDetected) {
  const std::string good = EncodeCheckpoint(InitParams(2, 2, 0));
  EXPECT_THROW(DecodeCheckpoint(good.substr(0, good.size() - 1)), CorruptionError);
  EXPECT_THROW(DecodeCheckpoint(good.substr(0, 7)), CorruptionError);
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(DecodeCheckpoint(bad_magic), CorruptionError);
  std::string bad_version = good;
  bad_version[4] = 9;
  EXPECT_THROW(DecodeCheckpoint(bad_version), CorruptionError);
  TempDir dir;
  EXPECT_THROW(LoadCheckpoint(dir / "missing.ckpt"), StorageError);
}

}  // namespace
}  // namespace actigate

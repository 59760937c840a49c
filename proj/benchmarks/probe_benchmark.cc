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

#include <random>
#include <vector>

#include "actigate/evaluation.h"
#include "actigate/probe_model.h"
#include "actigate/training.h"
#include "benchmark/benchmark.h"

namespace actigate {
namespace {

Matrix Gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<float> normal;
  Matrix m(rows, cols);
  for (float& v : m.values()) v = normal(rng);
  return m;
}

// Forward pass over one answer span; range(0) is the number of rows.
void BM_Classify(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const ProbeParams params = InitParams(64, 256, 1);
  const Matrix seq = Gaussian(static_cast<std::size_t>(state.range(0)), 64, rng);
  for (auto _ : state) benchmark::DoNotOptimize(Classify(seq, params));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Classify)->RangeMultiplier(2)->Range(8, 128)->Complexity(benchmark::oN);

// Loss plus full gradient for one mini-batch.
void BM_TotalLoss(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const ProbeParams params = InitParams(64, static_cast<int>(state.range(0)), 2);
  std::vector<Matrix> seqs;
  for (int i = 0; i < 32; ++i) seqs.push_back(Gaussian(17, 64, rng));
  std::vector<Example> batch;
  for (int i = 0; i < 32; ++i) batch.push_back({seqs[static_cast<std::size_t>(i)], i % 2});
  const TrainingConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(TotalLoss(batch, params, cfg));
}
BENCHMARK(BM_TotalLoss)->Arg(32)->Arg(128);

void BM_Auroc(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u;
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = u(rng);
    labels[i] = static_cast<int>(i % 2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Auroc(scores, labels));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Auroc)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNLogN);

}  // namespace
}  // namespace actigate

BENCHMARK_MAIN();

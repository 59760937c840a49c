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

#ifndef ACTIGATE_TRAINING_H_
#define ACTIGATE_TRAINING_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "actigate/matrix.h"
#include "actigate/probe_model.h"

namespace actigate {

struct TrainingConfig {
  double delta = 1.0;   // Huber knee
  double lambda = 0.5;  // weight of the calibration regularizer
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 30;
  std::uint64_t seed = 0;
  int hidden_dim = 256;
  double init_scale = 1.0;
  // Global L2 norm the gradient is clipped to; <= 0 disables clipping.
  double clip_norm = 1.0;
  double validation_fraction = 0.2;
  // Early stopping: epochs without a validation AUROC improvement.
  int patience = 5;

  // Throws ValidationError.
  void Validate() const;
};

// 0.5 x^2 for |x| <= delta, delta (|x| - delta / 2) otherwise.
double Huber(double x, double delta);
// dH/dx.
double HuberDerivative(double x, double delta);

// H_delta(mean(confidences) - mean(predictions == labels)). `confidences` are
// max-class probabilities, so each lies in [0.5, 1].
double HuberRegularizer(std::span<const double> confidences,
                        std::span<const int> predictions,
                        std::span<const int> labels, double delta);

// -log softmax(z)_label, in log space.
double CrossEntropy(const Logits& z, int label);

// Predicted class: argmax of the logits, ties resolved toward class 1.
inline int PredictedClass(const Logits& z) {
  return z.correct >= z.incorrect ? 1 : 0;
}
// Probability of the predicted class.
double MaxProbability(const Logits& z);

struct Example {
  std::reference_wrapper<const Matrix> sequence;
  int label = 0;
};

struct LossResult {
  double value = 0.0;
  double cross_entropy = 0.0;  // batch mean
  double huber = 0.0;          // unweighted regularizer
  ProbeParams gradient;        // same shape as the parameters
};

// Mean cross-entropy plus lambda times the batch calibration regularizer,
// with the exact gradient. The accuracy indicator inside the regularizer is
// treated as a constant.
LossResult TotalLoss(std::span<const Example> batch, const ProbeParams& params,
                     const TrainingConfig& config);
// Value only; no backward pass.
double TotalLossValue(std::span<const Example> batch, const ProbeParams& params,
                      const TrainingConfig& config);

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t worst_index = 0;
};

// Central finite differences of TotalLossValue over every parameter entry,
// compared to the analytic gradient. The relative error uses
// max(|analytic|, |numeric|, 1e-8) as the denominator. `epsilon` must lie in
// [1e-6, 1e-3].
GradCheckResult GradCheck(const ProbeParams& params,
                          std::span<const Example> batch,
                          const TrainingConfig& config, double epsilon);

struct EpochStats {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double cross_entropy = 0.0;
  double huber = 0.0;
  double val_auroc = std::numeric_limits<double>::quiet_NaN();
  double calibration_gap = std::numeric_limits<double>::quiet_NaN();
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;  // 1-based
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  // FNV-1a over the split and every epoch's batch order.
  std::uint64_t order_fingerprint = 0;
};

struct TrainResult {
  ProbeParams params;
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Mini-batch Adam with global-norm clipping. A seeded shuffle splits off the
// validation fraction; the returned parameters are the snapshot of the epoch
// with the best validation AUROC (or the last epoch when the validation split
// lacks a class), rounded to float32 so that they equal their checkpoint.
// Throws ValidationError if the training split holds a single class.
TrainResult Train(std::span<const Example> dataset, const TrainingConfig& config,
                  const EpochCallback& on_epoch = {});

// epoch,loss,ce,huber,val_auroc,cal_gap
std::string HistoryToCsv(const TrainHistory& history);

}  // namespace actigate

#endif  // ACTIGATE_TRAINING_H_

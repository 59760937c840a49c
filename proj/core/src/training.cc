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

#include "actigate/training.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>

#include "actigate/error.h"
#include "actigate/evaluation.h"

namespace actigate {
namespace {

// log(1 + e^x) without overflow.
double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

struct ClassProbabilities {
  double incorrect;
  double correct;
};

ClassProbabilities Probabilities(const Logits& z) {
  const double p1 = Confidence(z);
  const double p0 = Confidence(Logits{z.correct, z.incorrect});
  return {p0, p1};
}

// Backpropagation through time. `dh_final` is dLoss/dh at the last step.
void BackpropLstm(const Matrix& sequence, const LstmTrace& trace,
                  std::span<const double> dh_final, const ProbeParams& params,
                  ProbeParams& grad) {
  const auto d = static_cast<std::size_t>(params.input_dim());
  const auto h = static_cast<std::size_t>(params.hidden_dim());
  const auto wh = params.recurrent_weights();
  auto gwx = grad.input_weights();
  auto gwh = grad.recurrent_weights();
  auto gb = grad.gate_bias();

  std::vector<double> dh(dh_final.begin(), dh_final.end());
  std::vector<double> dc(h, 0.0);
  std::vector<double> da(4 * h);
  std::vector<double> x(d);
  const std::vector<double> zeros(h, 0.0);

  for (std::size_t step = trace.steps; step-- > 0;) {
    const auto gates = trace.gates_at(step);
    const auto cell = trace.cell_at(step);
    const auto c_prev = step > 0 ? trace.cell_at(step - 1) : std::span<const double>(zeros);
    const auto h_prev = step > 0 ? trace.hidden_at(step - 1) : std::span<const double>(zeros);
    for (std::size_t j = 0; j < h; ++j) {
      const double in = gates[j];
      const double forget = gates[h + j];
      const double candidate = gates[2 * h + j];
      const double out = gates[3 * h + j];
      const double tc = std::tanh(cell[j]);
      const double d_out = dh[j] * tc;
      const double dcell = dc[j] + dh[j] * out * (1.0 - tc * tc);
      da[j] = dcell * candidate * in * (1.0 - in);
      da[h + j] = dcell * c_prev[j] * forget * (1.0 - forget);
      da[2 * h + j] = dcell * in * (1.0 - candidate * candidate);
      da[3 * h + j] = d_out * out * (1.0 - out);
      dc[j] = dcell * forget;
    }
    const auto row = sequence.row(step);
    for (std::size_t k = 0; k < d; ++k) x[k] = row[k];
    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t j = 0; j < 4 * h; ++j) {
      const double a = da[j];
      if (a == 0.0) continue;
      gb[j] += a;
      double* gx = gwx.data() + j * d;
      for (std::size_t k = 0; k < d; ++k) gx[k] += a * x[k];
      double* gh = gwh.data() + j * h;
      const double* w = wh.data() + j * h;
      for (std::size_t k = 0; k < h; ++k) {
        gh[k] += a * h_prev[k];
        dh[k] += w[k] * a;
      }
    }
  }
}

void CheckBatch(std::span<const Example> batch) {
  if (batch.empty()) throw ValidationError("empty batch");
  for (const Example& e : batch) {
    if (e.label != 0 && e.label != 1) throw ValidationError("labels must be 0 or 1");
  }
}

std::uint64_t Fnv1a(std::uint64_t hash, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    hash ^= (value >> (8 * i)) & 0xFF;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

double GlobalNorm(std::span<const double> g) {
  double sum = 0.0;
  for (double v : g) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace

void TrainingConfig::Validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning rate must be > 0");
  }
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (hidden_dim < 1) throw ValidationError("hidden dim must be >= 1");
  if (!(init_scale > 0.0)) throw ValidationError("init scale must be > 0");
  if (!std::isfinite(clip_norm)) throw ValidationError("clip norm must be finite");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ValidationError("validation fraction must lie in [0, 1)");
  }
  if (patience < 1) throw ValidationError("patience must be >= 1");
}

double Huber(double x, double delta) {
  if (!(delta > 0.0)) throw ValidationError("huber: delta must be > 0");
  const double a = std::abs(x);
  return a <= delta ? 0.5 * x * x : delta * (a - 0.5 * delta);
}

double HuberDerivative(double x, double delta) {
  if (!(delta > 0.0)) throw ValidationError("huber: delta must be > 0");
  return std::clamp(x, -delta, delta);
}

double HuberRegularizer(std::span<const double> confidences,
                        std::span<const int> predictions,
                        std::span<const int> labels, double delta) {
  if (confidences.empty()) throw ValidationError("huber regularizer: empty batch");
  if (predictions.size() != confidences.size() || labels.size() != confidences.size()) {
    throw DimensionError("huber regularizer: length mismatch");
  }
  double conf_sum = 0.0;
  double correct = 0.0;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    conf_sum += confidences[i];
    if (predictions[i] == labels[i]) correct += 1.0;
  }
  const double n = static_cast<double>(confidences.size());
  return Huber(conf_sum / n - correct / n, delta);
}

double CrossEntropy(const Logits& z, int label) {
  if (label != 0 && label != 1) throw ValidationError("cross entropy: label must be 0 or 1");
  if (!std::isfinite(z.incorrect) || !std::isfinite(z.correct)) {
    throw ValidationError("cross entropy: non-finite logits");
  }
  return label == 1 ? Softplus(z.incorrect - z.correct) : Softplus(z.correct - z.incorrect);
}

double MaxProbability(const Logits& z) {
  const ClassProbabilities p = Probabilities(z);
  return PredictedClass(z) == 1 ? p.correct : p.incorrect;
}

LossResult TotalLoss(std::span<const Example> batch, const ProbeParams& params,
                     const TrainingConfig& config) {
  CheckBatch(batch);
  const std::size_t n = batch.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<LstmTrace> traces;
  std::vector<Logits> logits;
  traces.reserve(n);
  logits.reserve(n);
  double ce_sum = 0.0;
  double conf_sum = 0.0;
  double correct = 0.0;
  for (const Example& e : batch) {
    traces.push_back(LstmForwardTrace(e.sequence.get(), params));
    const Logits z = ApplyHead(traces.back().final_hidden(), params);
    logits.push_back(z);
    ce_sum += CrossEntropy(z, e.label);
    conf_sum += MaxProbability(z);
    if (PredictedClass(z) == e.label) correct += 1.0;
  }
  const double gap = conf_sum * inv_n - correct * inv_n;

  LossResult result;
  result.cross_entropy = ce_sum * inv_n;
  result.huber = Huber(gap, config.delta);
  result.value = result.cross_entropy + config.lambda * result.huber;
  result.gradient = ProbeParams(params.input_dim(), params.hidden_dim());

  const double reg_scale =
      config.lambda == 0.0 ? 0.0 : config.lambda * HuberDerivative(gap, config.delta) * inv_n;
  const auto h = static_cast<std::size_t>(params.hidden_dim());
  const auto w_head = params.head_weights();
  auto g_head = result.gradient.head_weights();
  auto g_head_bias = result.gradient.head_bias();
  std::vector<double> dh(h);

  for (std::size_t i = 0; i < n; ++i) {
    const Logits& z = logits[i];
    const ClassProbabilities p = Probabilities(z);
    const int y = batch[i].label;
    double dz0 = (p.incorrect - (y == 0 ? 1.0 : 0.0)) * inv_n;
    double dz1 = (p.correct - (y == 1 ? 1.0 : 0.0)) * inv_n;
    if (reg_scale != 0.0) {
      // d(max prob)/dz for the predicted class; the other class gets the
      // opposite sign.
      const double s = p.correct * p.incorrect;
      const double sign = PredictedClass(z) == 1 ? 1.0 : -1.0;
      dz1 += reg_scale * sign * s;
      dz0 -= reg_scale * sign * s;
    }
    const auto hidden = traces[i].final_hidden();
    g_head_bias[0] += dz0;
    g_head_bias[1] += dz1;
    for (std::size_t k = 0; k < h; ++k) {
      g_head[k] += dz0 * hidden[k];
      g_head[h + k] += dz1 * hidden[k];
      dh[k] = w_head[k] * dz0 + w_head[h + k] * dz1;
    }
    BackpropLstm(batch[i].sequence.get(), traces[i], dh, params, result.gradient);
  }
  return result;
}

double TotalLossValue(std::span<const Example> batch, const ProbeParams& params,
                      const TrainingConfig& config) {
  CheckBatch(batch);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double ce_sum = 0.0;
  double conf_sum = 0.0;
  double correct = 0.0;
  for (const Example& e : batch) {
    const Logits z = Classify(e.sequence.get(), params);
    ce_sum += CrossEntropy(z, e.label);
    conf_sum += MaxProbability(z);
    if (PredictedClass(z) == e.label) correct += 1.0;
  }
  return ce_sum * inv_n +
         config.lambda * Huber(conf_sum * inv_n - correct * inv_n, config.delta);
}

GradCheckResult GradCheck(const ProbeParams& params, std::span<const Example> batch,
                          const TrainingConfig& config, double epsilon) {
  if (!(epsilon >= 1e-6 && epsilon <= 1e-3)) {
    throw ValidationError("grad check epsilon must lie in [1e-6, 1e-3]");
  }
  const LossResult analytic = TotalLoss(batch, params, config);
  ProbeParams probe = params;
  auto values = probe.values();
  GradCheckResult result;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + epsilon;
    const double plus = TotalLossValue(batch, probe, config);
    values[i] = saved - epsilon;
    const double minus = TotalLossValue(batch, probe, config);
    values[i] = saved;
    const double numeric = (plus - minus) / (2.0 * epsilon);
    const double a = analytic.gradient.values()[i];
    const double abs_err = std::abs(a - numeric);
    const double rel_err = abs_err / std::max({std::abs(a), std::abs(numeric), 1e-8});
    result.max_absolute_error = std::max(result.max_absolute_error, abs_err);
    if (rel_err > result.max_relative_error) {
      result.max_relative_error = rel_err;
      result.worst_index = i;
    }
  }
  return result;
}

TrainResult Train(std::span<const Example> dataset, const TrainingConfig& config,
                  const EpochCallback& on_epoch) {
  config.Validate();
  if (dataset.size() < 2) throw ValidationError("training needs at least 2 examples");
  const std::size_t width = dataset.front().sequence.get().cols();
  for (const Example& e : dataset) {
    if (e.sequence.get().cols() != width) {
      throw DimensionError("training examples have differing activation widths");
    }
    if (e.label != 0 && e.label != 1) throw ValidationError("labels must be 0 or 1");
  }

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(
      std::floor(config.validation_fraction * static_cast<double>(dataset.size())));
  std::vector<std::size_t> train_idx(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> val_idx(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val_idx.begin(), val_idx.end());

  std::size_t train_pos = 0;
  for (std::size_t i : train_idx) train_pos += static_cast<std::size_t>(dataset[i].label);
  if (train_pos == 0 || train_pos == train_idx.size()) {
    throw ValidationError("training split contains a single class");
  }
  std::vector<int> val_labels;
  for (std::size_t i : val_idx) val_labels.push_back(dataset[i].label);
  const bool val_has_both =
      std::count(val_labels.begin(), val_labels.end(), 1) > 0 &&
      std::count(val_labels.begin(), val_labels.end(), 0) > 0;

  TrainResult result;
  TrainHistory& history = result.history;
  history.train_size = train_idx.size();
  history.validation_size = val_idx.size();
  std::uint64_t fingerprint = 0xcbf29ce484222325ULL;
  for (std::size_t i : order) fingerprint = Fnv1a(fingerprint, i);

  ProbeParams params = InitParams(static_cast<int>(width), config.hidden_dim, config.seed,
                                  config.init_scale);
  ProbeParams best = params;
  std::vector<double> m(params.size(), 0.0);
  std::vector<double> v(params.size(), 0.0);
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::uint64_t step = 0;

  double best_auroc = -1.0;
  int since_best = 0;
  std::vector<Example> batch;
  batch.reserve(static_cast<std::size_t>(config.batch_size));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    for (std::size_t i : train_idx) fingerprint = Fnv1a(fingerprint, i);

    EpochStats stats;
    stats.epoch = epoch;
    double loss_sum = 0.0;
    double ce_sum = 0.0;
    double huber_sum = 0.0;
    for (std::size_t start = 0; start < train_idx.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(train_idx.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back(dataset[train_idx[k]]);
      LossResult loss = TotalLoss(batch, params, config);
      const auto weight = static_cast<double>(batch.size());
      loss_sum += loss.value * weight;
      ce_sum += loss.cross_entropy * weight;
      huber_sum += loss.huber * weight;

      auto g = loss.gradient.values();
      if (config.clip_norm > 0.0) {
        const double norm = GlobalNorm(g);
        if (norm > config.clip_norm) {
          const double s = config.clip_norm / norm;
          for (double& x : g) x *= s;
        }
      }
      ++step;
      const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      auto p = params.values();
      for (std::size_t k = 0; k < p.size(); ++k) {
        m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g[k];
        v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g[k] * g[k];
        p[k] -= config.learning_rate * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + kEps);
      }
    }
    const auto n_train = static_cast<double>(train_idx.size());
    stats.loss = loss_sum / n_train;
    stats.cross_entropy = ce_sum / n_train;
    stats.huber = huber_sum / n_train;

    if (!val_idx.empty()) {
      std::vector<double> scores;
      scores.reserve(val_idx.size());
      for (std::size_t i : val_idx) {
        scores.push_back(Confidence(Classify(dataset[i].sequence.get(), params)));
      }
      stats.calibration_gap = CalibrationGap(scores, val_labels);
      if (val_has_both) stats.val_auroc = Auroc(scores, val_labels);
    }
    history.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);

    if (!val_has_both) {
      best = params;
      history.best_epoch = epoch;
      continue;
    }
    if (stats.val_auroc > best_auroc) {
      best_auroc = stats.val_auroc;
      best = params;
      history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  history.order_fingerprint = fingerprint;
  result.params = QuantizeToFloat32(std::move(best));
  return result;
}

std::string HistoryToCsv(const TrainHistory& history) {
  std::string out = "epoch,loss,ce,huber,val_auroc,cal_gap\n";
  char buf[256];
  for (const EpochStats& e : history.epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.epoch, e.loss,
                  e.cross_entropy, e.huber, e.val_auroc, e.calibration_gap);
    out += buf;
  }
  return out;
}

}  // namespace actigate

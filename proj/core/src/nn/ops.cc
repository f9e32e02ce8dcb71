/*
 * Copyright 2026 The impactx Authors.
 *
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

#include "impactx/nn/ops.h"

#include <algorithm>
#include <cmath>

#include "impactx/errors.h"

namespace impactx::nn {
namespace {

std::vector<double> SoftmaxDouble(std::span<const float> logits) {
  if (logits.empty()) throw InputError("softmax of an empty vector");
  const float max_logit = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(static_cast<double>(logits[i]) - static_cast<double>(max_logit));
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

std::vector<float> Softmax(std::span<const float> logits) {
  const auto p = SoftmaxDouble(logits);
  return std::vector<float>(p.begin(), p.end());
}

int ArgMax(std::span<const float> values) {
  if (values.empty()) throw InputError("argmax of an empty vector");
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

Prediction PredictFromLogits(std::span<const float> logits) {
  Prediction out;
  out.probabilities = Softmax(logits);
  out.label = ArgMax(logits);
  return out;
}

double SoftmaxCrossEntropy(std::span<const float> logits, int label,
                           std::span<float> grad, float scale) {
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw InputError("cross-entropy label out of range");
  }
  const auto p = SoftmaxDouble(logits);
  if (!grad.empty()) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      grad[i] = scale * static_cast<float>(p[i] - (static_cast<int>(i) == label ? 1.0 : 0.0));
    }
  }
  return -std::log(std::max(p[label], 1e-300));
}

double MeanSquaredError(std::span<const float> prediction,
                        std::span<const float> target, std::span<float> grad,
                        float scale) {
  if (prediction.size() != target.size() || prediction.empty()) {
    throw InputError("MSE size mismatch");
  }
  const double n = static_cast<double>(prediction.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double d = static_cast<double>(prediction[i]) - target[i];
    sum += d * d;
    if (!grad.empty()) grad[i] = scale * static_cast<float>(2.0 * d / n);
  }
  return sum / n;
}

}  // namespace impactx::nn

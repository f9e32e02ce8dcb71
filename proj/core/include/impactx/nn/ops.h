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

#ifndef IMPACTX_NN_OPS_H_
#define IMPACTX_NN_OPS_H_

#include <span>
#include <vector>

namespace impactx::nn {

// Softmax with the max logit subtracted before exponentiation.
std::vector<float> Softmax(std::span<const float> logits);

// Index of the largest value; ties go to the lowest index.
int ArgMax(std::span<const float> values);

struct Prediction {
  int label = 0;
  std::vector<float> probabilities;
};

// Shared output contract of M and of the fusion classifier.
Prediction PredictFromLogits(std::span<const float> logits);

// Cross-entropy of softmax(logits) against `label`. Writes
// scale * d(loss)/d(logits) into grad when it is non-empty.
double SoftmaxCrossEntropy(std::span<const float> logits, int label,
                           std::span<float> grad, float scale = 1.0f);

// Mean over elements of (prediction - target)^2. Writes
// scale * d(loss)/d(prediction) into grad when it is non-empty.
double MeanSquaredError(std::span<const float> prediction,
                        std::span<const float> target, std::span<float> grad,
                        float scale = 1.0f);

}  // namespace impactx::nn

#endif  // IMPACTX_NN_OPS_H_

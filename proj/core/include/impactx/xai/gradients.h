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

#ifndef IMPACTX_XAI_GRADIENTS_H_
#define IMPACTX_XAI_GRADIENTS_H_

#include <span>
#include <vector>

#include "impactx/model/base_classifier.h"
#include "impactx/xai/attribution.h"
#include "impactx/xai/grouping.h"

namespace impactx::xai {

// A scalar function of the input with an analytic gradient.
class DifferentiableScore {
 public:
  virtual ~DifferentiableScore() = default;
  virtual double Value(std::span<const float> x) const = 0;
  virtual std::vector<float> Gradient(std::span<const float> x) const = 0;
};

// The pre-softmax logit of one class of M.
class ClassLogitScore : public DifferentiableScore {
 public:
  ClassLogitScore(const model::BaseClassifier& model, int target_class);
  double Value(std::span<const float> x) const override;
  std::vector<float> Gradient(std::span<const float> x) const override;

 private:
  const model::BaseClassifier& model_;
  int target_class_;
};

// Per-feature integrated gradients with the midpoint rule:
//   (x_i - b_i) * (1/steps) * sum_{t=1..steps} df/dx_i(b + (t - 0.5)/steps * (x - b)).
std::vector<double> IntegratedGradientsPerFeature(const DifferentiableScore& f,
                                                  std::span<const float> x,
                                                  std::span<const float> baseline,
                                                  int steps);

// Per-feature (x_i - b_i) * df/dx_i(x).
std::vector<double> GradientTimesInputPerFeature(const DifferentiableScore& f,
                                                 std::span<const float> x,
                                                 std::span<const float> baseline);

inline constexpr int kMinIntegrationSteps = 16;

// Group-summed raw maps for M. IntegratedGradients requires
// steps >= kMinIntegrationSteps.
AttributionMap IntegratedGradients(const model::BaseClassifier& model,
                                   const data::Sample& x, const BaselineSpec& baseline,
                                   const FeatureGrouping& grouping, int target_class,
                                   int steps);
AttributionMap GradientTimesInput(const model::BaseClassifier& model,
                                  const data::Sample& x, const BaselineSpec& baseline,
                                  const FeatureGrouping& grouping, int target_class);

}  // namespace impactx::xai

#endif  // IMPACTX_XAI_GRADIENTS_H_

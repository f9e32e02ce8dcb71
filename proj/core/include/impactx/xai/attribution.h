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

#ifndef IMPACTX_XAI_ATTRIBUTION_H_
#define IMPACTX_XAI_ATTRIBUTION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "impactx/xai/grouping.h"

namespace impactx::xai {

enum class AttributionMethod {
  kExactShapley,
  kKernelShap,
  kIntegratedGradients,
  kGradientTimesInput,
};

const char* MethodName(AttributionMethod method);
AttributionMethod ParseMethod(const std::string& name);

// Which class an explanation is conditioned on.
enum class TargetPolicy { kTrueClass, kPredictedClass };

const char* TargetPolicyName(TargetPolicy policy);
TargetPolicy ParseTargetPolicy(const std::string& name);

// An explanation e_x: one signed score per feature group for one target
// class.
struct AttributionMap {
  std::int64_t sample_id = 0;
  int target_class = 0;
  AttributionMethod method = AttributionMethod::kKernelShap;
  std::string baseline_ref;
  std::vector<float> values;
  // max |value| before normalization; 1 for raw maps.
  float raw_scale = 1.0f;

  // Divides by the max absolute value. All-zero maps stay zero with
  // raw_scale 0.
  AttributionMap Normalized() const;
  std::vector<float> Expand(const FeatureGrouping& grouping) const {
    return grouping.Expand(values);
  }
};

// Number of attribution computations (Shapley, KernelSHAP, gradient
// methods, dataset explanation) started in this process. Used to check that
// inference paths never compute explanations.
std::uint64_t AttributionCallCount();

namespace internal {
void CountAttributionCall();
}  // namespace internal

}  // namespace impactx::xai

#endif  // IMPACTX_XAI_ATTRIBUTION_H_

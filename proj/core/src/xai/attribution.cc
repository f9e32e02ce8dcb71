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

#include "impactx/xai/attribution.h"

#include <atomic>
#include <cmath>

#include "impactx/errors.h"

namespace impactx::xai {
namespace {

std::atomic<std::uint64_t> g_attribution_calls{0};

}  // namespace

const char* MethodName(AttributionMethod method) {
  switch (method) {
    case AttributionMethod::kExactShapley: return "exact_shapley";
    case AttributionMethod::kKernelShap: return "kernel_shap";
    case AttributionMethod::kIntegratedGradients: return "integrated_gradients";
    case AttributionMethod::kGradientTimesInput: return "gradient_x_input";
  }
  return "?";
}

AttributionMethod ParseMethod(const std::string& name) {
  if (name == "exact_shapley") return AttributionMethod::kExactShapley;
  if (name == "kernel_shap") return AttributionMethod::kKernelShap;
  if (name == "integrated_gradients") return AttributionMethod::kIntegratedGradients;
  if (name == "gradient_x_input") return AttributionMethod::kGradientTimesInput;
  throw ConfigError("xai.method", "unknown attribution method '" + name + "'");
}

const char* TargetPolicyName(TargetPolicy policy) {
  return policy == TargetPolicy::kTrueClass ? "true_class" : "predicted_class";
}

TargetPolicy ParseTargetPolicy(const std::string& name) {
  if (name == "true_class") return TargetPolicy::kTrueClass;
  if (name == "predicted_class") return TargetPolicy::kPredictedClass;
  throw ConfigError("xai.target_policy", "unknown target policy '" + name + "'");
}

AttributionMap AttributionMap::Normalized() const {
  AttributionMap out = *this;
  float scale = 0.0f;
  for (float v : values) scale = std::max(scale, std::fabs(v));
  out.raw_scale = scale;
  if (scale > 0.0f) {
    for (float& v : out.values) v /= scale;
  }
  return out;
}

std::uint64_t AttributionCallCount() { return g_attribution_calls.load(); }

namespace internal {
void CountAttributionCall() { g_attribution_calls.fetch_add(1); }
}  // namespace internal

}  // namespace impactx::xai

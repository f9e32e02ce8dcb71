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

#include "impactx/xai/gradients.h"

#include "impactx/errors.h"

namespace impactx::xai {

ClassLogitScore::ClassLogitScore(const model::BaseClassifier& model, int target_class)
    : model_(model), target_class_(target_class) {
  if (target_class < 0 || target_class >= model.num_classes()) {
    throw InputError("target class " + std::to_string(target_class) + " out of range");
  }
}

double ClassLogitScore::Value(std::span<const float> x) const {
  return model_.PredictLogits(x)[target_class_];
}

std::vector<float> ClassLogitScore::Gradient(std::span<const float> x) const {
  return model_.ClassScoreGradient(x, target_class_);
}

std::vector<double> IntegratedGradientsPerFeature(const DifferentiableScore& f,
                                                  std::span<const float> x,
                                                  std::span<const float> baseline,
                                                  int steps) {
  internal::CountAttributionCall();
  if (steps < 1) throw InputError("integrated gradients needs steps >= 1");
  if (x.size() != baseline.size()) throw InputError("input/baseline size mismatch");
  std::vector<double> avg(x.size(), 0.0);
  std::vector<float> point(x.size());
  for (int t = 1; t <= steps; ++t) {
    const float alpha = static_cast<float>((t - 0.5) / steps);
    for (std::size_t i = 0; i < x.size(); ++i) {
      point[i] = baseline[i] + alpha * (x[i] - baseline[i]);
    }
    const auto g = f.Gradient(point);
    for (std::size_t i = 0; i < x.size(); ++i) avg[i] += g[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    avg[i] = (static_cast<double>(x[i]) - baseline[i]) * avg[i] / steps;
  }
  return avg;
}

std::vector<double> GradientTimesInputPerFeature(const DifferentiableScore& f,
                                                 std::span<const float> x,
                                                 std::span<const float> baseline) {
  internal::CountAttributionCall();
  if (x.size() != baseline.size()) throw InputError("input/baseline size mismatch");
  const auto g = f.Gradient(x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (static_cast<double>(x[i]) - baseline[i]) * g[i];
  }
  return out;
}

namespace {

AttributionMap GroupMap(const data::Sample& x, int target, AttributionMethod method,
                        const BaselineSpec& baseline, const FeatureGrouping& grouping,
                        const std::vector<double>& per_feature) {
  const auto grouped = grouping.GroupSum(per_feature);
  AttributionMap map;
  map.sample_id = x.id;
  map.target_class = target;
  map.method = method;
  map.baseline_ref = baseline.Digest();
  map.values.assign(grouped.begin(), grouped.end());
  return map;
}

}  // namespace

AttributionMap IntegratedGradients(const model::BaseClassifier& model,
                                   const data::Sample& x, const BaselineSpec& baseline,
                                   const FeatureGrouping& grouping, int target_class,
                                   int steps) {
  if (steps < kMinIntegrationSteps) {
    throw ConfigError("xai.ig_steps", "must be >= " + std::to_string(kMinIntegrationSteps));
  }
  ClassLogitScore f(model, target_class);
  return GroupMap(x, target_class, AttributionMethod::kIntegratedGradients, baseline,
                  grouping,
                  IntegratedGradientsPerFeature(f, x.features, baseline.reference, steps));
}

AttributionMap GradientTimesInput(const model::BaseClassifier& model,
                                  const data::Sample& x, const BaselineSpec& baseline,
                                  const FeatureGrouping& grouping, int target_class) {
  ClassLogitScore f(model, target_class);
  return GroupMap(x, target_class, AttributionMethod::kGradientTimesInput, baseline,
                  grouping, GradientTimesInputPerFeature(f, x.features, baseline.reference));
}

}  // namespace impactx::xai

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

#ifndef IMPACTX_XAI_SHAPLEY_H_
#define IMPACTX_XAI_SHAPLEY_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "impactx/model/base_classifier.h"
#include "impactx/xai/attribution.h"
#include "impactx/xai/grouping.h"

namespace impactx::xai {

// Value of a coalition; bit i of the mask set means group i is present.
using CoalitionValue = std::function<double(std::uint64_t coalition)>;

inline constexpr int kMaxExactGroups = 14;
inline constexpr int kMaxKernelGroups = 62;

// Brute-force Shapley values over all 2^G coalitions. Throws CapacityError
// for G > kMaxExactGroups.
std::vector<double> ExactShapley(const CoalitionValue& v, int num_groups);

// 2^G - 2: every coalition except the empty and the full one.
std::size_t FullEnumerationBudget(int num_groups);

struct WeightedCoalition {
  std::uint64_t mask = 0;
  double weight = 0.0;
};

// Coalitions for KernelSHAP, drawn without replacement and stratified by
// subset size. Size pairs (s, G - s) are enumerated completely in order of
// decreasing kernel weight while the budget allows; the rest of the budget
// is split over the remaining sizes in proportion to their kernel mass and
// filled by uniform draws, each paired with its complement. Enumerated
// coalitions carry the Shapley kernel weight; sampled ones carry their
// size's kernel mass divided by the draw count.
std::vector<WeightedCoalition> SampleCoalitions(int num_groups, std::size_t budget,
                                                std::uint64_t seed);

// Constrained weighted least squares over the sampled coalitions with the
// intercept pinned to v(empty) and the sum of attributions pinned to
// v(full) - v(empty). With budget = FullEnumerationBudget(G) the result is
// the exact Shapley vector. Throws ConfigError for budgets below G + 2
// (unless full enumeration) and DegenerateDesignError for a singular
// design.
std::vector<double> KernelShap(const CoalitionValue& v, int num_groups,
                               std::size_t num_coalitions, std::uint64_t seed);

// v(S) = target-class logit of the hybrid input that keeps x on the groups
// in S and the baseline elsewhere.
class ModelCoalitionValue {
 public:
  ModelCoalitionValue(const model::BaseClassifier& model, std::span<const float> x,
                      const BaselineSpec& baseline, const FeatureGrouping& grouping,
                      int target_class);

  double operator()(std::uint64_t coalition) const;
  std::size_t evaluations() const { return evaluations_; }
  CoalitionValue AsFunction() const {
    return [this](std::uint64_t c) { return (*this)(c); };
  }

 private:
  const model::BaseClassifier& model_;
  std::span<const float> x_;
  const BaselineSpec& baseline_;
  const FeatureGrouping& grouping_;
  int target_class_;
  mutable std::size_t evaluations_ = 0;
  mutable std::vector<float> hybrid_;
  mutable nn::Activations acts_;
};

// Raw (unnormalized) group attributions of M for one sample.
AttributionMap ExactShapleyMap(const model::BaseClassifier& model, const data::Sample& x,
                               const BaselineSpec& baseline,
                               const FeatureGrouping& grouping, int target_class,
                               std::size_t* evaluations = nullptr);
AttributionMap KernelShapMap(const model::BaseClassifier& model, const data::Sample& x,
                             const BaselineSpec& baseline, const FeatureGrouping& grouping,
                             int target_class, std::size_t num_coalitions,
                             std::uint64_t seed, std::size_t* evaluations = nullptr);

}  // namespace impactx::xai

#endif  // IMPACTX_XAI_SHAPLEY_H_

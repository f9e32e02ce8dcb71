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

#ifndef IMPACTX_XAI_EXPLAIN_H_
#define IMPACTX_XAI_EXPLAIN_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "impactx/data/dataset.h"
#include "impactx/errors.h"
#include "impactx/model/base_classifier.h"
#include "impactx/xai/attribution.h"
#include "impactx/xai/grouping.h"

namespace impactx::xai {

struct ExplainOptions {
  AttributionMethod method = AttributionMethod::kKernelShap;
  TargetPolicy policy = TargetPolicy::kTrueClass;
  // KernelSHAP coalition budget; 510 is full enumeration for a 3x3 grid.
  std::size_t budget = 510;
  int ig_steps = 64;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> cache_dir;
  // Serve only from the cache; any miss throws CacheMissError.
  bool cache_only = false;
  int workers = 1;
};

struct ExplainStats {
  std::size_t samples = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::size_t value_evaluations = 0;
  std::size_t gradient_evaluations = 0;
  std::vector<std::string> warnings;
};

struct ExplanationSet {
  // Normalized to max |value| = 1, aligned with the dataset order.
  std::vector<AttributionMap> maps;
  ExplainStats stats;
  // Cache-key digests in dataset order.
  std::vector<std::string> cache_keys;
};

class CacheMissError : public Error {
 public:
  using Error::Error;
};

// One explanation per sample of D. With a cache directory, results are keyed
// by (model hash, sample id, method, policy, resolved target, baseline,
// grouping, budget, seed); hits skip all model evaluations. Corrupt entries
// are recomputed and reported in stats.warnings. Results do not depend on
// `workers`.
ExplanationSet ExplainDataset(const model::BaseClassifier& model,
                              const data::LabeledDataset& dataset,
                              const BaselineSpec& baseline,
                              const FeatureGrouping& grouping,
                              const ExplainOptions& options);

// U carries no visible labels, so only the predicted-class policy is
// accepted; true_class throws ConfigError.
ExplanationSet ExplainDataset(const model::BaseClassifier& model,
                              const data::UnlabeledDataset& dataset,
                              const BaselineSpec& baseline,
                              const FeatureGrouping& grouping,
                              const ExplainOptions& options);

// Raw group attributions of one sample for an explicit target class.
AttributionMap ExplainSample(const model::BaseClassifier& model, const data::Sample& x,
                             int target_class, const BaselineSpec& baseline,
                             const FeatureGrouping& grouping, const ExplainOptions& options,
                             std::size_t* evaluations = nullptr);

}  // namespace impactx::xai

#endif  // IMPACTX_XAI_EXPLAIN_H_

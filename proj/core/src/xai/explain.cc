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

#include "impactx/xai/explain.h"

#include <thread>

#include "impactx/digest.h"
#include "impactx/xai/cache.h"
#include "impactx/xai/gradients.h"
#include "impactx/xai/shapley.h"

namespace impactx::xai {
namespace {

std::size_t EffectiveBudget(const ExplainOptions& o) {
  switch (o.method) {
    case AttributionMethod::kKernelShap: return o.budget;
    case AttributionMethod::kIntegratedGradients: return static_cast<std::size_t>(o.ig_steps);
    default: return 0;
  }
}

struct SampleOutcome {
  AttributionMap map;
  std::string key;
  bool hit = false;
  std::size_t value_evals = 0;
  std::size_t gradient_evals = 0;
  std::string warning;
};

SampleOutcome ExplainOne(const model::BaseClassifier& model, const data::Sample& x,
                         int target, const BaselineSpec& baseline,
                         const FeatureGrouping& grouping, const ExplainOptions& options,
                         const ExplanationCache* cache) {
  SampleOutcome out;
  CacheKey key{model.checkpoint_hash(),
               x.id,
               MethodName(options.method),
               TargetPolicyName(options.policy),
               target,
               baseline.Digest(),
               grouping.Digest(),
               EffectiveBudget(options),
               options.seed,
               grouping.num_groups()};
  out.key = key.Digest();
  if (cache) {
    auto lookup = cache->Get(key);
    if (lookup.status == ExplanationCache::Status::kHit) {
      out.hit = true;
      out.map.sample_id = x.id;
      out.map.target_class = target;
      out.map.method = options.method;
      out.map.baseline_ref = baseline.Digest();
      out.map.values = std::move(lookup.values);
      return out;
    }
    if (lookup.status == ExplanationCache::Status::kCorrupt) {
      out.warning = "cache entry for sample " + std::to_string(x.id) +
                    " failed integrity checks and was recomputed: " + lookup.detail;
    }
  }
  if (options.cache_only) {
    throw CacheMissError("no cached explanation for sample " + std::to_string(x.id));
  }
  if (options.method == AttributionMethod::kIntegratedGradients) {
    out.gradient_evals = static_cast<std::size_t>(options.ig_steps);
  } else if (options.method == AttributionMethod::kGradientTimesInput) {
    out.gradient_evals = 1;
  }
  out.map = ExplainSample(model, x, target, baseline, grouping, options, &out.value_evals);
  if (cache) cache->Put(key, out.map.values);
  return out;
}

ExplanationSet Run(const model::BaseClassifier& model,
                   const std::vector<data::Sample>& samples,
                   const std::vector<int>* labels, const BaselineSpec& baseline,
                   const FeatureGrouping& grouping, const ExplainOptions& options) {
  internal::CountAttributionCall();
  if (grouping.shape().numel() != model.network().input_size()) {
    throw ConfigError("xai.grouping", "grouping shape does not match the model input");
  }
  std::optional<ExplanationCache> cache;
  if (options.cache_dir) cache.emplace(*options.cache_dir);

  std::vector<int> targets(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    targets[i] = options.policy == TargetPolicy::kTrueClass
                     ? (*labels)[i]
                     : model.PredictLabel(samples[i]).label;
  }

  std::vector<SampleOutcome> outcomes(samples.size());
  const int workers = std::max(1, options.workers);
  auto work = [&](int w) {
    for (std::size_t i = w; i < samples.size(); i += workers) {
      outcomes[i] = ExplainOne(model, samples[i], targets[i], baseline, grouping, options,
                               cache ? &*cache : nullptr);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          work(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ExplanationSet set;
  set.stats.samples = samples.size();
  for (auto& o : outcomes) {
    if (o.hit) {
      ++set.stats.cache_hits;
    } else {
      ++set.stats.cache_misses;
    }
    set.stats.value_evaluations += o.value_evals;
    set.stats.gradient_evaluations += o.gradient_evals;
    if (!o.warning.empty()) set.stats.warnings.push_back(o.warning);
    set.cache_keys.push_back(o.key);
    set.maps.push_back(o.map.Normalized());
  }
  return set;
}

}  // namespace

AttributionMap ExplainSample(const model::BaseClassifier& model, const data::Sample& x,
                             int target_class, const BaselineSpec& baseline,
                             const FeatureGrouping& grouping, const ExplainOptions& options,
                             std::size_t* evaluations) {
  switch (options.method) {
    case AttributionMethod::kExactShapley:
      return ExactShapleyMap(model, x, baseline, grouping, target_class, evaluations);
    case AttributionMethod::kKernelShap:
      return KernelShapMap(model, x, baseline, grouping, target_class, options.budget,
                           MixSeed(options.seed, static_cast<std::uint64_t>(x.id)),
                           evaluations);
    case AttributionMethod::kIntegratedGradients:
      return IntegratedGradients(model, x, baseline, grouping, target_class,
                                 options.ig_steps);
    case AttributionMethod::kGradientTimesInput:
      return GradientTimesInput(model, x, baseline, grouping, target_class);
  }
  throw ConfigError("xai.method", "unsupported method");
}

ExplanationSet ExplainDataset(const model::BaseClassifier& model,
                              const data::LabeledDataset& dataset,
                              const BaselineSpec& baseline,
                              const FeatureGrouping& grouping,
                              const ExplainOptions& options) {
  return Run(model, dataset.samples(), &dataset.labels(), baseline, grouping, options);
}

ExplanationSet ExplainDataset(const model::BaseClassifier& model,
                              const data::UnlabeledDataset& dataset,
                              const BaselineSpec& baseline,
                              const FeatureGrouping& grouping,
                              const ExplainOptions& options) {
  if (options.policy == TargetPolicy::kTrueClass) {
    throw ConfigError("xai.target_policy",
                      "true_class needs labels; the dataset is unlabeled");
  }
  return Run(model, dataset.samples(), nullptr, baseline, grouping, options);
}

}  // namespace impactx::xai

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

#include "impactx/strategy/predictor.h"

#include <map>

#include "impactx/errors.h"

namespace impactx::strategy {

std::vector<std::vector<float>> AlignExplanations(const data::LabeledDataset& dataset,
                                                  const std::vector<xai::AttributionMap>& maps) {
  std::map<std::int64_t, const xai::AttributionMap*> by_id;
  for (const auto& m : maps) {
    if (!by_id.emplace(m.sample_id, &m).second) {
      throw ConsistencyError("explanation for sample " + std::to_string(m.sample_id) +
                             " appears twice");
    }
    if (m.values.size() != maps.front().values.size()) {
      throw ConsistencyError("explanations differ in shape");
    }
  }
  std::vector<std::vector<float>> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples()) {
    auto it = by_id.find(s.id);
    if (it == by_id.end()) {
      throw ConsistencyError("no explanation for sample " + std::to_string(s.id));
    }
    out.push_back(it->second->values);
  }
  return out;
}

double MeanSquaredDistance(const std::vector<std::vector<float>>& a,
                           const std::vector<std::vector<float>>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw ConsistencyError("paired rows required for a mean squared distance");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) throw ConsistencyError("row length mismatch");
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      const double d = static_cast<double>(a[i][j]) - b[i][j];
      total += d * d;
    }
  }
  return total / static_cast<double>(a.size());
}

ImpactxPredictor::ImpactxPredictor(std::shared_ptr<const model::BaseClassifier> model,
                                   nn::Network encoder, nn::Network decoder,
                                   fusion::FusionClassifier classifier, std::string strategy)
    : model_(std::move(model)),
      encoder_(std::move(encoder)),
      decoder_(std::move(decoder)),
      classifier_(std::move(classifier)),
      strategy_(std::move(strategy)) {
  const std::size_t K = static_cast<std::size_t>(model_->num_classes());
  const std::size_t latent = encoder_.output_size();
  if (classifier_.input_dim() != latent + K ||
      classifier_.num_classes() != model_->num_classes()) {
    throw ConfigError("fusion", "C expects input " + std::to_string(classifier_.input_dim()) +
                                    " but latent_dim + K = " + std::to_string(latent + K));
  }
  if (decoder_.input_size() != latent) {
    throw ConfigError("strategy.latent_dim", "decoder input differs from encoder output");
  }
  if (encoder_.input_size() != model_->network().input_size()) {
    throw ConfigError("strategy", "encoder input shape differs from M's input shape");
  }
}

std::vector<float> ImpactxPredictor::LatentCode(const data::Sample& x) const {
  if (x.features.size() != encoder_.input_size()) {
    throw InputError("sample has " + std::to_string(x.features.size()) +
                     " features, encoder expects " + std::to_string(encoder_.input_size()));
  }
  return encoder_.Predict(x.features);
}

nn::Prediction ImpactxPredictor::Predict(const data::Sample& x) const {
  const auto z = LatentCode(x);
  const auto logits = model_->PredictLogits(x);
  return classifier_.FusePredict(z, logits);
}

std::vector<float> ImpactxPredictor::ReconstructExplanation(const data::Sample& x) const {
  return decoder_.Predict(LatentCode(x));
}

}  // namespace impactx::strategy

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

#ifndef IMPACTX_STRATEGY_PREDICTOR_H_
#define IMPACTX_STRATEGY_PREDICTOR_H_

#include <memory>
#include <string>
#include <vector>

#include "impactx/data/dataset.h"
#include "impactx/fusion/fusion_classifier.h"
#include "impactx/model/base_classifier.h"
#include "impactx/nn/network.h"
#include "impactx/nn/ops.h"
#include "impactx/xai/attribution.h"

namespace impactx::strategy {

// Returns the explanation values for every sample of `dataset`, in dataset
// order, looked up by sample id. Extra maps are ignored; a missing or
// duplicated id, or maps of differing length, throw ConsistencyError.
std::vector<std::vector<float>> AlignExplanations(const data::LabeledDataset& dataset,
                                                  const std::vector<xai::AttributionMap>& maps);

// Mean over rows of the squared Euclidean distance between paired rows.
double MeanSquaredDistance(const std::vector<std::vector<float>>& a,
                           const std::vector<std::vector<float>>& b);

// Anything that maps a sample to a class distribution over K classes.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual int num_classes() const = 0;
  virtual nn::Prediction Predict(const data::Sample& x) const = 0;
};

// The frozen classifier M on its own.
class BaselinePredictor : public Predictor {
 public:
  explicit BaselinePredictor(std::shared_ptr<const model::BaseClassifier> model)
      : model_(std::move(model)) {}

  int num_classes() const override { return model_->num_classes(); }
  nn::Prediction Predict(const data::Sample& x) const override {
    return model_->PredictLabel(x);
  }

 private:
  std::shared_ptr<const model::BaseClassifier> model_;
};

// The assembled pipeline: an encoder maps x to a latent code, C fuses that
// code with M's logits, and a decoder turns the code back into a group-level
// explanation. Both strategies produce this shape of predictor; inference
// needs neither labels nor attribution computations.
class ImpactxPredictor : public Predictor {
 public:
  ImpactxPredictor(std::shared_ptr<const model::BaseClassifier> model, nn::Network encoder,
                   nn::Network decoder, fusion::FusionClassifier classifier,
                   std::string strategy);

  int num_classes() const override { return model_->num_classes(); }
  std::size_t latent_dim() const { return classifier_.latent_dim(); }
  std::size_t explanation_size() const { return decoder_.output_size(); }
  const std::string& strategy() const { return strategy_; }

  std::vector<float> LatentCode(const data::Sample& x) const;
  nn::Prediction Predict(const data::Sample& x) const override;
  std::vector<float> ReconstructExplanation(const data::Sample& x) const;

  const model::BaseClassifier& base_model() const { return *model_; }
  const nn::Network& encoder() const { return encoder_; }
  const nn::Network& decoder() const { return decoder_; }
  const fusion::FusionClassifier& classifier() const { return classifier_; }

 private:
  std::shared_ptr<const model::BaseClassifier> model_;
  nn::Network encoder_;
  nn::Network decoder_;
  fusion::FusionClassifier classifier_;
  std::string strategy_;
};

}  // namespace impactx::strategy

#endif  // IMPACTX_STRATEGY_PREDICTOR_H_

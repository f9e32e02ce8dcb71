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

#ifndef IMPACTX_STRATEGY_ENCODER_DECODER_H_
#define IMPACTX_STRATEGY_ENCODER_DECODER_H_

#include <filesystem>
#include <memory>
#include <vector>

#include "impactx/data/dataset.h"
#include "impactx/fusion/fusion_classifier.h"
#include "impactx/model/base_classifier.h"
#include "impactx/nn/network.h"
#include "impactx/nn/trainer.h"
#include "impactx/strategy/autoencoder.h"
#include "impactx/strategy/predictor.h"
#include "impactx/xai/attribution.h"

namespace impactx::strategy {

struct JointLossWeights {
  double lambda_recon = 1.0;
  double lambda_cls = 1.0;

  // Throws ConfigError when a weight is negative or both are zero.
  void Validate() const;
};

// LEP (convolutional backbone with a latent head) and Dec (mirror dense stack
// back to the explanation length).
struct ExplanationEncoderDecoder {
  nn::Network encoder;
  nn::Network decoder;

  std::size_t latent_dim() const { return encoder.output_size(); }
  std::size_t explanation_size() const { return decoder.output_size(); }
};

ExplanationEncoderDecoder MakeEncoderDecoder(const data::Shape3& shape, std::size_t latent_dim,
                                             std::size_t explanation_size);

struct JointTrainingResult {
  ExplanationEncoderDecoder model;
  fusion::FusionClassifier classifier;
  nn::TrainingHistory history;
  // Digests right after initialization, for zero-weight isolation checks.
  std::string initial_encoder_digest;
  std::string initial_decoder_digest;
  std::string initial_classifier_digest;
};

struct EdStrategyOptions {
  std::size_t latent_dim = kDefaultLatentDim;
  JointLossWeights weights;
  fusion::FusionOptions fusion;
  nn::TrainConfig train;
};

// Minimizes lambda_recon * MSE(Dec(LEP(x)), e_x) + lambda_cls *
// CE(C(LEP(x), M(x)), y) with one optimizer over LEP, Dec and C. A branch
// whose weight is zero is not evaluated during training. M stays frozen;
// IntegrityError is thrown if its parameters change.
JointTrainingResult TrainJoint(const data::LabeledDataset& train,
                               const std::vector<xai::AttributionMap>& train_maps,
                               const data::LabeledDataset& val,
                               const std::vector<xai::AttributionMap>& val_maps,
                               const model::BaseClassifier& model,
                               const EdStrategyOptions& options);

// Per-epoch {epoch, recon_loss, cls_loss, total_loss, val_metrics} records.
nlohmann::json JointHistoryJson(const nn::TrainingHistory& history);

// predict(x) = C(LEP(x), M(x)); reconstruct_explanation(x) = Dec(LEP(x)).
ImpactxPredictor AssembleEdPipeline(std::shared_ptr<const model::BaseClassifier> model,
                                    const ExplanationEncoderDecoder& encoder_decoder,
                                    fusion::FusionClassifier classifier);

void SaveEncoderDecoder(const ExplanationEncoderDecoder& encoder_decoder,
                        const std::filesystem::path& path);
ExplanationEncoderDecoder LoadEncoderDecoder(const std::filesystem::path& path);

}  // namespace impactx::strategy

#endif  // IMPACTX_STRATEGY_ENCODER_DECODER_H_

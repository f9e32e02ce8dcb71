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

#ifndef IMPACTX_STRATEGY_AUTOENCODER_H_
#define IMPACTX_STRATEGY_AUTOENCODER_H_

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "impactx/data/dataset.h"
#include "impactx/fusion/fusion_classifier.h"
#include "impactx/model/base_classifier.h"
#include "impactx/nn/network.h"
#include "impactx/nn/trainer.h"
#include "impactx/strategy/predictor.h"
#include "impactx/xai/attribution.h"

namespace impactx::strategy {

inline constexpr float kLeakySlope = 0.01f;
inline constexpr std::size_t kDefaultLatentDim = 32;

// Dense 256 -> 64 -> latent with leaky ReLU on all but the last layer.
nn::Network MakeExplanationEncoder(std::size_t input_dim, std::size_t latent_dim);
// Mirror image: latent -> 64 -> 256 -> output.
nn::Network MakeExplanationDecoder(std::size_t latent_dim, std::size_t output_dim);

// E_A and D_A over group-level explanation vectors.
class ExplanationAutoencoder {
 public:
  ExplanationAutoencoder() = default;
  ExplanationAutoencoder(nn::Network encoder, nn::Network decoder, double best_val_loss = 0.0,
                         nn::TrainingHistory history = {});

  std::size_t input_dim() const { return encoder_.input_size(); }
  std::size_t latent_dim() const { return encoder_.output_size(); }
  double best_val_loss() const { return best_val_loss_; }
  const nn::TrainingHistory& history() const { return history_; }
  const nn::Network& encoder() const { return encoder_; }
  const nn::Network& decoder() const { return decoder_; }

  std::vector<float> Encode(std::span<const float> explanation) const;
  std::vector<float> Decode(std::span<const float> code) const;

 private:
  nn::Network encoder_;
  nn::Network decoder_;
  double best_val_loss_ = 0.0;
  nn::TrainingHistory history_;
};

// Minimizes mean squared reconstruction error on a seeded 10% holdout split;
// returns the parameters with the best holdout loss. Requires at least
// latent_dim + 1 explanations of equal length.
ExplanationAutoencoder TrainAutoencoder(const std::vector<std::vector<float>>& explanations,
                                        std::size_t latent_dim, const nn::TrainConfig& config);
ExplanationAutoencoder TrainAutoencoder(const std::vector<xai::AttributionMap>& explanations,
                                        std::size_t latent_dim, const nn::TrainConfig& config);

// F: the convolutional backbone with a latent-width head, independently
// initialized.
nn::Network MakeAttributionEncoder(const data::Shape3& shape, std::size_t latent_dim);

struct AttributionEncoderResult {
  nn::Network network;
  nn::TrainingHistory history;
};

// Regresses F(x) onto fixed targets z_x (best validation parameters kept).
AttributionEncoderResult TrainAttributionEncoder(const data::LabeledDataset& train,
                                                 const std::vector<std::vector<float>>& train_z,
                                                 const data::LabeledDataset& val,
                                                 const std::vector<std::vector<float>>& val_z,
                                                 const nn::TrainConfig& config);
// Computes z_x = E_A(e_x) once up front from id-aligned explanations.
AttributionEncoderResult TrainAttributionEncoder(
    const data::LabeledDataset& train, const std::vector<xai::AttributionMap>& train_maps,
    const data::LabeledDataset& val, const std::vector<xai::AttributionMap>& val_maps,
    const ExplanationAutoencoder& autoencoder, const nn::TrainConfig& config);

struct AeStrategyOptions {
  std::size_t latent_dim = kDefaultLatentDim;
  nn::TrainConfig autoencoder_train;
  nn::TrainConfig encoder_train;
  nn::TrainConfig fusion_train;
  fusion::FusionOptions fusion;
  // Optionally continue training C on F(x) inputs after the literal step.
  bool fine_tune = false;
  int fine_tune_epochs = 5;
};

struct AeStrategyResult {
  ExplanationAutoencoder autoencoder;
  nn::Network attribution_encoder;
  nn::TrainingHistory encoder_history;
  fusion::FusionClassifier classifier;
  nn::TrainingHistory fusion_history;
  nn::TrainingHistory fine_tune_history;
  std::vector<std::string> step_order;
  // Mean ||F(x) - E_A(e_x)||^2 on training and validation data.
  double distill_train_mse = 0.0;
  double distill_val_mse = 0.0;
  std::vector<std::string> warnings;
  // Which latent codes C was trained on, and a digest of those inputs.
  std::string fusion_input_source;
  std::string fusion_train_inputs_digest;
};

// Steps 2-4 of the autoencoder strategy (step 1 supplies the explanations):
// autoencoder, attribution encoder, then C on concat(E_A(e_x), M(x)).
// Throws IntegrityError if M's parameters change during the run.
AeStrategyResult RunAutoencoderStrategy(const model::BaseClassifier& model,
                                        const data::LabeledDataset& train,
                                        const std::vector<xai::AttributionMap>& train_maps,
                                        const data::LabeledDataset& val,
                                        const std::vector<xai::AttributionMap>& val_maps,
                                        const AeStrategyOptions& options);

// Digest of a list of fused input rows (used to audit C's training inputs).
std::string RowsDigest(const std::vector<std::vector<float>>& rows);

// predict(x) = C(F(x), M(x)); reconstruct_explanation(x) = D_A(F(x)).
ImpactxPredictor AssembleAePipeline(std::shared_ptr<const model::BaseClassifier> model,
                                    nn::Network attribution_encoder,
                                    const ExplanationAutoencoder& autoencoder,
                                    fusion::FusionClassifier classifier);

void SaveAutoencoder(const ExplanationAutoencoder& autoencoder,
                     const std::filesystem::path& path);
ExplanationAutoencoder LoadAutoencoder(const std::filesystem::path& path);
void SaveAttributionEncoder(const nn::Network& encoder, const std::filesystem::path& path);
nn::Network LoadAttributionEncoder(const std::filesystem::path& path);

}  // namespace impactx::strategy

#endif  // IMPACTX_STRATEGY_AUTOENCODER_H_

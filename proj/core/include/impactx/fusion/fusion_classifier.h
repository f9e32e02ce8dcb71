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

#ifndef IMPACTX_FUSION_FUSION_CLASSIFIER_H_
#define IMPACTX_FUSION_FUSION_CLASSIFIER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "impactx/nn/network.h"
#include "impactx/nn/ops.h"
#include "impactx/nn/trainer.h"

namespace impactx::fusion {

// Which form of M's output is concatenated after the latent code.
enum class LogitMode { kRawLogits, kSoftmaxProbs };
enum class FusionArchitecture { kMlp, kLinear };

const char* LogitModeName(LogitMode mode);
LogitMode ParseLogitMode(const std::string& name);
const char* ArchitectureName(FusionArchitecture arch);
FusionArchitecture ParseArchitecture(const std::string& name);

struct FusionOptions {
  LogitMode logit_mode = LogitMode::kRawLogits;
  FusionArchitecture architecture = FusionArchitecture::kMlp;
  std::size_t hidden_units = 64;
};

// concat(z, m') with m' = logits or softmax(logits) per `mode`; z first.
std::vector<float> MakeFusedInput(std::span<const float> z,
                                  std::span<const float> logits, LogitMode mode);

// The simple classifier C: dense(latent + K -> 64) + leaky ReLU(0.01) ->
// dense(64 -> K), or a single dense layer for the linear variant.
class FusionClassifier {
 public:
  FusionClassifier() = default;
  FusionClassifier(std::size_t latent_dim, int num_classes, const FusionOptions& options);

  std::size_t latent_dim() const { return latent_dim_; }
  int num_classes() const { return num_classes_; }
  std::size_t input_dim() const { return latent_dim_ + static_cast<std::size_t>(num_classes_); }
  const FusionOptions& options() const { return options_; }
  const nn::Network& network() const { return network_; }
  nn::Network& mutable_network() { return network_; }

  // Output logits for an already fused input.
  std::vector<float> Logits(std::span<const float> fused) const;
  // Applies the logit mode, stabilized softmax and lowest-index argmax.
  nn::Prediction FusePredict(std::span<const float> z, std::span<const float> logits) const;

  nlohmann::json Metadata() const;
  static FusionClassifier FromMetadata(const nlohmann::json& metadata, nn::Network network);

 private:
  std::size_t latent_dim_ = 0;
  int num_classes_ = 0;
  FusionOptions options_;
  nn::Network network_;
};

struct FusionTrainingResult {
  FusionClassifier classifier;
  nn::TrainingHistory history;
};

// Cross-entropy training of C on fused inputs. Throws ConfigError when the
// training labels do not cover all K classes or dimensions disagree.
FusionTrainingResult TrainFusion(const std::vector<std::vector<float>>& train_inputs,
                                 const std::vector<int>& train_labels,
                                 const std::vector<std::vector<float>>& val_inputs,
                                 const std::vector<int>& val_labels, std::size_t latent_dim,
                                 int num_classes, const FusionOptions& options,
                                 const nn::TrainConfig& config);

// Continues training an existing C (used for the optional fine-tune on F(x)).
FusionTrainingResult ContinueFusion(FusionClassifier classifier,
                                    const std::vector<std::vector<float>>& train_inputs,
                                    const std::vector<int>& train_labels,
                                    const std::vector<std::vector<float>>& val_inputs,
                                    const std::vector<int>& val_labels,
                                    const nn::TrainConfig& config);

void SaveFusion(const FusionClassifier& classifier, const std::filesystem::path& path);
FusionClassifier LoadFusion(const std::filesystem::path& path);

}  // namespace impactx::fusion

#endif  // IMPACTX_FUSION_FUSION_CLASSIFIER_H_

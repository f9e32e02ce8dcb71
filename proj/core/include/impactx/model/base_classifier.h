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

#ifndef IMPACTX_MODEL_BASE_CLASSIFIER_H_
#define IMPACTX_MODEL_BASE_CLASSIFIER_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "impactx/data/dataset.h"
#include "impactx/nn/network.h"
#include "impactx/nn/ops.h"
#include "impactx/nn/trainer.h"

namespace impactx::model {

// conv 8@3x3 + ReLU -> maxpool 2x2 -> conv 16@3x3 + ReLU -> maxpool 2x2 ->
// dense(output_units). Shared by M, the attribution encoder F and the
// encoder-decoder's encoder.
nn::Network MakeBackbone(const data::Shape3& input, std::size_t output_units);

// The pre-trained classifier M. Parameters are fixed at construction; the
// class exposes no mutating operation, so checkpoint_hash() is stable for
// the object's lifetime.
class BaseClassifier {
 public:
  BaseClassifier(nn::Network network, int num_classes, bool frozen,
                 nn::TrainingHistory history = {});

  int num_classes() const { return num_classes_; }
  data::Shape3 input_shape() const;
  bool frozen() const { return frozen_; }
  const std::string& checkpoint_hash() const { return hash_; }
  const nn::Network& network() const { return network_; }
  const nn::TrainingHistory& history() const { return history_; }

  // Recomputes the parameter digest; equal to checkpoint_hash() unless memory
  // was corrupted behind the API.
  std::string RecomputeHash() const { return network_.Digest(); }

  std::vector<float> PredictLogits(std::span<const float> x) const;
  std::vector<float> PredictLogits(const data::Sample& x) const {
    return PredictLogits(x.features);
  }
  nn::Prediction PredictLabel(const data::Sample& x) const;

  // d logit[target_class] / d x, pre-softmax.
  std::vector<float> ClassScoreGradient(std::span<const float> x, int target_class) const;
  // d (sum_k weights[k] * logit[k]) / d x.
  std::vector<float> ScoreGradient(std::span<const float> x,
                                   std::span<const float> class_weights) const;

 private:
  void CheckInput(std::span<const float> x) const;

  nn::Network network_;
  int num_classes_ = 0;
  bool frozen_ = false;
  std::string hash_;
  nn::TrainingHistory history_;
};

// Trains M with Adam on softmax cross-entropy, restores the best-validation
// parameters and returns the model frozen.
BaseClassifier Pretrain(const data::LabeledDataset& train,
                        const data::LabeledDataset& val, const nn::TrainConfig& config);

void SaveCheckpoint(const BaseClassifier& model, const std::filesystem::path& path);
BaseClassifier LoadCheckpoint(const std::filesystem::path& path);

}  // namespace impactx::model

#endif  // IMPACTX_MODEL_BASE_CLASSIFIER_H_

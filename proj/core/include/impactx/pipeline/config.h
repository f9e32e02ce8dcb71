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

#ifndef IMPACTX_PIPELINE_CONFIG_H_
#define IMPACTX_PIPELINE_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>

#include "impactx/data/synthetic.h"
#include "impactx/fusion/fusion_classifier.h"
#include "impactx/nn/trainer.h"
#include "impactx/strategy/encoder_decoder.h"
#include "impactx/xai/attribution.h"
#include "impactx/xai/grouping.h"
#include "json.hpp"

namespace impactx::pipeline {

struct DatasetConfig {
  std::string source = "synthetic";  // "synthetic" or "idx"
  data::PatchDatasetOptions synthetic;
  // IDX sources: D from the train pair, U from the eval pair.
  std::string train_images, train_labels, eval_images, eval_labels;
  double val_fraction = 0.1;
};

struct XaiConfig {
  xai::AttributionMethod method = xai::AttributionMethod::kKernelShap;
  xai::TargetPolicy target_policy = xai::TargetPolicy::kTrueClass;
  int grid_rows = 3;
  int grid_cols = 3;
  xai::BaselineMode baseline = xai::BaselineMode::kDatasetMean;
  // Coalition budget for kernel_shap; 0 means full enumeration.
  std::size_t budget = 0;
  int ig_steps = 64;
  int workers = 1;
};

struct StrategyConfig {
  std::size_t latent_dim = strategy::kDefaultLatentDim;
  strategy::JointLossWeights weights;
  bool fine_tune = false;
  int fine_tune_epochs = 5;
  nn::TrainConfig autoencoder_train;
  nn::TrainConfig encoder_train;
  nn::TrainConfig fusion_train;
  nn::TrainConfig joint_train;
};

struct EvalConfig {
  // Held-out samples used for explanation-similarity statistics.
  int similarity_samples = 200;
  int topk = 3;
  // Corrected samples rendered as saliency images.
  int saliency_count = 4;
};

// A fully resolved experiment description. Unknown keys are rejected and
// every error names the offending field path.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  DatasetConfig dataset;
  nn::TrainConfig model;
  XaiConfig xai;
  StrategyConfig strategy;
  fusion::FusionOptions fusion;
  EvalConfig eval;
  double impactx_train_fraction = 1.0;

  static ExperimentConfig FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
  std::string Digest() const;
};

}  // namespace impactx::pipeline

#endif  // IMPACTX_PIPELINE_CONFIG_H_

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

#ifndef IMPACTX_NN_TRAINER_H_
#define IMPACTX_NN_TRAINER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace impactx::nn {

struct TrainConfig {
  int epochs = 10;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double decay1 = 0.9;
  double decay2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  // Epochs without validation-loss improvement before stopping.
  int early_stop_patience = 5;

  // Throws ConfigError with `path` prefixed to the field name.
  void Validate(const std::string& path = "train") const;
  nlohmann::json ToJson() const;
  // Missing keys keep the values of `defaults`.
  static TrainConfig FromJson(const nlohmann::json& j, const std::string& path);
  static TrainConfig FromJson(const nlohmann::json& j, const std::string& path,
                              const TrainConfig& defaults);
};

// A parameter block and its gradient buffer of equal size.
struct ParamGroup {
  std::string name;
  std::span<float> params;
  std::span<float> grads;
};

// Adaptive-moment optimizer over several parameter groups.
class Adam {
 public:
  Adam(const TrainConfig& config, std::vector<ParamGroup> groups);

  void ZeroGrad();
  // Applies one update using grads * grad_scale.
  void Step(float grad_scale);

 private:
  TrainConfig config_;
  std::vector<ParamGroup> groups_;
  std::vector<std::vector<float>> m_, v_;
  long step_ = 0;
};

// Sums over the samples of one minibatch.
struct BatchResult {
  double loss = 0.0;
  std::size_t correct = 0;
  std::map<std::string, double> terms;
};

// Means over the validation set.
struct ValidationResult {
  double loss = 0.0;
  double accuracy = 0.0;
  std::map<std::string, double> terms;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  std::map<std::string, double> train_terms;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  std::map<std::string, double> val_terms;
  std::string params_digest;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  bool stopped_early = false;

  nlohmann::json ToJson() const;
};

// Accumulates gradient sums for the sample indices in `batch` into the
// groups' grad buffers (already zeroed) and returns the loss sums.
using BatchFn = std::function<BatchResult(std::span<const std::size_t> batch)>;
using ValidateFn = std::function<ValidationResult()>;

// Minibatch training loop: seeded shuffling, Adam, early stopping on the
// validation loss and restoration of the best-validation parameters.
// A non-finite loss or loss term throws TrainingError naming the epoch,
// batch and term.
TrainingHistory Fit(const TrainConfig& config, std::size_t num_train,
                    const std::vector<ParamGroup>& groups, const BatchFn& batch_fn,
                    const ValidateFn& validate_fn);

}  // namespace impactx::nn

#endif  // IMPACTX_NN_TRAINER_H_

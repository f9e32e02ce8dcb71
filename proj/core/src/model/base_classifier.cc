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

#include "impactx/model/base_classifier.h"

#include "impactx/digest.h"
#include "impactx/errors.h"
#include "impactx/model/checkpoint.h"

namespace impactx::model {

nn::Network MakeBackbone(const data::Shape3& input, std::size_t output_units) {
  return nn::Network({input.channels, input.height, input.width},
                     {nn::LayerSpec::Conv3x3(8), nn::LayerSpec::Relu(),
                      nn::LayerSpec::MaxPool2(), nn::LayerSpec::Conv3x3(16),
                      nn::LayerSpec::Relu(), nn::LayerSpec::MaxPool2(),
                      nn::LayerSpec::Dense(output_units)});
}

BaseClassifier::BaseClassifier(nn::Network network, int num_classes, bool frozen,
                               nn::TrainingHistory history)
    : network_(std::move(network)),
      num_classes_(num_classes),
      frozen_(frozen),
      history_(std::move(history)) {
  if (num_classes_ < 1 || network_.output_size() != static_cast<std::size_t>(num_classes_)) {
    throw ConsistencyError("classifier output size must equal num_classes");
  }
  hash_ = network_.Digest();
}

data::Shape3 BaseClassifier::input_shape() const {
  const auto& s = network_.input_shape();
  return {s.channels, s.height, s.width};
}

void BaseClassifier::CheckInput(std::span<const float> x) const {
  if (x.size() != network_.input_size()) {
    throw InputError("input has " + std::to_string(x.size()) + " features, model expects " +
                     input_shape().ToString());
  }
}

std::vector<float> BaseClassifier::PredictLogits(std::span<const float> x) const {
  CheckInput(x);
  return network_.Predict(x);
}

nn::Prediction BaseClassifier::PredictLabel(const data::Sample& x) const {
  return nn::PredictFromLogits(PredictLogits(x));
}

std::vector<float> BaseClassifier::ClassScoreGradient(std::span<const float> x,
                                                      int target_class) const {
  if (target_class < 0 || target_class >= num_classes_) {
    throw InputError("target class " + std::to_string(target_class) + " outside [0," +
                     std::to_string(num_classes_) + ")");
  }
  std::vector<float> weights(num_classes_, 0.0f);
  weights[target_class] = 1.0f;
  return ScoreGradient(x, weights);
}

std::vector<float> BaseClassifier::ScoreGradient(std::span<const float> x,
                                                 std::span<const float> class_weights) const {
  CheckInput(x);
  if (class_weights.size() != static_cast<std::size_t>(num_classes_)) {
    throw InputError("class weight vector must have length K");
  }
  nn::Activations acts;
  network_.Forward(x, acts);
  // Scratch parameter gradient; M's own parameters are never touched.
  std::vector<float> scratch(network_.num_params(), 0.0f);
  std::vector<float> grad(x.size(), 0.0f);
  network_.Backward(acts, class_weights, scratch, grad);
  return grad;
}

BaseClassifier Pretrain(const data::LabeledDataset& train,
                        const data::LabeledDataset& val, const nn::TrainConfig& config) {
  config.Validate("model");
  if (!(train.shape() == val.shape())) {
    throw ConfigError("val", "validation shape differs from training shape");
  }
  if (train.num_classes() != val.num_classes()) {
    throw ConfigError("val", "validation class count differs from training");
  }
  if (val.size() == 0) throw ConfigError("val", "validation set is empty");
  const int K = train.num_classes();
  nn::Network net = MakeBackbone(train.shape(), static_cast<std::size_t>(K));
  net.Initialize(MixSeed(config.seed, "base_model.init"));
  std::vector<float> grads(net.num_params(), 0.0f);
  const std::vector<nn::ParamGroup> groups = {{"M", net.params(), grads}};

  nn::Activations acts;
  std::vector<float> dlogits(K);
  auto batch_fn = [&](std::span<const std::size_t> batch) {
    nn::BatchResult r;
    for (std::size_t i : batch) {
      net.Forward(train.sample(i).features, acts);
      const auto logits = acts.output();
      r.loss += nn::SoftmaxCrossEntropy(logits, train.label(i), dlogits);
      if (nn::ArgMax(logits) == train.label(i)) ++r.correct;
      net.Backward(acts, dlogits, grads, {});
    }
    return r;
  };
  auto validate_fn = [&] {
    nn::ValidationResult v;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < val.size(); ++i) {
      const auto logits = net.Predict(val.sample(i).features);
      v.loss += nn::SoftmaxCrossEntropy(logits, val.label(i), {});
      if (nn::ArgMax(logits) == val.label(i)) ++correct;
    }
    v.loss /= static_cast<double>(val.size());
    v.accuracy = static_cast<double>(correct) / static_cast<double>(val.size());
    return v;
  };
  nn::TrainConfig cfg = config;
  cfg.seed = MixSeed(config.seed, "base_model.shuffle");
  nn::TrainingHistory history = nn::Fit(cfg, train.size(), groups, batch_fn, validate_fn);
  return BaseClassifier(std::move(net), K, /*frozen=*/true, std::move(history));
}

void SaveCheckpoint(const BaseClassifier& model, const std::filesystem::path& path) {
  Checkpoint ckpt;
  ckpt.kind = "base_classifier";
  ckpt.frozen = model.frozen();
  ckpt.metadata = {{"num_classes", model.num_classes()},
                   {"checkpoint_hash", model.checkpoint_hash()}};
  ckpt.blocks.push_back({"M", model.network()});
  WriteCheckpoint(ckpt, path);
}

BaseClassifier LoadCheckpoint(const std::filesystem::path& path) {
  Checkpoint ckpt = ReadCheckpoint(path);
  if (ckpt.kind != "base_classifier") {
    throw FormatError(path.string() + " holds a " + ckpt.kind + ", not a base classifier");
  }
  const int K = ckpt.metadata.at("num_classes").get<int>();
  BaseClassifier model(ckpt.Block("M"), K, ckpt.frozen);
  if (model.checkpoint_hash() != ckpt.metadata.at("checkpoint_hash").get<std::string>()) {
    throw IntegrityError("checkpoint hash does not match parameters");
  }
  return model;
}

}  // namespace impactx::model

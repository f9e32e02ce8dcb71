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

#include "impactx/fusion/fusion_classifier.h"

#include <set>

#include "impactx/digest.h"
#include "impactx/errors.h"
#include "impactx/model/checkpoint.h"

namespace impactx::fusion {
namespace {

constexpr float kLeakySlope = 0.01f;

void CheckDims(const std::vector<std::vector<float>>& inputs, const std::vector<int>& labels,
               std::size_t dim, int K, const std::string& what) {
  if (inputs.size() != labels.size()) {
    throw ConfigError(what, "inputs and labels differ in length");
  }
  for (const auto& x : inputs) {
    if (x.size() != dim) {
      throw ConfigError(what, "fused input has length " + std::to_string(x.size()) +
                                  ", expected latent_dim + K = " + std::to_string(dim));
    }
  }
  for (int y : labels) {
    if (y < 0 || y >= K) throw ConfigError(what, "label out of range");
  }
}

}  // namespace

const char* LogitModeName(LogitMode mode) {
  return mode == LogitMode::kRawLogits ? "raw_logits" : "softmax_probs";
}

LogitMode ParseLogitMode(const std::string& name) {
  if (name == "raw_logits") return LogitMode::kRawLogits;
  if (name == "softmax_probs") return LogitMode::kSoftmaxProbs;
  throw ConfigError("fusion.logit_mode", "unknown logit mode '" + name + "'");
}

const char* ArchitectureName(FusionArchitecture arch) {
  return arch == FusionArchitecture::kMlp ? "mlp" : "linear";
}

FusionArchitecture ParseArchitecture(const std::string& name) {
  if (name == "mlp") return FusionArchitecture::kMlp;
  if (name == "linear") return FusionArchitecture::kLinear;
  throw ConfigError("fusion.architecture", "unknown architecture '" + name + "'");
}

std::vector<float> MakeFusedInput(std::span<const float> z, std::span<const float> logits,
                                  LogitMode mode) {
  std::vector<float> out(z.begin(), z.end());
  if (mode == LogitMode::kRawLogits) {
    out.insert(out.end(), logits.begin(), logits.end());
  } else {
    const auto p = nn::Softmax(logits);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

FusionClassifier::FusionClassifier(std::size_t latent_dim, int num_classes,
                                   const FusionOptions& options)
    : latent_dim_(latent_dim), num_classes_(num_classes), options_(options) {
  if (num_classes < 2) throw ConfigError("fusion", "needs at least two classes");
  const nn::TensorShape in{input_dim(), 1, 1};
  const auto K = static_cast<std::size_t>(num_classes);
  if (options.architecture == FusionArchitecture::kMlp) {
    network_ = nn::Network(in, {nn::LayerSpec::Dense(options.hidden_units),
                                nn::LayerSpec::LeakyRelu(kLeakySlope),
                                nn::LayerSpec::Dense(K)});
  } else {
    network_ = nn::Network(in, {nn::LayerSpec::Dense(K)});
  }
}

std::vector<float> FusionClassifier::Logits(std::span<const float> fused) const {
  if (fused.size() != input_dim()) {
    throw InputError("fused input has length " + std::to_string(fused.size()) +
                     ", expected " + std::to_string(input_dim()));
  }
  return network_.Predict(fused);
}

nn::Prediction FusionClassifier::FusePredict(std::span<const float> z,
                                             std::span<const float> logits) const {
  if (z.size() != latent_dim_ || logits.size() != static_cast<std::size_t>(num_classes_)) {
    throw InputError("fuse_predict: expected latent " + std::to_string(latent_dim_) +
                     " and " + std::to_string(num_classes_) + " logits");
  }
  return nn::PredictFromLogits(Logits(MakeFusedInput(z, logits, options_.logit_mode)));
}

nlohmann::json FusionClassifier::Metadata() const {
  return {{"latent_dim", latent_dim_},
          {"num_classes", num_classes_},
          {"logit_mode", LogitModeName(options_.logit_mode)},
          {"architecture", ArchitectureName(options_.architecture)},
          {"hidden_units", options_.hidden_units},
          {"input_order", {"z", "m"}}};
}

FusionClassifier FusionClassifier::FromMetadata(const nlohmann::json& metadata,
                                                nn::Network network) {
  if (metadata.at("input_order") != nlohmann::json({"z", "m"})) {
    throw FormatError("fusion checkpoint has an unexpected input order");
  }
  FusionOptions options;
  options.logit_mode = ParseLogitMode(metadata.at("logit_mode").get<std::string>());
  options.architecture = ParseArchitecture(metadata.at("architecture").get<std::string>());
  options.hidden_units = metadata.at("hidden_units").get<std::size_t>();
  FusionClassifier c(metadata.at("latent_dim").get<std::size_t>(),
                     metadata.at("num_classes").get<int>(), options);
  if (network.num_params() != c.network_.num_params() ||
      network.input_size() != c.input_dim()) {
    throw FormatError("fusion checkpoint architecture disagrees with its metadata");
  }
  c.network_ = std::move(network);
  return c;
}

FusionTrainingResult ContinueFusion(FusionClassifier classifier,
                                    const std::vector<std::vector<float>>& train_inputs,
                                    const std::vector<int>& train_labels,
                                    const std::vector<std::vector<float>>& val_inputs,
                                    const std::vector<int>& val_labels,
                                    const nn::TrainConfig& config) {
  const std::size_t dim = classifier.input_dim();
  const int K = classifier.num_classes();
  CheckDims(train_inputs, train_labels, dim, K, "fusion.train");
  CheckDims(val_inputs, val_labels, dim, K, "fusion.val");
  if (val_inputs.empty()) throw ConfigError("fusion.val", "validation set is empty");

  nn::Network& net = classifier.mutable_network();
  std::vector<float> grads(net.num_params(), 0.0f);
  const std::vector<nn::ParamGroup> groups = {{"C", net.params(), grads}};
  nn::Activations acts;
  std::vector<float> dlogits(K);
  auto batch_fn = [&](std::span<const std::size_t> batch) {
    nn::BatchResult r;
    for (std::size_t i : batch) {
      net.Forward(train_inputs[i], acts);
      r.loss += nn::SoftmaxCrossEntropy(acts.output(), train_labels[i], dlogits);
      if (nn::ArgMax(acts.output()) == train_labels[i]) ++r.correct;
      net.Backward(acts, dlogits, grads, {});
    }
    return r;
  };
  auto validate_fn = [&] {
    nn::ValidationResult v;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < val_inputs.size(); ++i) {
      const auto logits = net.Predict(val_inputs[i]);
      v.loss += nn::SoftmaxCrossEntropy(logits, val_labels[i], {});
      if (nn::ArgMax(logits) == val_labels[i]) ++correct;
    }
    v.loss /= static_cast<double>(val_inputs.size());
    v.accuracy = static_cast<double>(correct) / static_cast<double>(val_inputs.size());
    return v;
  };
  FusionTrainingResult out;
  out.history = nn::Fit(config, train_inputs.size(), groups, batch_fn, validate_fn);
  out.classifier = std::move(classifier);
  return out;
}

FusionTrainingResult TrainFusion(const std::vector<std::vector<float>>& train_inputs,
                                 const std::vector<int>& train_labels,
                                 const std::vector<std::vector<float>>& val_inputs,
                                 const std::vector<int>& val_labels, std::size_t latent_dim,
                                 int num_classes, const FusionOptions& options,
                                 const nn::TrainConfig& config) {
  config.Validate("fusion.train");
  const std::set<int> present(train_labels.begin(), train_labels.end());
  if (present.size() < static_cast<std::size_t>(num_classes)) {
    throw ConfigError("fusion.train", "training labels cover " +
                                          std::to_string(present.size()) + " of " +
                                          std::to_string(num_classes) + " classes");
  }
  FusionClassifier classifier(latent_dim, num_classes, options);
  classifier.mutable_network().Initialize(MixSeed(config.seed, "fusion.init"));
  nn::TrainConfig cfg = config;
  cfg.seed = MixSeed(config.seed, "fusion.shuffle");
  return ContinueFusion(std::move(classifier), train_inputs, train_labels, val_inputs,
                        val_labels, cfg);
}

void SaveFusion(const FusionClassifier& classifier, const std::filesystem::path& path) {
  model::Checkpoint ckpt;
  ckpt.kind = "fusion_classifier";
  ckpt.frozen = true;
  ckpt.metadata = classifier.Metadata();
  ckpt.blocks.push_back({"C", classifier.network()});
  model::WriteCheckpoint(ckpt, path);
}

FusionClassifier LoadFusion(const std::filesystem::path& path) {
  model::Checkpoint ckpt = model::ReadCheckpoint(path);
  if (ckpt.kind != "fusion_classifier") {
    throw FormatError(path.string() + " is not a fusion classifier checkpoint");
  }
  return FusionClassifier::FromMetadata(ckpt.metadata, ckpt.Block("C"));
}

}  // namespace impactx::fusion

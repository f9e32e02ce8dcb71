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

#include "impactx/strategy/autoencoder.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "impactx/digest.h"
#include "impactx/errors.h"
#include "impactx/model/checkpoint.h"
#include "impactx/nn/ops.h"

namespace impactx::strategy {
namespace {

using Rows = std::vector<std::vector<float>>;

// Fits `net` so that net(inputs[i]) approximates targets[i] under mean squared
// error, restoring the parameters with the best validation loss.
nn::TrainingHistory FitRegression(nn::Network& net, const std::vector<std::span<const float>>& inputs,
                                  const Rows& targets,
                                  const std::vector<std::span<const float>>& val_inputs,
                                  const Rows& val_targets, const nn::TrainConfig& config) {
  std::vector<float> grads(net.num_params(), 0.0f);
  const std::vector<nn::ParamGroup> groups = {{"net", net.params(), grads}};
  nn::Activations acts;
  std::vector<float> dout(net.output_size());
  auto batch_fn = [&](std::span<const std::size_t> batch) {
    nn::BatchResult r;
    for (std::size_t i : batch) {
      net.Forward(inputs[i], acts);
      r.loss += nn::MeanSquaredError(acts.output(), targets[i], dout);
      net.Backward(acts, dout, grads, {});
    }
    return r;
  };
  auto validate_fn = [&] {
    nn::ValidationResult v;
    for (std::size_t i = 0; i < val_inputs.size(); ++i) {
      v.loss += nn::MeanSquaredError(net.Predict(val_inputs[i]), val_targets[i], {});
    }
    v.loss /= static_cast<double>(val_inputs.size());
    return v;
  };
  return nn::Fit(config, inputs.size(), groups, batch_fn, validate_fn);
}

std::vector<std::span<const float>> Spans(const Rows& rows) {
  return {rows.begin(), rows.end()};
}

std::vector<std::span<const float>> Spans(const data::LabeledDataset& dataset) {
  std::vector<std::span<const float>> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples()) out.emplace_back(s.features);
  return out;
}

Rows MapValues(const std::vector<xai::AttributionMap>& maps) {
  Rows out;
  out.reserve(maps.size());
  for (const auto& m : maps) out.push_back(m.values);
  return out;
}

Rows EncodeAll(const ExplanationAutoencoder& ae, const Rows& explanations) {
  Rows out;
  out.reserve(explanations.size());
  for (const auto& e : explanations) out.push_back(ae.Encode(e));
  return out;
}

Rows PredictAll(const nn::Network& net, const data::LabeledDataset& dataset) {
  Rows out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples()) out.push_back(net.Predict(s.features));
  return out;
}

Rows FuseAll(const Rows& codes, const Rows& logits, fusion::LogitMode mode) {
  Rows out;
  out.reserve(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out.push_back(fusion::MakeFusedInput(codes[i], logits[i], mode));
  }
  return out;
}

Rows LogitsAll(const model::BaseClassifier& model, const data::LabeledDataset& dataset) {
  Rows out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples()) out.push_back(model.PredictLogits(s));
  return out;
}

}  // namespace

nn::Network MakeExplanationEncoder(std::size_t input_dim, std::size_t latent_dim) {
  return nn::Network({input_dim, 1, 1},
                     {nn::LayerSpec::Dense(256), nn::LayerSpec::LeakyRelu(kLeakySlope),
                      nn::LayerSpec::Dense(64), nn::LayerSpec::LeakyRelu(kLeakySlope),
                      nn::LayerSpec::Dense(latent_dim)});
}

nn::Network MakeExplanationDecoder(std::size_t latent_dim, std::size_t output_dim) {
  return nn::Network({latent_dim, 1, 1},
                     {nn::LayerSpec::Dense(64), nn::LayerSpec::LeakyRelu(kLeakySlope),
                      nn::LayerSpec::Dense(256), nn::LayerSpec::LeakyRelu(kLeakySlope),
                      nn::LayerSpec::Dense(output_dim)});
}

ExplanationAutoencoder::ExplanationAutoencoder(nn::Network encoder, nn::Network decoder,
                                               double best_val_loss, nn::TrainingHistory history)
    : encoder_(std::move(encoder)),
      decoder_(std::move(decoder)),
      best_val_loss_(best_val_loss),
      history_(std::move(history)) {
  if (decoder_.input_size() != encoder_.output_size() ||
      decoder_.output_size() != encoder_.input_size()) {
    throw ConsistencyError("decoder must mirror the encoder's dimensions");
  }
}

std::vector<float> ExplanationAutoencoder::Encode(std::span<const float> explanation) const {
  if (explanation.size() != input_dim()) {
    throw InputError("explanation has length " + std::to_string(explanation.size()) +
                     ", autoencoder expects " + std::to_string(input_dim()));
  }
  return encoder_.Predict(explanation);
}

std::vector<float> ExplanationAutoencoder::Decode(std::span<const float> code) const {
  if (code.size() != latent_dim()) {
    throw InputError("latent code has length " + std::to_string(code.size()) +
                     ", autoencoder expects " + std::to_string(latent_dim()));
  }
  return decoder_.Predict(code);
}

ExplanationAutoencoder TrainAutoencoder(const Rows& explanations, std::size_t latent_dim,
                                        const nn::TrainConfig& config) {
  config.Validate("strategy.autoencoder_train");
  if (latent_dim == 0) throw ConfigError("strategy.latent_dim", "must be positive");
  if (explanations.size() < latent_dim + 1) {
    throw ConfigError("strategy.latent_dim",
                      "autoencoder needs at least latent_dim + 1 = " +
                          std::to_string(latent_dim + 1) + " explanations, got " +
                          std::to_string(explanations.size()));
  }
  const std::size_t dim = explanations.front().size();
  for (const auto& e : explanations) {
    if (e.size() != dim) throw ConfigError("explanations", "explanations differ in shape");
  }

  const std::size_t n = explanations.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(MixSeed(config.seed, "autoencoder.holdout"));
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_val =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(0.1 * n)), 1, n - 1);
  Rows train, val;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_val ? val : train).push_back(explanations[order[i]]);
  }

  // The autoencoder is trained as one network: encoder layers then decoder.
  nn::Network encoder = MakeExplanationEncoder(dim, latent_dim);
  nn::Network decoder = MakeExplanationDecoder(latent_dim, dim);
  std::vector<nn::LayerSpec> layers;
  for (std::size_t i = 0; i < encoder.num_layers(); ++i) layers.push_back(encoder.layer(i));
  for (std::size_t i = 0; i < decoder.num_layers(); ++i) layers.push_back(decoder.layer(i));
  nn::Network joined({dim, 1, 1}, layers);
  joined.Initialize(MixSeed(config.seed, "autoencoder.init"));

  nn::TrainConfig cfg = config;
  cfg.seed = MixSeed(config.seed, "autoencoder.shuffle");
  nn::TrainingHistory history = FitRegression(joined, Spans(train), train, Spans(val), val, cfg);

  const auto all = joined.params();
  const std::size_t split = encoder.num_params();
  std::copy(all.begin(), all.begin() + split, encoder.params().begin());
  std::copy(all.begin() + split, all.end(), decoder.params().begin());
  const double best = history.best_val_loss;
  return ExplanationAutoencoder(std::move(encoder), std::move(decoder), best, std::move(history));
}

ExplanationAutoencoder TrainAutoencoder(const std::vector<xai::AttributionMap>& explanations,
                                        std::size_t latent_dim, const nn::TrainConfig& config) {
  return TrainAutoencoder(MapValues(explanations), latent_dim, config);
}

nn::Network MakeAttributionEncoder(const data::Shape3& shape, std::size_t latent_dim) {
  return model::MakeBackbone(shape, latent_dim);
}

AttributionEncoderResult TrainAttributionEncoder(const data::LabeledDataset& train,
                                                 const Rows& train_z,
                                                 const data::LabeledDataset& val,
                                                 const Rows& val_z,
                                                 const nn::TrainConfig& config) {
  config.Validate("strategy.encoder_train");
  if (train.size() != train_z.size() || val.size() != val_z.size()) {
    throw ConsistencyError("latent targets are not aligned with the samples");
  }
  if (train.size() == 0 || val.size() == 0) {
    throw ConfigError("strategy.encoder_train", "training and validation sets must be non-empty");
  }
  const std::size_t latent = train_z.front().size();
  for (const auto* rows : {&train_z, &val_z}) {
    for (const auto& z : *rows) {
      if (z.size() != latent) throw ConsistencyError("latent targets differ in length");
    }
  }
  AttributionEncoderResult out;
  out.network = MakeAttributionEncoder(train.shape(), latent);
  out.network.Initialize(MixSeed(config.seed, "attribution_encoder.init"));
  nn::TrainConfig cfg = config;
  cfg.seed = MixSeed(config.seed, "attribution_encoder.shuffle");
  out.history = FitRegression(out.network, Spans(train), train_z, Spans(val), val_z, cfg);
  return out;
}

AttributionEncoderResult TrainAttributionEncoder(
    const data::LabeledDataset& train, const std::vector<xai::AttributionMap>& train_maps,
    const data::LabeledDataset& val, const std::vector<xai::AttributionMap>& val_maps,
    const ExplanationAutoencoder& autoencoder, const nn::TrainConfig& config) {
  const Rows train_z = EncodeAll(autoencoder, AlignExplanations(train, train_maps));
  const Rows val_z = EncodeAll(autoencoder, AlignExplanations(val, val_maps));
  return TrainAttributionEncoder(train, train_z, val, val_z, config);
}

std::string RowsDigest(const Rows& rows) {
  std::vector<float> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return FloatDigest(flat);
}

AeStrategyResult RunAutoencoderStrategy(const model::BaseClassifier& model,
                                        const data::LabeledDataset& train,
                                        const std::vector<xai::AttributionMap>& train_maps,
                                        const data::LabeledDataset& val,
                                        const std::vector<xai::AttributionMap>& val_maps,
                                        const AeStrategyOptions& options) {
  const std::string hash_before = model.RecomputeHash();
  AeStrategyResult out;
  const Rows train_e = AlignExplanations(train, train_maps);
  const Rows val_e = AlignExplanations(val, val_maps);
  out.step_order.push_back("explanations");

  out.autoencoder = TrainAutoencoder(train_e, options.latent_dim, options.autoencoder_train);
  out.step_order.push_back("autoencoder");

  const Rows train_z = EncodeAll(out.autoencoder, train_e);
  const Rows val_z = EncodeAll(out.autoencoder, val_e);
  AttributionEncoderResult f =
      TrainAttributionEncoder(train, train_z, val, val_z, options.encoder_train);
  out.attribution_encoder = std::move(f.network);
  out.encoder_history = std::move(f.history);
  out.step_order.push_back("attribution_encoder");

  const Rows train_f = PredictAll(out.attribution_encoder, train);
  const Rows val_f = PredictAll(out.attribution_encoder, val);
  out.distill_train_mse = MeanSquaredDistance(train_f, train_z);
  out.distill_val_mse = MeanSquaredDistance(val_f, val_z);
  if (out.distill_val_mse > 2.0 * out.distill_train_mse) {
    out.warnings.push_back("attribution encoder may overfit: validation distillation error " +
                           std::to_string(out.distill_val_mse) + " exceeds twice the training " +
                           std::to_string(out.distill_train_mse));
  }

  // C is trained on codes from the explanation encoder, as the procedure
  // prescribes; at inference it receives F(x) instead.
  const Rows train_logits = LogitsAll(model, train);
  const Rows val_logits = LogitsAll(model, val);
  const auto mode = options.fusion.logit_mode;
  const Rows fused_train = FuseAll(train_z, train_logits, mode);
  const Rows fused_val = FuseAll(val_z, val_logits, mode);
  out.fusion_input_source = "explanation_encoder";
  out.fusion_train_inputs_digest = RowsDigest(fused_train);
  fusion::FusionTrainingResult c =
      fusion::TrainFusion(fused_train, train.labels(), fused_val, val.labels(),
                          options.latent_dim, train.num_classes(), options.fusion,
                          options.fusion_train);
  out.classifier = std::move(c.classifier);
  out.fusion_history = std::move(c.history);
  out.step_order.push_back("fusion");

  if (options.fine_tune && options.fine_tune_epochs > 0) {
    nn::TrainConfig cfg = options.fusion_train;
    cfg.epochs = options.fine_tune_epochs;
    cfg.seed = MixSeed(options.fusion_train.seed, "fusion.fine_tune");
    fusion::FusionTrainingResult ft =
        fusion::ContinueFusion(std::move(out.classifier), FuseAll(train_f, train_logits, mode),
                               train.labels(), FuseAll(val_f, val_logits, mode), val.labels(),
                               cfg);
    out.classifier = std::move(ft.classifier);
    out.fine_tune_history = std::move(ft.history);
    out.step_order.push_back("fusion_fine_tune");
  }

  if (model.RecomputeHash() != hash_before) {
    throw IntegrityError("frozen classifier changed during the autoencoder strategy");
  }
  return out;
}

ImpactxPredictor AssembleAePipeline(std::shared_ptr<const model::BaseClassifier> model,
                                    nn::Network attribution_encoder,
                                    const ExplanationAutoencoder& autoencoder,
                                    fusion::FusionClassifier classifier) {
  if (attribution_encoder.output_size() != autoencoder.latent_dim()) {
    throw ConfigError("strategy.latent_dim", "F's output width differs from the autoencoder's");
  }
  return ImpactxPredictor(std::move(model), std::move(attribution_encoder),
                          autoencoder.decoder(), std::move(classifier), "ae");
}

void SaveAutoencoder(const ExplanationAutoencoder& autoencoder,
                     const std::filesystem::path& path) {
  model::Checkpoint ckpt;
  ckpt.kind = "autoencoder";
  ckpt.frozen = true;
  ckpt.metadata = {{"input_dim", autoencoder.input_dim()},
                   {"latent_dim", autoencoder.latent_dim()},
                   {"best_val_loss", autoencoder.best_val_loss()}};
  ckpt.blocks.push_back({"E_A", autoencoder.encoder()});
  ckpt.blocks.push_back({"D_A", autoencoder.decoder()});
  model::WriteCheckpoint(ckpt, path);
}

ExplanationAutoencoder LoadAutoencoder(const std::filesystem::path& path) {
  const model::Checkpoint ckpt = model::ReadCheckpoint(path);
  if (ckpt.kind != "autoencoder") {
    throw FormatError(path.string() + " is not an autoencoder checkpoint");
  }
  return ExplanationAutoencoder(ckpt.Block("E_A"), ckpt.Block("D_A"),
                                ckpt.metadata.at("best_val_loss").get<double>());
}

void SaveAttributionEncoder(const nn::Network& encoder, const std::filesystem::path& path) {
  model::Checkpoint ckpt;
  ckpt.kind = "attribution_encoder";
  ckpt.frozen = true;
  ckpt.metadata = {{"latent_dim", encoder.output_size()}};
  ckpt.blocks.push_back({"F", encoder});
  model::WriteCheckpoint(ckpt, path);
}

nn::Network LoadAttributionEncoder(const std::filesystem::path& path) {
  const model::Checkpoint ckpt = model::ReadCheckpoint(path);
  if (ckpt.kind != "attribution_encoder") {
    throw FormatError(path.string() + " is not an attribution encoder checkpoint");
  }
  return ckpt.Block("F");
}

}  // namespace impactx::strategy

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

#include "impactx/strategy/encoder_decoder.h"

#include <algorithm>
#include <cmath>

#include "impactx/digest.h"
#include "impactx/errors.h"
#include "impactx/model/checkpoint.h"
#include "impactx/nn/ops.h"

namespace impactx::strategy {

void JointLossWeights::Validate() const {
  if (!(lambda_recon >= 0.0) || !std::isfinite(lambda_recon)) {
    throw ConfigError("strategy.lambda_recon", "must be a finite value >= 0");
  }
  if (!(lambda_cls >= 0.0) || !std::isfinite(lambda_cls)) {
    throw ConfigError("strategy.lambda_cls", "must be a finite value >= 0");
  }
  if (lambda_recon == 0.0 && lambda_cls == 0.0) {
    throw ConfigError("strategy.lambda_recon", "lambda_recon and lambda_cls cannot both be 0");
  }
}

ExplanationEncoderDecoder MakeEncoderDecoder(const data::Shape3& shape, std::size_t latent_dim,
                                             std::size_t explanation_size) {
  return {MakeAttributionEncoder(shape, latent_dim),
          MakeExplanationDecoder(latent_dim, explanation_size)};
}

JointTrainingResult TrainJoint(const data::LabeledDataset& train,
                               const std::vector<xai::AttributionMap>& train_maps,
                               const data::LabeledDataset& val,
                               const std::vector<xai::AttributionMap>& val_maps,
                               const model::BaseClassifier& model,
                               const EdStrategyOptions& options) {
  options.weights.Validate();
  options.train.Validate("strategy.train");
  if (options.latent_dim == 0) throw ConfigError("strategy.latent_dim", "must be positive");
  if (train.size() == 0 || val.size() == 0) {
    throw ConfigError("strategy.train", "training and validation sets must be non-empty");
  }
  const std::string hash_before = model.RecomputeHash();
  const std::vector<std::vector<float>> train_e = AlignExplanations(train, train_maps);
  const std::vector<std::vector<float>> val_e = AlignExplanations(val, val_maps);
  const std::size_t G = train_e.front().size();
  const std::size_t latent = options.latent_dim;
  const int K = train.num_classes();
  const double wr = options.weights.lambda_recon;
  const double wc = options.weights.lambda_cls;

  // M is frozen, so its logits are computed once.
  std::vector<std::vector<float>> train_logits, val_logits;
  for (const auto& s : train.samples()) train_logits.push_back(model.PredictLogits(s));
  for (const auto& s : val.samples()) val_logits.push_back(model.PredictLogits(s));

  JointTrainingResult out;
  out.model = MakeEncoderDecoder(train.shape(), latent, G);
  out.classifier = fusion::FusionClassifier(latent, K, options.fusion);
  nn::Network& lep = out.model.encoder;
  nn::Network& dec = out.model.decoder;
  nn::Network& cls = out.classifier.mutable_network();
  lep.Initialize(MixSeed(options.train.seed, "encoder_decoder.encoder.init"));
  dec.Initialize(MixSeed(options.train.seed, "encoder_decoder.decoder.init"));
  cls.Initialize(MixSeed(options.train.seed, "encoder_decoder.fusion.init"));
  out.initial_encoder_digest = lep.Digest();
  out.initial_decoder_digest = dec.Digest();
  out.initial_classifier_digest = cls.Digest();

  std::vector<float> g_lep(lep.num_params(), 0.0f);
  std::vector<float> g_dec(dec.num_params(), 0.0f);
  std::vector<float> g_cls(cls.num_params(), 0.0f);
  const std::vector<nn::ParamGroup> groups = {{"LEP", lep.params(), g_lep},
                                              {"Dec", dec.params(), g_dec},
                                              {"C", cls.params(), g_cls}};
  const auto mode = options.fusion.logit_mode;

  nn::Activations a_lep, a_dec, a_cls;
  std::vector<float> d_recon(G), d_logits(K), d_z(latent), d_z_dec(latent),
      d_fused(latent + static_cast<std::size_t>(K));
  auto batch_fn = [&](std::span<const std::size_t> batch) {
    nn::BatchResult r;
    double recon_sum = 0.0, cls_sum = 0.0;
    for (std::size_t i : batch) {
      lep.Forward(train.sample(i).features, a_lep);
      const std::vector<float> z(a_lep.output().begin(), a_lep.output().end());
      std::fill(d_z.begin(), d_z.end(), 0.0f);
      if (wr > 0.0) {
        dec.Forward(z, a_dec);
        recon_sum += nn::MeanSquaredError(a_dec.output(), train_e[i], d_recon,
                                          static_cast<float>(wr));
        dec.Backward(a_dec, d_recon, g_dec, d_z_dec);
        for (std::size_t j = 0; j < latent; ++j) d_z[j] += d_z_dec[j];
      }
      if (wc > 0.0) {
        cls.Forward(fusion::MakeFusedInput(z, train_logits[i], mode), a_cls);
        cls_sum += nn::SoftmaxCrossEntropy(a_cls.output(), train.label(i), d_logits,
                                           static_cast<float>(wc));
        if (nn::ArgMax(a_cls.output()) == train.label(i)) ++r.correct;
        cls.Backward(a_cls, d_logits, g_cls, d_fused);
        for (std::size_t j = 0; j < latent; ++j) d_z[j] += d_fused[j];
      }
      lep.Backward(a_lep, d_z, g_lep, {});
    }
    if (wr > 0.0) r.terms["recon"] = recon_sum;
    if (wc > 0.0) r.terms["cls"] = cls_sum;
    r.loss = wr * recon_sum + wc * cls_sum;
    return r;
  };
  auto validate_fn = [&] {
    nn::ValidationResult v;
    double recon_sum = 0.0, cls_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < val.size(); ++i) {
      const auto z = lep.Predict(val.sample(i).features);
      recon_sum += nn::MeanSquaredError(dec.Predict(z), val_e[i], {});
      const auto logits = cls.Predict(fusion::MakeFusedInput(z, val_logits[i], mode));
      cls_sum += nn::SoftmaxCrossEntropy(logits, val.label(i), {});
      if (nn::ArgMax(logits) == val.label(i)) ++correct;
    }
    const double n = static_cast<double>(val.size());
    v.terms["recon"] = recon_sum / n;
    v.terms["cls"] = cls_sum / n;
    v.loss = wr * v.terms["recon"] + wc * v.terms["cls"];
    v.accuracy = static_cast<double>(correct) / n;
    return v;
  };
  nn::TrainConfig cfg = options.train;
  cfg.seed = MixSeed(options.train.seed, "encoder_decoder.shuffle");
  out.history = nn::Fit(cfg, train.size(), groups, batch_fn, validate_fn);

  if (model.RecomputeHash() != hash_before) {
    throw IntegrityError("frozen classifier changed during joint training");
  }
  return out;
}

nlohmann::json JointHistoryJson(const nn::TrainingHistory& history) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : history.epochs) {
    auto term = [](const std::map<std::string, double>& terms, const char* name) {
      auto it = terms.find(name);
      return it == terms.end() ? nlohmann::json(nullptr) : nlohmann::json(it->second);
    };
    epochs.push_back({{"epoch", e.epoch},
                      {"recon_loss", term(e.train_terms, "recon")},
                      {"cls_loss", term(e.train_terms, "cls")},
                      {"total_loss", e.train_loss},
                      {"val_metrics",
                       {{"loss", e.val_loss},
                        {"accuracy", e.val_accuracy},
                        {"recon_loss", term(e.val_terms, "recon")},
                        {"cls_loss", term(e.val_terms, "cls")}}}});
  }
  return {{"epochs", epochs},
          {"best_epoch", history.best_epoch},
          {"best_val_loss", history.best_val_loss},
          {"stopped_early", history.stopped_early}};
}

ImpactxPredictor AssembleEdPipeline(std::shared_ptr<const model::BaseClassifier> model,
                                    const ExplanationEncoderDecoder& encoder_decoder,
                                    fusion::FusionClassifier classifier) {
  return ImpactxPredictor(std::move(model), encoder_decoder.encoder, encoder_decoder.decoder,
                          std::move(classifier), "ed");
}

void SaveEncoderDecoder(const ExplanationEncoderDecoder& encoder_decoder,
                        const std::filesystem::path& path) {
  model::Checkpoint ckpt;
  ckpt.kind = "encoder_decoder";
  ckpt.frozen = true;
  ckpt.metadata = {{"latent_dim", encoder_decoder.latent_dim()},
                   {"explanation_size", encoder_decoder.explanation_size()}};
  ckpt.blocks.push_back({"LEP", encoder_decoder.encoder});
  ckpt.blocks.push_back({"Dec", encoder_decoder.decoder});
  model::WriteCheckpoint(ckpt, path);
}

ExplanationEncoderDecoder LoadEncoderDecoder(const std::filesystem::path& path) {
  const model::Checkpoint ckpt = model::ReadCheckpoint(path);
  if (ckpt.kind != "encoder_decoder") {
    throw FormatError(path.string() + " is not an encoder-decoder checkpoint");
  }
  ExplanationEncoderDecoder ed{ckpt.Block("LEP"), ckpt.Block("Dec")};
  if (ed.decoder.input_size() != ed.encoder.output_size()) {
    throw FormatError("encoder-decoder checkpoint has mismatched latent widths");
  }
  return ed;
}

}  // namespace impactx::strategy

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

#include "impactx/pipeline/config.h"

#include <cmath>
#include <set>

#include "impactx/binary_io.h"
#include "impactx/digest.h"
#include "impactx/errors.h"

namespace impactx::pipeline {
namespace {

using nlohmann::json;

void CheckObject(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

template <typename T>
void Read(const json& j, const std::string& path, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(field);
  } catch (const json::exception&) {
    throw ConfigError(path.empty() ? key : path + "." + key, "has the wrong type");
  }
}

// Re-raises a ConfigError from a nested validator under `prefix`.
template <typename Fn>
void Nested(const std::string& prefix, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    const std::string message = what.substr(std::min(what.size(), e.field().size() + 2));
    throw ConfigError(prefix + "." + e.field(), message);
  }
}

nn::TrainConfig ReadTrain(const json& parent, const std::string& parent_path, const char* key,
                          nn::TrainConfig defaults) {
  const std::string path = parent_path.empty() ? key : parent_path + "." + key;
  if (!parent.contains(key)) return defaults;
  CheckObject(parent.at(key), path,
              {"epochs", "batch_size", "learning_rate", "decay1", "decay2", "epsilon", "seed",
               "early_stop_patience"});
  return nn::TrainConfig::FromJson(parent.at(key), path, defaults);
}

nn::TrainConfig Defaults(int epochs, int patience, double lr, std::uint64_t seed) {
  nn::TrainConfig c;
  c.epochs = epochs;
  c.early_stop_patience = patience;
  c.learning_rate = lr;
  c.seed = seed;
  return c;
}

}  // namespace

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  CheckObject(j, "", {"seed", "dataset", "model", "xai", "strategy", "fusion", "eval",
                      "impactx_train_fraction"});
  ExperimentConfig c;
  Read(j, "", "seed", c.seed);

  // Dataset (required).
  if (!j.contains("dataset")) throw ConfigError("dataset", "missing required section");
  const json& d = j.at("dataset");
  CheckObject(d, "dataset",
              {"source", "num_classes", "samples_per_class", "image_side", "distractor_strength",
               "label_noise", "seed", "unlabeled_per_class", "grid_side", "val_fraction",
               "train_images", "train_labels", "eval_images", "eval_labels"});
  Read(d, "dataset", "source", c.dataset.source);
  auto& s = c.dataset.synthetic;
  s.seed = MixSeed(c.seed, "dataset");
  Read(d, "dataset", "num_classes", s.num_classes);
  Read(d, "dataset", "samples_per_class", s.samples_per_class);
  Read(d, "dataset", "image_side", s.image_side);
  Read(d, "dataset", "distractor_strength", s.distractor_strength);
  Read(d, "dataset", "label_noise", s.label_noise);
  Read(d, "dataset", "seed", s.seed);
  Read(d, "dataset", "unlabeled_per_class", s.unlabeled_per_class);
  Read(d, "dataset", "grid_side", s.grid_side);
  Read(d, "dataset", "val_fraction", c.dataset.val_fraction);
  Read(d, "dataset", "train_images", c.dataset.train_images);
  Read(d, "dataset", "train_labels", c.dataset.train_labels);
  Read(d, "dataset", "eval_images", c.dataset.eval_images);
  Read(d, "dataset", "eval_labels", c.dataset.eval_labels);
  if (c.dataset.source == "synthetic") {
    Nested("dataset", [&] { s.Validate(); });
  } else if (c.dataset.source == "idx") {
    for (const auto& [name, value] :
         {std::pair<const char*, std::string*>{"train_images", &c.dataset.train_images},
          {"train_labels", &c.dataset.train_labels},
          {"eval_images", &c.dataset.eval_images},
          {"eval_labels", &c.dataset.eval_labels}}) {
      if (value->empty()) throw ConfigError(std::string("dataset.") + name, "required for idx");
    }
  } else {
    throw ConfigError("dataset.source", "must be 'synthetic' or 'idx'");
  }
  if (!(c.dataset.val_fraction > 0.0 && c.dataset.val_fraction < 1.0)) {
    throw ConfigError("dataset.val_fraction", "must lie in (0, 1)");
  }

  c.model = ReadTrain(j, "", "model", Defaults(5, 5, 1e-3, MixSeed(c.seed, "model")));

  if (j.contains("xai")) {
    const json& x = j.at("xai");
    CheckObject(x, "xai", {"method", "target_policy", "grid_rows", "grid_cols", "baseline",
                           "budget", "ig_steps", "workers"});
    std::string name;
    if (x.contains("method")) {
      Read(x, "xai", "method", name);
      c.xai.method = xai::ParseMethod(name);
    }
    if (x.contains("target_policy")) {
      Read(x, "xai", "target_policy", name);
      c.xai.target_policy = xai::ParseTargetPolicy(name);
    }
    if (x.contains("baseline")) {
      Read(x, "xai", "baseline", name);
      c.xai.baseline = xai::ParseBaselineMode(name);
    }
    Read(x, "xai", "grid_rows", c.xai.grid_rows);
    Read(x, "xai", "grid_cols", c.xai.grid_cols);
    Read(x, "xai", "budget", c.xai.budget);
    Read(x, "xai", "ig_steps", c.xai.ig_steps);
    Read(x, "xai", "workers", c.xai.workers);
  }
  if (c.xai.grid_rows < 1) throw ConfigError("xai.grid_rows", "must be positive");
  if (c.xai.grid_cols < 1) throw ConfigError("xai.grid_cols", "must be positive");
  if (c.xai.ig_steps < 1) throw ConfigError("xai.ig_steps", "must be positive");
  if (c.xai.workers < 1) throw ConfigError("xai.workers", "must be positive");

  auto& st = c.strategy;
  st.autoencoder_train = Defaults(200, 20, 1e-3, MixSeed(c.seed, "strategy.autoencoder"));
  st.encoder_train = Defaults(40, 8, 1e-3, MixSeed(c.seed, "strategy.encoder"));
  st.fusion_train = Defaults(100, 15, 1e-3, MixSeed(c.seed, "strategy.fusion"));
  st.joint_train = Defaults(40, 8, 1e-3, MixSeed(c.seed, "strategy.joint"));
  if (j.contains("strategy")) {
    const json& x = j.at("strategy");
    CheckObject(x, "strategy", {"latent_dim", "lambda_recon", "lambda_cls", "fine_tune",
                                "fine_tune_epochs", "autoencoder_train", "encoder_train",
                                "fusion_train", "joint_train"});
    Read(x, "strategy", "latent_dim", st.latent_dim);
    Read(x, "strategy", "lambda_recon", st.weights.lambda_recon);
    Read(x, "strategy", "lambda_cls", st.weights.lambda_cls);
    Read(x, "strategy", "fine_tune", st.fine_tune);
    Read(x, "strategy", "fine_tune_epochs", st.fine_tune_epochs);
    st.autoencoder_train = ReadTrain(x, "strategy", "autoencoder_train", st.autoencoder_train);
    st.encoder_train = ReadTrain(x, "strategy", "encoder_train", st.encoder_train);
    st.fusion_train = ReadTrain(x, "strategy", "fusion_train", st.fusion_train);
    st.joint_train = ReadTrain(x, "strategy", "joint_train", st.joint_train);
  }
  if (st.latent_dim < 1) throw ConfigError("strategy.latent_dim", "must be positive");
  if (st.fine_tune_epochs < 0) throw ConfigError("strategy.fine_tune_epochs", "must be >= 0");
  st.weights.Validate();

  if (j.contains("fusion")) {
    const json& x = j.at("fusion");
    CheckObject(x, "fusion", {"logit_mode", "architecture", "hidden_units"});
    std::string name;
    if (x.contains("logit_mode")) {
      Read(x, "fusion", "logit_mode", name);
      c.fusion.logit_mode = fusion::ParseLogitMode(name);
    }
    if (x.contains("architecture")) {
      Read(x, "fusion", "architecture", name);
      c.fusion.architecture = fusion::ParseArchitecture(name);
    }
    Read(x, "fusion", "hidden_units", c.fusion.hidden_units);
  }
  if (c.fusion.hidden_units < 1) throw ConfigError("fusion.hidden_units", "must be positive");

  if (j.contains("eval")) {
    const json& x = j.at("eval");
    CheckObject(x, "eval", {"similarity_samples", "topk", "saliency_count"});
    Read(x, "eval", "similarity_samples", c.eval.similarity_samples);
    Read(x, "eval", "topk", c.eval.topk);
    Read(x, "eval", "saliency_count", c.eval.saliency_count);
  }
  if (c.eval.similarity_samples < 0) {
    throw ConfigError("eval.similarity_samples", "must be >= 0");
  }
  if (c.eval.topk < 1) throw ConfigError("eval.topk", "must be positive");
  if (c.eval.saliency_count < 0) throw ConfigError("eval.saliency_count", "must be >= 0");

  Read(j, "", "impactx_train_fraction", c.impactx_train_fraction);
  if (!(c.impactx_train_fraction > 0.0 && c.impactx_train_fraction <= 1.0)) {
    throw ConfigError("impactx_train_fraction", "must lie in (0, 1]");
  }
  return c;
}

json ExperimentConfig::ToJson() const {
  const auto& s = dataset.synthetic;
  json d = {{"source", dataset.source}, {"val_fraction", dataset.val_fraction}};
  if (dataset.source == "synthetic") {
    d.update({{"num_classes", s.num_classes},
              {"samples_per_class", s.samples_per_class},
              {"image_side", s.image_side},
              {"distractor_strength", s.distractor_strength},
              {"label_noise", s.label_noise},
              {"seed", s.seed},
              {"unlabeled_per_class", s.unlabeled_per_class},
              {"grid_side", s.grid_side}});
  } else {
    d.update({{"train_images", dataset.train_images},
              {"train_labels", dataset.train_labels},
              {"eval_images", dataset.eval_images},
              {"eval_labels", dataset.eval_labels}});
  }
  return {{"seed", seed},
          {"dataset", d},
          {"model", model.ToJson()},
          {"xai",
           {{"method", xai::MethodName(xai.method)},
            {"target_policy", xai::TargetPolicyName(xai.target_policy)},
            {"grid_rows", xai.grid_rows},
            {"grid_cols", xai.grid_cols},
            {"baseline", xai::BaselineModeName(xai.baseline)},
            {"budget", xai.budget},
            {"ig_steps", xai.ig_steps},
            {"workers", xai.workers}}},
          {"strategy",
           {{"latent_dim", strategy.latent_dim},
            {"lambda_recon", strategy.weights.lambda_recon},
            {"lambda_cls", strategy.weights.lambda_cls},
            {"fine_tune", strategy.fine_tune},
            {"fine_tune_epochs", strategy.fine_tune_epochs},
            {"autoencoder_train", strategy.autoencoder_train.ToJson()},
            {"encoder_train", strategy.encoder_train.ToJson()},
            {"fusion_train", strategy.fusion_train.ToJson()},
            {"joint_train", strategy.joint_train.ToJson()}}},
          {"fusion",
           {{"logit_mode", fusion::LogitModeName(fusion.logit_mode)},
            {"architecture", fusion::ArchitectureName(fusion.architecture)},
            {"hidden_units", fusion.hidden_units}}},
          {"eval",
           {{"similarity_samples", eval.similarity_samples},
            {"topk", eval.topk},
            {"saliency_count", eval.saliency_count}}},
          {"impactx_train_fraction", impactx_train_fraction}};
}

std::string ExperimentConfig::Digest() const { return Sha256Hex(io::CanonicalJson(ToJson())); }

}  // namespace impactx::pipeline

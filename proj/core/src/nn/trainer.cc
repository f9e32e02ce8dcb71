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

#include "impactx/nn/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "impactx/digest.h"
#include "impactx/errors.h"

namespace impactx::nn {
namespace {

std::string GroupsDigest(const std::vector<ParamGroup>& groups) {
  std::string joined;
  for (const auto& g : groups) joined += FloatDigest(g.params);
  return Sha256Hex(joined);
}

void CheckFinite(double value, const std::string& what, int epoch, std::size_t batch) {
  if (!std::isfinite(value)) {
    throw TrainingError("non-finite " + what + " at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(batch));
  }
}

}  // namespace

void TrainConfig::Validate(const std::string& path) const {
  if (epochs < 1) throw ConfigError(path + ".epochs", "must be positive");
  if (batch_size < 1) throw ConfigError(path + ".batch_size", "must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError(path + ".learning_rate", "must be positive");
  if (!(decay1 > 0.0 && decay1 < 1.0)) throw ConfigError(path + ".decay1", "must lie in (0,1)");
  if (!(decay2 > 0.0 && decay2 < 1.0)) throw ConfigError(path + ".decay2", "must lie in (0,1)");
  if (!(epsilon > 0.0)) throw ConfigError(path + ".epsilon", "must be positive");
  if (early_stop_patience < 1) {
    throw ConfigError(path + ".early_stop_patience", "must be positive");
  }
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"epochs", epochs},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"decay1", decay1},
          {"decay2", decay2},
          {"epsilon", epsilon},
          {"seed", seed},
          {"early_stop_patience", early_stop_patience}};
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j, const std::string& path) {
  return FromJson(j, path, TrainConfig{});
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j, const std::string& path,
                                  const TrainConfig& defaults) {
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  TrainConfig c = defaults;
  auto read = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(path + "." + key, "has the wrong type");
    }
  };
  read("epochs", c.epochs);
  read("batch_size", c.batch_size);
  read("learning_rate", c.learning_rate);
  read("decay1", c.decay1);
  read("decay2", c.decay2);
  read("epsilon", c.epsilon);
  read("seed", c.seed);
  read("early_stop_patience", c.early_stop_patience);
  c.Validate(path);
  return c;
}

Adam::Adam(const TrainConfig& config, std::vector<ParamGroup> groups)
    : config_(config), groups_(std::move(groups)) {
  for (const auto& g : groups_) {
    if (g.params.size() != g.grads.size()) {
      throw ConsistencyError("parameter group " + g.name + " has mismatched grads");
    }
    m_.emplace_back(g.params.size(), 0.0f);
    v_.emplace_back(g.params.size(), 0.0f);
  }
}

void Adam::ZeroGrad() {
  for (auto& g : groups_) std::fill(g.grads.begin(), g.grads.end(), 0.0f);
}

void Adam::Step(float grad_scale) {
  ++step_;
  const double b1 = config_.decay1, b2 = config_.decay2;
  const float lr_t = static_cast<float>(config_.learning_rate *
                                        std::sqrt(1.0 - std::pow(b2, step_)) /
                                        (1.0 - std::pow(b1, step_)));
  const float fb1 = static_cast<float>(b1), fb2 = static_cast<float>(b2);
  const float eps = static_cast<float>(config_.epsilon);
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    auto& g = groups_[gi];
    float* m = m_[gi].data();
    float* v = v_[gi].data();
    for (std::size_t i = 0; i < g.params.size(); ++i) {
      const float grad = g.grads[i] * grad_scale;
      m[i] = fb1 * m[i] + (1.0f - fb1) * grad;
      v[i] = fb2 * v[i] + (1.0f - fb2) * grad * grad;
      g.params[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps);
    }
  }
}

nlohmann::json TrainingHistory::ToJson() const {
  auto rows = nlohmann::json::array();
  for (const auto& e : epochs) {
    rows.push_back({{"epoch", e.epoch},
                    {"train_loss", e.train_loss},
                    {"train_accuracy", e.train_accuracy},
                    {"train_terms", e.train_terms},
                    {"val_loss", e.val_loss},
                    {"val_accuracy", e.val_accuracy},
                    {"val_terms", e.val_terms},
                    {"params_digest", e.params_digest}});
  }
  return {{"epochs", rows},
          {"best_epoch", best_epoch},
          {"best_val_loss", best_val_loss},
          {"stopped_early", stopped_early}};
}

TrainingHistory Fit(const TrainConfig& config, std::size_t num_train,
                    const std::vector<ParamGroup>& groups, const BatchFn& batch_fn,
                    const ValidateFn& validate_fn) {
  config.Validate();
  if (num_train == 0) throw ConfigError("train", "empty training set");
  Adam adam(config, groups);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(num_train);
  std::iota(order.begin(), order.end(), 0);

  TrainingHistory history;
  history.best_val_loss = std::numeric_limits<double>::infinity();
  std::vector<std::vector<float>> best;
  for (const auto& g : groups) best.emplace_back(g.params.begin(), g.params.end());
  int since_best = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochRecord record;
    record.epoch = epoch;
    std::size_t correct = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < num_train;
         start += static_cast<std::size_t>(config.batch_size), ++batch_index) {
      const std::size_t end =
          std::min(num_train, start + static_cast<std::size_t>(config.batch_size));
      adam.ZeroGrad();
      const BatchResult r =
          batch_fn(std::span<const std::size_t>(order).subspan(start, end - start));
      for (const auto& [name, value] : r.terms) {
        CheckFinite(value, name + " loss", epoch, batch_index);
        record.train_terms[name] += value;
      }
      CheckFinite(r.loss, "loss", epoch, batch_index);
      record.train_loss += r.loss;
      correct += r.correct;
      adam.Step(1.0f / static_cast<float>(end - start));
    }
    const double n = static_cast<double>(num_train);
    record.train_loss /= n;
    record.train_accuracy = static_cast<double>(correct) / n;
    for (auto& [name, value] : record.train_terms) value /= n;

    const ValidationResult val = validate_fn();
    for (const auto& [name, value] : val.terms) {
      CheckFinite(value, "validation " + name + " loss", epoch, batch_index);
    }
    CheckFinite(val.loss, "validation loss", epoch, batch_index);
    record.val_loss = val.loss;
    record.val_accuracy = val.accuracy;
    record.val_terms = val.terms;
    record.params_digest = GroupsDigest(groups);
    history.epochs.push_back(record);

    if (val.loss < history.best_val_loss) {
      history.best_val_loss = val.loss;
      history.best_epoch = epoch;
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        std::copy(groups[gi].params.begin(), groups[gi].params.end(), best[gi].begin());
      }
      since_best = 0;
    } else if (++since_best >= config.early_stop_patience) {
      history.stopped_early = true;
      break;
    }
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    std::copy(best[gi].begin(), best[gi].end(), groups[gi].params.begin());
  }
  return history;
}

}  // namespace impactx::nn

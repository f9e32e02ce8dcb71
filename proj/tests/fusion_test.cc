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

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "impactx/errors.h"
#include "impactx/fusion/fusion_classifier.h"
#include "impactx/model/checkpoint.h"
#include "impactx/nn/ops.h"
#include "test_util.h"

namespace impactx::fusion {
namespace {

using ::impactx::testing::RandomVector;
using ::impactx::testing::TempDir;

constexpr int kK = 4;
constexpr std::size_t kLatent = 3;

struct Split {
  std::vector<std::vector<float>> inputs;
  std::vector<int> labels;
  std::vector<std::vector<float>> logits;
};

// Logits that favour the true class, with enough noise that argmax(m) is
// right only most of the time. z is identically zero.
Split NoisyLogits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0f, 1.0f);
  Split s;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % kK);
    std::vector<float> m(kK);
    for (int k = 0; k < kK; ++k) m[k] = noise(rng) + (k == y ? 1.5f : 0.0f);
    s.inputs.push_back(MakeFusedInput(std::vector<float>(kLatent, 0.0f), m,
                                      LogitMode::kRawLogits));
    s.labels.push_back(y);
    s.logits.push_back(m);
  }
  return s;
}

double ArgmaxAccuracy(const Split& s) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < s.labels.size(); ++i) {
    correct += nn::ArgMax(s.logits[i]) == s.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(s.labels.size());
}

nn::TrainConfig Config(int epochs, std::uint64_t seed = 1) {
  nn::TrainConfig c;
  c.epochs = epochs;
  c.batch_size = 32;
  c.seed = seed;
  c.early_stop_patience = epochs;
  return c;
}

TEST(FusedInputTest, LatentCodeComesFirst) {
  const std::vector<float> z = {7, 8};
  const std::vector<float> m = {2, 1, 0};
  const auto raw = MakeFusedInput(z, m, LogitMode::kRawLogits);
  EXPECT_EQ(raw, (std::vector<float>{7, 8, 2, 1, 0}));
  const auto probs = MakeFusedInput(z, m, LogitMode::kSoftmaxProbs);
  EXPECT_EQ(probs[0], 7.0f);
  EXPECT_NEAR(probs[2], 0.665241, 1e-6);
  EXPECT_NEAR(probs[2] + probs[3] + probs[4], 1.0, 1e-6);
}

TEST(FusionClassifierTest, PredictionContract) {
  FusionClassifier c(kLatent, kK, FusionOptions{});
  c.mutable_network().Initialize(3);
  EXPECT_EQ(c.input_dim(), kLatent + kK);
  EXPECT_EQ(c.network().output_size(), static_cast<std::size_t>(kK));
  const auto z = RandomVector(kLatent, 1);
  const auto m = RandomVector(kK, 2, -3.0f, 3.0f);
  const nn::Prediction a = c.FusePredict(z, m);
  const nn::Prediction b = c.FusePredict(z, m);
  EXPECT_EQ(a.probabilities, b.probabilities);
  EXPECT_NEAR(std::accumulate(a.probabilities.begin(), a.probabilities.end(), 0.0), 1.0, 1e-6);
  EXPECT_THROW(c.FusePredict(RandomVector(kLatent + 1, 1), m), InputError);
  EXPECT_THROW(c.Logits(RandomVector(2, 1)), InputError);
}

TEST(FusionClassifierTest, RelabelingSymmetry) {
  FusionClassifier c(kLatent, kK, FusionOptions{});
  c.mutable_network().Initialize(5);
  const std::vector<int> perm = {2, 0, 3, 1};  // new slot j holds old class perm[j]
  FusionClassifier p = c;
  nn::Network& net = p.mutable_network();
  const nn::Network& src = c.network();
  const std::size_t in = c.input_dim();
  const std::size_t hidden = src.layer(0).units;
  auto dst = net.params();
  auto orig = src.params();
  // First layer: permute the input columns of the m slots.
  for (std::size_t h = 0; h < hidden; ++h) {
    for (int j = 0; j < kK; ++j) {
      dst[h * in + kLatent + j] = orig[h * in + kLatent + perm[j]];
    }
  }
  // Last layer: permute output rows and biases.
  const std::size_t last = src.num_layers() - 1;
  const std::size_t off = src.param_offset(last);
  for (int j = 0; j < kK; ++j) {
    for (std::size_t h = 0; h < hidden; ++h) {
      dst[off + j * hidden + h] = orig[off + perm[j] * hidden + h];
    }
    dst[off + kK * hidden + j] = orig[off + kK * hidden + perm[j]];
  }
  const auto z = RandomVector(kLatent, 7);
  const auto m = RandomVector(kK, 8, -2.0f, 2.0f);
  std::vector<float> pm(kK);
  for (int j = 0; j < kK; ++j) pm[j] = m[perm[j]];
  const auto a = c.FusePredict(z, m).probabilities;
  const auto b = p.FusePredict(z, pm).probabilities;
  for (int j = 0; j < kK; ++j) EXPECT_NEAR(b[j], a[perm[j]], 1e-6);
}

TEST(TrainFusionTest, UninformativeCodeStillMatchesArgmaxOfLogits) {
  const Split train = NoisyLogits(2000, 1);
  const Split val = NoisyLogits(600, 2);
  const auto result = TrainFusion(train.inputs, train.labels, val.inputs, val.labels, kLatent,
                                  kK, FusionOptions{}, Config(30));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < val.labels.size(); ++i) {
    correct += nn::ArgMax(result.classifier.Logits(val.inputs[i])) == val.labels[i];
  }
  const double acc = static_cast<double>(correct) / static_cast<double>(val.labels.size());
  EXPECT_GE(acc, ArgmaxAccuracy(val) - 0.01);
}

TEST(TrainFusionTest, MemorizesRepeatedPair) {
  std::vector<std::vector<float>> inputs;
  std::vector<int> labels;
  for (int k = 0; k < kK; ++k) {
    for (int r = 0; r < 8; ++r) {
      std::vector<float> x(kLatent + kK, 0.0f);
      x[kLatent + k] = 1.0f;
      inputs.push_back(x);
      labels.push_back(k);
    }
  }
  nn::TrainConfig cfg = Config(400);
  cfg.learning_rate = 1e-2;
  const auto result =
      TrainFusion(inputs, labels, inputs, labels, kLatent, kK, FusionOptions{}, cfg);
  double loss = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    loss += nn::SoftmaxCrossEntropy(result.classifier.Logits(inputs[i]), labels[i], {});
  }
  EXPECT_LT(loss / static_cast<double>(inputs.size()), 1e-3);
}

TEST(TrainFusionTest, DeterministicAndValidated) {
  const Split train = NoisyLogits(200, 3);
  const auto a = TrainFusion(train.inputs, train.labels, train.inputs, train.labels, kLatent, kK,
                             FusionOptions{}, Config(3, 9));
  const auto b = TrainFusion(train.inputs, train.labels, train.inputs, train.labels, kLatent, kK,
                             FusionOptions{}, Config(3, 9));
  EXPECT_EQ(a.classifier.network().Digest(), b.classifier.network().Digest());

  std::vector<int> missing = train.labels;
  for (int& y : missing) y = y == 3 ? 0 : y;
  EXPECT_THROW(TrainFusion(train.inputs, missing, train.inputs, train.labels, kLatent, kK,
                           FusionOptions{}, Config(1)),
               ConfigError);
  EXPECT_THROW(TrainFusion(train.inputs, train.labels, train.inputs, train.labels, kLatent + 1,
                           kK, FusionOptions{}, Config(1)),
               ConfigError);
}

TEST(TrainFusionTest, LinearVariantHasOneDenseLayer) {
  FusionOptions o;
  o.architecture = FusionArchitecture::kLinear;
  FusionClassifier c(kLatent, kK, o);
  EXPECT_EQ(c.network().num_layers(), 1u);
  EXPECT_EQ(ParseArchitecture("linear"), FusionArchitecture::kLinear);
  EXPECT_EQ(ParseLogitMode("softmax_probs"), LogitMode::kSoftmaxProbs);
  try {
    ParseLogitMode("probabilities");
    ADD_FAILURE();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "fusion.logit_mode");
  }
}

TEST(FusionPersistenceTest, RoundTripKeepsMetadata) {
  TempDir dir;
  FusionOptions o;
  o.logit_mode = LogitMode::kSoftmaxProbs;
  FusionClassifier c(kLatent, kK, o);
  c.mutable_network().Initialize(2);
  SaveFusion(c, dir / "C.ckpt");
  const FusionClassifier back = LoadFusion(dir / "C.ckpt");
  EXPECT_EQ(back.network().Digest(), c.network().Digest());
  EXPECT_EQ(back.options().logit_mode, LogitMode::kSoftmaxProbs);
  EXPECT_EQ(back.latent_dim(), kLatent);
  const model::Checkpoint raw = model::ReadCheckpoint(dir / "C.ckpt");
  EXPECT_EQ(raw.kind, "fusion_classifier");
  EXPECT_EQ(raw.metadata.at("input_order"), (nlohmann::json{"z", "m"}));
}

}  // namespace
}  // namespace impactx::fusion

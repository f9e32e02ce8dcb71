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

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "impactx/binary_io.h"
#include "impactx/data/split.h"
#include "impactx/data/synthetic.h"
#include "impactx/errors.h"
#include "impactx/model/base_classifier.h"
#include "impactx/xai/attribution.h"
#include "impactx/xai/cache.h"
#include "impactx/xai/explain.h"
#include "impactx/xai/gradients.h"
#include "impactx/xai/grouping.h"
#include "impactx/xai/shapley.h"
#include "test_util.h"

namespace impactx::xai {
namespace {

using ::impactx::testing::RandomClassifier;
using ::impactx::testing::RandomVector;
using ::impactx::testing::TempDir;

const data::Shape3 kShape{1, 8, 8};

// f(x) = sum_i w_i x_i with an analytic gradient.
class LinearScore : public DifferentiableScore {
 public:
  explicit LinearScore(std::vector<float> w) : w_(std::move(w)) {}
  double Value(std::span<const float> x) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) acc += double{w_[i]} * x[i];
    return acc;
  }
  std::vector<float> Gradient(std::span<const float>) const override { return w_; }

 private:
  std::vector<float> w_;
};

// f(x) = x_0^2.
class SquareScore : public DifferentiableScore {
 public:
  double Value(std::span<const float> x) const override { return double{x[0]} * x[0]; }
  std::vector<float> Gradient(std::span<const float> x) const override { return {2 * x[0]}; }
};

TEST(ExactShapleyTest, ConstantGameGivesZero) {
  const auto phi = ExactShapley([](std::uint64_t) { return 3.5; }, 6);
  for (double v : phi) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(ExactShapleyTest, AdditiveModelWithSingletonGroups) {
  const std::vector<double> w = {0.5, -1.0, 2.0, 0.25};
  const std::vector<double> x = {1.0, 0.2, 0.7, 0.9};
  const std::vector<double> b = {0.1, 0.4, 0.0, 0.5};
  auto v = [&](std::uint64_t s) {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += w[i] * ((s >> i & 1U) ? x[i] : b[i]);
    return acc;
  };
  const auto phi = ExactShapley(v, 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(phi[i], w[i] * (x[i] - b[i]), 1e-12);
}

TEST(ExactShapleyTest, AndGameSplitsEqually) {
  const auto phi = ExactShapley([](std::uint64_t s) { return s == 3 ? 1.0 : 0.0; }, 2);
  EXPECT_NEAR(phi[0], 0.5, 1e-12);
  EXPECT_NEAR(phi[1], 0.5, 1e-12);
}

TEST(ExactShapleyTest, TooManyGroupsIsCapacityError) {
  EXPECT_THROW(ExactShapley([](std::uint64_t) { return 0.0; }, kMaxExactGroups + 1),
               CapacityError);
}

TEST(ExactShapleyTest, AxiomsOnRandomGames) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int G = 7;
  std::vector<double> table1(1U << G), table2(1U << G);
  for (auto& t : table1) t = u(rng);
  for (auto& t : table2) t = u(rng);
  // Make group 6 a dummy in game 1 and groups 0/1 symmetric in game 2.
  for (std::uint64_t s = 0; s < table1.size(); ++s) table1[s] = table1[s & ~(1ULL << 6)];
  for (std::uint64_t s = 0; s < table2.size(); ++s) {
    const std::uint64_t swapped = (s & ~3ULL) | ((s & 1ULL) << 1) | ((s >> 1) & 1ULL);
    table2[swapped] = table2[s];
  }
  auto v1 = [&](std::uint64_t s) { return table1[s]; };
  auto v2 = [&](std::uint64_t s) { return table2[s]; };
  const auto p1 = ExactShapley(v1, G);
  const auto p2 = ExactShapley(v2, G);
  const auto p12 = ExactShapley([&](std::uint64_t s) { return v1(s) + v2(s); }, G);
  const std::uint64_t full = (1ULL << G) - 1;
  EXPECT_NEAR(std::accumulate(p1.begin(), p1.end(), 0.0), v1(full) - v1(0), 1e-9);
  EXPECT_NEAR(p1[6], 0.0, 1e-9);
  EXPECT_NEAR(p2[0], p2[1], 1e-9);
  for (int i = 0; i < G; ++i) EXPECT_NEAR(p12[i], p1[i] + p2[i], 1e-9);
}

TEST(CoalitionSamplingTest, BudgetIsFilledWithoutReplacement) {
  for (std::size_t budget : {14, 100, 500, 2000}) {
    const auto coalitions = SampleCoalitions(12, budget, 3);
    EXPECT_EQ(coalitions.size(), budget);
    std::set<std::uint64_t> seen;
    for (const auto& c : coalitions) {
      EXPECT_NE(c.mask, 0u);
      EXPECT_NE(c.mask, (1ULL << 12) - 1);
      EXPECT_GT(c.weight, 0.0);
      EXPECT_TRUE(seen.insert(c.mask).second);
    }
  }
  EXPECT_EQ(FullEnumerationBudget(9), 510u);
  EXPECT_EQ(SampleCoalitions(9, 510, 1).size(), 510u);
}

TEST(KernelShapTest, FullEnumerationMatchesOracleOnCnn) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto m = RandomClassifier(kShape, 3, 30 + seed);
    const auto x = RandomVector(kShape.numel(), 40 + seed);
    const auto grouping = FeatureGrouping::Grid(kShape, 2, 4);
    const auto baseline = BaselineSpec::Zero(kShape);
    ModelCoalitionValue v(m, x, baseline, grouping, 1);
    const auto exact = ExactShapley(v.AsFunction(), 8);
    const auto kernel = KernelShap(v.AsFunction(), 8, FullEnumerationBudget(8), seed);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(kernel[i], exact[i], 1e-5);
  }
}

TEST(KernelShapTest, ConstantGameGivesZeroForAnySampling) {
  for (std::size_t budget : {12, 40, 200}) {
    const auto phi = KernelShap([](std::uint64_t) { return -2.0; }, 10, budget, budget);
    for (double v : phi) EXPECT_NEAR(v, 0.0, 1e-9);
  }
}

TEST(KernelShapTest, EfficiencyHoldsUnderSampling) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> table(1U << 10);
  for (auto& t : table) t = u(rng);
  auto v = [&](std::uint64_t s) { return table[s]; };
  const auto phi = KernelShap(v, 10, 300, 5);
  EXPECT_NEAR(std::accumulate(phi.begin(), phi.end(), 0.0), table.back() - table[0], 1e-5);
}

TEST(KernelShapTest, DeterministicPerSeedAndBudgetChecked) {
  std::vector<double> table(1U << 9);
  std::iota(table.begin(), table.end(), 0.0);
  for (auto& t : table) t = std::sin(t);
  auto v = [&](std::uint64_t s) { return table[s]; };
  EXPECT_EQ(KernelShap(v, 9, 100, 2), KernelShap(v, 9, 100, 2));
  EXPECT_THROW(KernelShap(v, 9, 10, 2), ConfigError);
}

TEST(IntegratedGradientsTest, LinearModelIsExactAtOneStep) {
  const auto w = RandomVector(6, 1, -1.0f, 1.0f);
  const auto x = RandomVector(6, 2);
  const auto b = RandomVector(6, 3);
  LinearScore f(w);
  const auto ig = IntegratedGradientsPerFeature(f, x, b, 1);
  const auto gxi = GradientTimesInputPerFeature(f, x, b);
  for (std::size_t i = 0; i < 6; ++i) {
    const double expected = double{w[i]} * (double{x[i]} - double{b[i]});
    EXPECT_NEAR(ig[i], expected, 1e-6);
    EXPECT_NEAR(gxi[i], ig[i], 1e-6);
  }
}

TEST(IntegratedGradientsTest, QuadraticCompleteness) {
  SquareScore f;
  for (int steps : {1, 4, 64}) {
    const auto ig = IntegratedGradientsPerFeature(f, std::vector<float>{2.0f},
                                                  std::vector<float>{0.0f}, steps);
    EXPECT_NEAR(ig[0], 4.0, 1e-9) << steps;
  }
}

TEST(IntegratedGradientsTest, CnnCompletenessAt512Steps) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto m = RandomClassifier(kShape, 3, 60 + seed);
    const auto x = RandomVector(kShape.numel(), 70 + seed);
    const auto b = RandomVector(kShape.numel(), 80 + seed, 0.0f, 0.2f);
    ClassLogitScore f(m, 2);
    const auto ig = IntegratedGradientsPerFeature(f, x, b, 512);
    const double delta = f.Value(x) - f.Value(b);
    const double sum = std::accumulate(ig.begin(), ig.end(), 0.0);
    EXPECT_LE(std::abs(sum - delta), 1e-3 * std::abs(delta) + 1e-4);
  }
}

TEST(IntegratedGradientsTest, ModelLevelValidation) {
  const auto m = RandomClassifier(kShape, 3, 1);
  const data::Sample x{0, RandomVector(kShape.numel(), 2)};
  const auto g = FeatureGrouping::Grid(kShape, 2, 2);
  const auto b = BaselineSpec::Zero(kShape);
  EXPECT_THROW(IntegratedGradients(m, x, b, g, 0, kMinIntegrationSteps - 1), ConfigError);
  EXPECT_THROW(IntegratedGradients(m, x, b, g, 3, 32), InputError);
  const AttributionMap map = IntegratedGradients(m, x, b, g, 0, 32);
  EXPECT_EQ(map.values.size(), 4u);
  EXPECT_EQ(map.method, AttributionMethod::kIntegratedGradients);
}

TEST(GradientTimesInputTest, EqualsFirstOrderTaylorTerm) {
  const auto m = RandomClassifier(kShape, 3, 5);
  const auto x = RandomVector(kShape.numel(), 6);
  const auto b = RandomVector(kShape.numel(), 7);
  ClassLogitScore f(m, 1);
  const auto gxi = GradientTimesInputPerFeature(f, x, b);
  const auto grad = m.ClassScoreGradient(x, 1);
  double taylor = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) taylor += double{grad[i]} * (x[i] - b[i]);
  EXPECT_NEAR(std::accumulate(gxi.begin(), gxi.end(), 0.0), taylor, 1e-5);
}

TEST(GroupingTest, GridPartitionsEveryFeatureOnce) {
  const data::Shape3 shape{2, 16, 16};
  const auto g = FeatureGrouping::Grid(shape, 3, 3);
  EXPECT_EQ(g.num_groups(), 9);
  std::vector<int> hits(shape.numel(), 0);
  for (int k = 0; k < 9; ++k) {
    for (std::size_t f : g.members(k)) ++hits[f];
  }
  for (int h : hits) EXPECT_EQ(h, 1);
  const auto expanded = g.Expand(std::vector<float>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  for (int k = 0; k < 9; ++k) {
    for (std::size_t f : g.members(k)) EXPECT_EQ(expanded[f], static_cast<float>(k + 1));
  }
  EXPECT_THROW(FeatureGrouping::Grid(shape, 1, 1), ConfigError);
}

TEST(BaselineTest, DatasetMeanIsPerFeatureMean) {
  const auto d = testing::RandomDataset(kShape, 2, 10, 3);
  const auto b = BaselineSpec::DatasetMean(d);
  for (std::size_t p = 0; p < kShape.numel(); ++p) {
    double mean = 0.0;
    for (const auto& s : d.samples()) mean += s.features[p];
    mean /= 10.0;
    EXPECT_NEAR(b.reference[p], mean, 1e-6);
    EXPECT_GE(b.reference[p], 0.0f);
    EXPECT_LE(b.reference[p], 1.0f);
  }
  EXPECT_NE(b.Digest(), BaselineSpec::Zero(kShape).Digest());
}

TEST(CoalitionValueTest, EndpointsAreModelLogits) {
  const auto m = RandomClassifier(kShape, 3, 9);
  const auto x = RandomVector(kShape.numel(), 10);
  const auto d = testing::RandomDataset(kShape, 3, 12, 11);
  const auto b = BaselineSpec::DatasetMean(d);
  const auto g = FeatureGrouping::Grid(kShape, 2, 2);
  ModelCoalitionValue v(m, x, b, g, 2);
  EXPECT_NEAR(v(15), m.PredictLogits(x)[2], 1e-6);
  EXPECT_NEAR(v(0), m.PredictLogits(b.reference)[2], 1e-6);
}

class ExplainDatasetTest : public ::testing::Test {
 protected:
  ExplainDatasetTest()
      : model_(RandomClassifier(kShape, 3, 21)),
        data_(testing::RandomDataset(kShape, 3, 12, 22)),
        grouping_(FeatureGrouping::Grid(kShape, 2, 2)),
        baseline_(BaselineSpec::DatasetMean(data_)) {}

  ExplainOptions Options() const {
    ExplainOptions o;
    o.budget = FullEnumerationBudget(4);
    o.cache_dir = dir_.path() / "cache";
    return o;
  }

  TempDir dir_;
  model::BaseClassifier model_;
  data::LabeledDataset data_;
  FeatureGrouping grouping_;
  BaselineSpec baseline_;
};

TEST_F(ExplainDatasetTest, SecondRunIsServedFromCache) {
  const auto first = ExplainDataset(model_, data_, baseline_, grouping_, Options());
  EXPECT_EQ(first.stats.cache_misses, 12u);
  EXPECT_GT(first.stats.value_evaluations, 0u);
  const auto second = ExplainDataset(model_, data_, baseline_, grouping_, Options());
  EXPECT_EQ(second.stats.cache_hits, 12u);
  EXPECT_EQ(second.stats.value_evaluations, 0u);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(first.maps[i].values, second.maps[i].values);
    EXPECT_EQ(first.maps[i].raw_scale, second.maps[i].raw_scale);
  }
  auto cache_only = Options();
  cache_only.cache_only = true;
  EXPECT_NO_THROW(ExplainDataset(model_, data_, baseline_, grouping_, cache_only));
  auto other_seed = cache_only;
  other_seed.seed = 99;
  EXPECT_THROW(ExplainDataset(model_, data_, baseline_, grouping_, other_seed), CacheMissError);
}

TEST_F(ExplainDatasetTest, CacheFilesCarryModelHash) {
  ExplainDataset(model_, data_, baseline_, grouping_, Options());
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir_.path() / "cache")) {
    const io::Container c = io::ReadContainer(entry.path());
    EXPECT_EQ(c.header.at("model_hash"), model_.checkpoint_hash());
    EXPECT_EQ(c.header.at("kind"), "attribution");
    ++files;
  }
  EXPECT_EQ(files, 12u);
}

TEST_F(ExplainDatasetTest, CorruptEntryIsRecomputedWithWarning) {
  const auto first = ExplainDataset(model_, data_, baseline_, grouping_, Options());
  const auto victim = std::filesystem::directory_iterator(dir_.path() / "cache")->path();
  auto bytes = io::ReadFile(victim);
  bytes[bytes.size() - 10] ^= 0xFF;
  io::WriteFileAtomic(victim, bytes);
  const auto second = ExplainDataset(model_, data_, baseline_, grouping_, Options());
  EXPECT_EQ(second.stats.cache_misses, 1u);
  EXPECT_FALSE(second.stats.warnings.empty());
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(first.maps[i].values, second.maps[i].values);
}

TEST_F(ExplainDatasetTest, TargetPolicies) {
  auto o = Options();
  const auto truth = ExplainDataset(model_, data_, baseline_, grouping_, o);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    EXPECT_EQ(truth.maps[i].target_class, data_.label(i));
    EXPECT_EQ(truth.maps[i].sample_id, data_.sample(i).id);
  }
  o.policy = TargetPolicy::kPredictedClass;
  const auto predicted = ExplainDataset(model_, data_, baseline_, grouping_, o);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    EXPECT_EQ(predicted.maps[i].target_class, model_.PredictLabel(data_.sample(i)).label);
  }
  const auto unlabeled = data::HideLabels(data_);
  o.policy = TargetPolicy::kTrueClass;
  EXPECT_THROW(ExplainDataset(model_, unlabeled, baseline_, grouping_, o), ConfigError);
}

TEST_F(ExplainDatasetTest, MapsAreNormalizedAndWorkerIndependent) {
  auto o = Options();
  o.cache_dir.reset();
  const auto one = ExplainDataset(model_, data_, baseline_, grouping_, o);
  o.workers = 3;
  const auto three = ExplainDataset(model_, data_, baseline_, grouping_, o);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    EXPECT_EQ(one.maps[i].values, three.maps[i].values);
    float max_abs = 0.0f;
    for (float v : one.maps[i].values) max_abs = std::max(max_abs, std::abs(v));
    EXPECT_NEAR(max_abs, 1.0f, 1e-6);
  }
}

TEST_F(ExplainDatasetTest, AttributionCallsAreCounted) {
  auto o = Options();
  o.cache_dir.reset();
  const std::uint64_t before = AttributionCallCount();
  ExplainDataset(model_, data_, baseline_, grouping_, o);
  EXPECT_GT(AttributionCallCount(), before);
}

// A well-trained M on zero-distractor data puts its largest true-class
// attribution on a group that overlaps the ground-truth patch.
TEST(LocalizationTest, TopGroupHitsGroundTruthPatch) {
  data::PatchDatasetOptions o;
  o.num_classes = 4;
  o.samples_per_class = 60;
  o.distractor_strength = 0.0;
  o.seed = 5;
  const auto ds = data::GeneratePatchDataset(o);
  const auto [train, val] = data::StratifiedSplit(ds.labeled, 0.2, 1);
  nn::TrainConfig cfg;
  cfg.epochs = 15;
  cfg.batch_size = 16;
  const auto m = model::Pretrain(train, val, cfg);
  const auto grouping = FeatureGrouping::Grid(train.shape(), 3, 3);
  const auto baseline = BaselineSpec::DatasetMean(train);
  std::size_t correct = 0, hits = 0;
  for (std::size_t i = 0; i < val.size(); ++i) {
    if (m.PredictLabel(val.sample(i)).label != val.label(i)) continue;
    ++correct;
    const auto map =
        ExactShapleyMap(m, val.sample(i), baseline, grouping, val.label(i));
    const int top = static_cast<int>(std::max_element(map.values.begin(), map.values.end()) -
                                     map.values.begin());
    const auto& mask = ds.masks.masks.at(val.sample(i).id);
    bool hit = false;
    for (std::size_t f : grouping.members(top)) hit |= mask[f] != 0;
    hits += hit;
  }
  ASSERT_GT(correct, 0u);
  EXPECT_GE(static_cast<double>(hits), 0.9 * static_cast<double>(correct));
}

}  // namespace
}  // namespace impactx::xai

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

// Micro benchmarks for the hot paths: the convolutional forward pass and the
// two Shapley estimators on a model-backed coalition game.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "impactx/data/dataset.h"
#include "impactx/model/base_classifier.h"
#include "impactx/xai/grouping.h"
#include "impactx/xai/shapley.h"

namespace {

using impactx::data::Sample;
using impactx::data::Shape3;

const Shape3 kShape{1, 16, 16};

impactx::model::BaseClassifier MakeModel() {
  auto net = impactx::model::MakeBackbone(kShape, 10);
  net.Initialize(7);
  return impactx::model::BaseClassifier(std::move(net), 10, /*frozen=*/true);
}

Sample MakeSample() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Sample s;
  s.features.resize(kShape.numel());
  for (float& v : s.features) v = u(rng);
  return s;
}

void BM_BackboneForward(benchmark::State& state) {
  const auto model = MakeModel();
  const Sample x = MakeSample();
  for (auto _ : state) benchmark::DoNotOptimize(model.PredictLogits(x));
}
BENCHMARK(BM_BackboneForward);

void BM_ExactShapley(benchmark::State& state) {
  const auto model = MakeModel();
  const Sample x = MakeSample();
  const int side = static_cast<int>(state.range(0));
  const auto grouping = impactx::xai::FeatureGrouping::Grid(kShape, side, side);
  const auto baseline = impactx::xai::BaselineSpec::Zero(kShape);
  for (auto _ : state) {
    benchmark::DoNotOptimize(impactx::xai::ExactShapleyMap(model, x, baseline, grouping, 0));
  }
}
BENCHMARK(BM_ExactShapley)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_KernelShap(benchmark::State& state) {
  const auto model = MakeModel();
  const Sample x = MakeSample();
  const auto grouping = impactx::xai::FeatureGrouping::Grid(kShape, 3, 4);
  const auto baseline = impactx::xai::BaselineSpec::Zero(kShape);
  const auto budget = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        impactx::xai::KernelShapMap(model, x, baseline, grouping, 0, budget, 11));
  }
}
BENCHMARK(BM_KernelShap)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

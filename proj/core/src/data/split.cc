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

#include "impactx/data/split.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "impactx/errors.h"

namespace impactx::data {
namespace {

std::vector<std::vector<std::size_t>> IndicesByClass(const LabeledDataset& d) {
  std::vector<std::vector<std::size_t>> by_class(d.num_classes());
  for (std::size_t i = 0; i < d.size(); ++i) by_class[d.label(i)].push_back(i);
  return by_class;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> StratifiedSplit(
    const LabeledDataset& dataset, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("val_fraction", "must lie in (0, 1)");
  }
  if (static_cast<double>(dataset.size()) * val_fraction <
      static_cast<double>(dataset.num_classes())) {
    throw ConfigError("val_fraction",
                      "n * val_fraction must be >= num_classes for stratification");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train_idx, val_idx;
  for (auto& members : IndicesByClass(dataset)) {
    if (members.empty()) continue;
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t c = members.size();
    auto take = static_cast<std::size_t>(
        std::floor(static_cast<double>(c) * val_fraction + 0.5));
    take = std::max<std::size_t>(take, 1);
    if (c > 1) take = std::min(take, c - 1);
    val_idx.insert(val_idx.end(), members.begin(), members.begin() + take);
    train_idx.insert(train_idx.end(), members.begin() + take, members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  return {dataset.Subset(train_idx, SplitTag::kTrain),
          dataset.Subset(val_idx, SplitTag::kVal)};
}

std::vector<std::size_t> StratifiedSubset(const LabeledDataset& dataset,
                                          double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("impactx_train_fraction", "must lie in (0, 1]");
  }
  const std::size_t n = dataset.size();
  const auto target = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n) - 1e-9));
  auto by_class = IndicesByClass(dataset);
  const std::size_t K = by_class.size();
  std::vector<std::size_t> quota(K);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const double exact = fraction * static_cast<double>(by_class[k].size());
    quota[k] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[k];
    remainders.emplace_back(-(exact - std::floor(exact)), k);
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t i = 0; assigned < target && i < K; ++i) {
    const std::size_t k = remainders[i].second;
    if (quota[k] < by_class[k].size()) {
      ++quota[k];
      ++assigned;
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < K; ++k) {
    auto& members = by_class[k];
    std::shuffle(members.begin(), members.end(), rng);
    out.insert(out.end(), members.begin(), members.begin() + quota[k]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

UnlabeledDataset HideLabels(const LabeledDataset& source) {
  return UnlabeledDataset(source.shape(), source.samples(), source.num_classes(),
                          source.labels());
}

}  // namespace impactx::data

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

#ifndef IMPACTX_DATA_SPLIT_H_
#define IMPACTX_DATA_SPLIT_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "impactx/data/dataset.h"

namespace impactx::data {

// Stratified train/val split. Each class contributes round(count * fraction)
// validation samples, at least one and leaving at least one for training.
// Requires n * val_fraction >= num_classes.
std::pair<LabeledDataset, LabeledDataset> StratifiedSplit(
    const LabeledDataset& dataset, double val_fraction, std::uint64_t seed);

// Indices of a stratified subset holding exactly ceil(fraction * n) samples,
// sorted ascending. fraction must lie in (0, 1].
std::vector<std::size_t> StratifiedSubset(const LabeledDataset& dataset,
                                          double fraction, std::uint64_t seed);

// Copies U with its hidden labels taken from `source` (used for IDX eval
// files and tests).
UnlabeledDataset HideLabels(const LabeledDataset& source);

}  // namespace impactx::data

#endif  // IMPACTX_DATA_SPLIT_H_

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

#ifndef IMPACTX_DATA_SYNTHETIC_H_
#define IMPACTX_DATA_SYNTHETIC_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "impactx/data/dataset.h"

namespace impactx::data {

// Patch-pattern images with known class-discriminative regions.
//
// The image is divided into a grid_side x grid_side grid of cells. Class k
// owns cell (k mod grid_side^2) and a fixed binary-valued pattern with
// entries in {0.6, 1.0}. A sample of class k carries its own pattern in its
// own cell. With distractor_strength d > 0 each sample additionally gets
// uniform background noise of amplitude 0.6*d, a true-pattern amplitude in
// [1 - 0.6*d, 1], and two patterns of other classes stamped in their cells
// with amplitude in [0.7*d, 1.4*d]. Values are clamped to [0, 1].
struct PatchDatasetOptions {
  int num_classes = 10;
  int samples_per_class = 200;
  int image_side = 16;
  double distractor_strength = 0.5;
  double label_noise = 0.0;
  std::uint64_t seed = 0;
  // <= 0 selects the default of 2 * samples_per_class.
  int unlabeled_per_class = 0;
  int grid_side = 4;

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

struct PatchDataset {
  LabeledDataset labeled;
  UnlabeledDataset unlabeled;
  GroundTruthMasks masks;
};

PatchDataset GeneratePatchDataset(const PatchDatasetOptions& options);

// (row, col) of the cell owned by class k.
std::pair<int, int> ClassCell(int k, int grid_side);
// cell x cell row-major pattern of class k.
std::vector<float> ClassPattern(int k, int cell);

}  // namespace impactx::data

#endif  // IMPACTX_DATA_SYNTHETIC_H_

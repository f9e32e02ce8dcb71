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

#ifndef IMPACTX_XAI_GROUPING_H_
#define IMPACTX_XAI_GROUPING_H_

#include <span>
#include <string>
#include <vector>

#include "impactx/data/dataset.h"
#include "json.hpp"

namespace impactx::xai {

// Partition of the spatial positions of an input into G groups; every
// channel of a position belongs to the position's group.
class FeatureGrouping {
 public:
  FeatureGrouping() = default;
  // group_of_pixel has height*width entries in [0, num_groups); every group
  // must be non-empty and num_groups >= 2.
  FeatureGrouping(data::Shape3 shape, std::vector<int> group_of_pixel, int num_groups);

  // rows x cols rectangular cells. Cell boundaries are floor(i * side / n),
  // so sides need not be divisible by the grid.
  static FeatureGrouping Grid(const data::Shape3& shape, int rows, int cols);

  int num_groups() const { return num_groups_; }
  const data::Shape3& shape() const { return shape_; }
  int group_of_pixel(std::size_t pixel) const { return group_of_pixel_[pixel]; }
  // Flat feature indices (all channels) belonging to group g.
  const std::vector<std::size_t>& members(int g) const { return members_[g]; }

  std::vector<double> GroupSum(std::span<const double> per_feature) const;
  // Broadcast one value per group back to every feature of the input.
  std::vector<float> Expand(std::span<const float> group_values) const;

  std::string Digest() const;
  nlohmann::json Describe() const;

 private:
  data::Shape3 shape_;
  std::vector<int> group_of_pixel_;
  int num_groups_ = 0;
  std::vector<std::vector<std::size_t>> members_;
};

enum class BaselineMode { kZero, kDatasetMean };

const char* BaselineModeName(BaselineMode mode);
BaselineMode ParseBaselineMode(const std::string& name);

// Reference input for masking (SHAP) and path origin (integrated gradients).
struct BaselineSpec {
  BaselineMode mode = BaselineMode::kZero;
  data::Shape3 shape;
  std::vector<float> reference;

  static BaselineSpec Zero(const data::Shape3& shape);
  // Per-feature mean over the labeled training set.
  static BaselineSpec DatasetMean(const data::LabeledDataset& train);

  std::string Digest() const;
};

}  // namespace impactx::xai

#endif  // IMPACTX_XAI_GROUPING_H_

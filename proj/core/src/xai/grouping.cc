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

#include "impactx/xai/grouping.h"

#include <cmath>

#include "impactx/digest.h"
#include "impactx/errors.h"

namespace impactx::xai {

FeatureGrouping::FeatureGrouping(data::Shape3 shape, std::vector<int> group_of_pixel,
                                 int num_groups)
    : shape_(shape), group_of_pixel_(std::move(group_of_pixel)), num_groups_(num_groups) {
  if (num_groups_ < 2) throw ConfigError("grouping", "needs at least 2 groups");
  if (group_of_pixel_.size() != shape_.spatial()) {
    throw ConsistencyError("grouping does not cover the spatial grid");
  }
  members_.assign(num_groups_, {});
  const std::size_t plane = shape_.spatial();
  for (std::size_t c = 0; c < shape_.channels; ++c) {
    for (std::size_t p = 0; p < plane; ++p) {
      const int g = group_of_pixel_[p];
      if (g < 0 || g >= num_groups_) throw ConsistencyError("group index out of range");
      members_[g].push_back(c * plane + p);
    }
  }
  for (const auto& m : members_) {
    if (m.empty()) throw ConsistencyError("grouping has an empty group");
  }
}

FeatureGrouping FeatureGrouping::Grid(const data::Shape3& shape, int rows, int cols) {
  if (rows < 1 || cols < 1 || static_cast<std::size_t>(rows) > shape.height ||
      static_cast<std::size_t>(cols) > shape.width) {
    throw ConfigError("grouping", "grid " + std::to_string(rows) + "x" +
                                      std::to_string(cols) + " does not fit " +
                                      shape.ToString());
  }
  std::vector<int> assign(shape.spatial());
  for (std::size_t y = 0; y < shape.height; ++y) {
    const std::size_t r = y * rows / shape.height;
    for (std::size_t x = 0; x < shape.width; ++x) {
      const std::size_t c = x * cols / shape.width;
      assign[y * shape.width + x] = static_cast<int>(r * cols + c);
    }
  }
  return FeatureGrouping(shape, std::move(assign), rows * cols);
}

std::vector<double> FeatureGrouping::GroupSum(std::span<const double> per_feature) const {
  if (per_feature.size() != shape_.numel()) throw InputError("group sum size mismatch");
  std::vector<double> out(num_groups_, 0.0);
  for (int g = 0; g < num_groups_; ++g) {
    for (std::size_t i : members_[g]) out[g] += per_feature[i];
  }
  return out;
}

std::vector<float> FeatureGrouping::Expand(std::span<const float> group_values) const {
  if (group_values.size() != static_cast<std::size_t>(num_groups_)) {
    throw InputError("expansion expects one value per group");
  }
  std::vector<float> out(shape_.numel());
  for (int g = 0; g < num_groups_; ++g) {
    for (std::size_t i : members_[g]) out[i] = group_values[g];
  }
  return out;
}

nlohmann::json FeatureGrouping::Describe() const {
  return {{"shape", {shape_.channels, shape_.height, shape_.width}},
          {"num_groups", num_groups_},
          {"assignment", group_of_pixel_}};
}

std::string FeatureGrouping::Digest() const { return Sha256Hex(Describe().dump()); }

const char* BaselineModeName(BaselineMode mode) {
  return mode == BaselineMode::kZero ? "zero" : "dataset_mean";
}

BaselineMode ParseBaselineMode(const std::string& name) {
  if (name == "zero") return BaselineMode::kZero;
  if (name == "dataset_mean") return BaselineMode::kDatasetMean;
  throw ConfigError("xai.baseline", "unknown baseline mode '" + name + "'");
}

BaselineSpec BaselineSpec::Zero(const data::Shape3& shape) {
  return {BaselineMode::kZero, shape, std::vector<float>(shape.numel(), 0.0f)};
}

BaselineSpec BaselineSpec::DatasetMean(const data::LabeledDataset& train) {
  if (train.size() == 0) throw ConfigError("xai.baseline", "mean of an empty dataset");
  std::vector<double> sum(train.shape().numel(), 0.0);
  for (const auto& s : train.samples()) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += s.features[i];
  }
  BaselineSpec out{BaselineMode::kDatasetMean, train.shape(), {}};
  out.reference.resize(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) {
    out.reference[i] = static_cast<float>(sum[i] / static_cast<double>(train.size()));
  }
  return out;
}

std::string BaselineSpec::Digest() const {
  return Sha256Hex(std::string(BaselineModeName(mode)) + ":" + FloatDigest(reference));
}

}  // namespace impactx::xai

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

#ifndef IMPACTX_DATA_DATASET_H_
#define IMPACTX_DATA_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace impactx::eval {
class LabelAccess;
}  // namespace impactx::eval

namespace impactx::data {

struct Shape3 {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t numel() const { return channels * height * width; }
  std::size_t spatial() const { return height * width; }
  bool operator==(const Shape3&) const = default;
  std::string ToString() const;
};

// One input x: a (channels, height, width) tensor stored row-major.
struct Sample {
  std::int64_t id = 0;
  std::vector<float> features;
};

enum class SplitTag { kTrain, kVal };
const char* SplitTagName(SplitTag tag);

// The labeled set D. Immutable after construction.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  // Throws ConsistencyError when sizes, labels, shapes or ids are invalid.
  LabeledDataset(Shape3 shape, std::vector<Sample> samples,
                 std::vector<int> labels, int num_classes, SplitTag tag);

  std::size_t size() const { return samples_.size(); }
  const Shape3& shape() const { return shape_; }
  int num_classes() const { return num_classes_; }
  SplitTag split_tag() const { return tag_; }
  const Sample& sample(std::size_t i) const { return samples_[i]; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<Sample>& samples() const { return samples_; }
  const std::vector<int>& labels() const { return labels_; }

  std::vector<std::size_t> ClassCounts() const;
  // Index of the sample with `id`, if present.
  std::optional<std::size_t> IndexOf(std::int64_t id) const;
  LabeledDataset Subset(std::span<const std::size_t> indices,
                        SplitTag tag) const;

 private:
  Shape3 shape_;
  std::vector<Sample> samples_;
  std::vector<int> labels_;
  int num_classes_ = 0;
  SplitTag tag_ = SplitTag::kTrain;
  std::map<std::int64_t, std::size_t> index_;
};

class UnlabeledDataset;
void SaveUnlabeled(const UnlabeledDataset& dataset,
                   const std::filesystem::path& path);

// The unlabeled set U. Hidden labels are reachable only through
// eval::LabelAccess; nothing on the training side can see them.
class UnlabeledDataset {
 public:
  UnlabeledDataset() = default;
  UnlabeledDataset(Shape3 shape, std::vector<Sample> samples, int num_classes,
                   std::optional<std::vector<int>> hidden_labels);

  std::size_t size() const { return samples_.size(); }
  const Shape3& shape() const { return shape_; }
  int num_classes() const { return num_classes_; }
  const Sample& sample(std::size_t i) const { return samples_[i]; }
  const std::vector<Sample>& samples() const { return samples_; }
  bool has_hidden_labels() const { return hidden_labels_.has_value(); }

 private:
  friend class ::impactx::eval::LabelAccess;
  friend void SaveUnlabeled(const UnlabeledDataset&, const std::filesystem::path&);

  Shape3 shape_;
  std::vector<Sample> samples_;
  int num_classes_ = 0;
  std::optional<std::vector<int>> hidden_labels_;
};

// Class-discriminative regions stamped by the synthetic generator, keyed by
// sample id. Each mask is height*width bytes in {0,1}.
struct GroundTruthMasks {
  std::size_t height = 0;
  std::size_t width = 0;
  std::map<std::int64_t, std::vector<std::uint8_t>> masks;
};

// Persistence through the XAICACHE container with header kind "dataset"
// (and "masks" for ground-truth masks).
void SaveLabeled(const LabeledDataset& dataset, const std::filesystem::path& path);
LabeledDataset LoadLabeled(const std::filesystem::path& path);
void SaveUnlabeled(const UnlabeledDataset& dataset,
                   const std::filesystem::path& path);
UnlabeledDataset LoadUnlabeled(const std::filesystem::path& path);
void SaveMasks(const GroundTruthMasks& masks, const std::filesystem::path& path);
GroundTruthMasks LoadMasks(const std::filesystem::path& path);

}  // namespace impactx::data

#endif  // IMPACTX_DATA_DATASET_H_

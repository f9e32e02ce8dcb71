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

#include "impactx/data/dataset.h"

#include <cmath>

#include "impactx/binary_io.h"
#include "impactx/errors.h"

namespace impactx::data {
namespace {

void CheckSamples(const Shape3& shape, const std::vector<Sample>& samples,
                  std::map<std::int64_t, std::size_t>* index) {
  if (shape.numel() == 0) throw ConsistencyError("dataset shape is empty");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (s.id < 0) throw ConsistencyError("negative sample id");
    if (s.features.size() != shape.numel()) {
      throw ConsistencyError("sample " + std::to_string(s.id) +
                             " does not match dataset shape " + shape.ToString());
    }
    for (float v : s.features) {
      if (!std::isfinite(v)) {
        throw ConsistencyError("sample " + std::to_string(s.id) +
                               " has a non-finite feature");
      }
    }
    if (!index->emplace(s.id, i).second) {
      throw ConsistencyError("duplicate sample id " + std::to_string(s.id));
    }
  }
}

nlohmann::json IdsJson(const std::vector<Sample>& samples) {
  auto ids = nlohmann::json::array();
  for (const auto& s : samples) ids.push_back(s.id);
  return ids;
}

std::vector<float> Flatten(const std::vector<Sample>& samples) {
  std::vector<float> out;
  for (const auto& s : samples) {
    out.insert(out.end(), s.features.begin(), s.features.end());
  }
  return out;
}

std::pair<Shape3, std::vector<Sample>> Unflatten(const io::Container& c) {
  const auto& shape = c.header.at("shape");
  if (shape.size() != 4) throw FormatError("dataset shape must be (n,c,h,w)");
  Shape3 s{shape[1].get<std::size_t>(), shape[2].get<std::size_t>(),
           shape[3].get<std::size_t>()};
  const auto n = shape[0].get<std::size_t>();
  const auto& ids = c.header.at("ids");
  if (ids.size() != n) throw ConsistencyError("dataset ids/count mismatch");
  std::vector<Sample> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i].id = ids[i].get<std::int64_t>();
    auto begin = c.payload.begin() + static_cast<std::ptrdiff_t>(i * s.numel());
    samples[i].features.assign(begin, begin + static_cast<std::ptrdiff_t>(s.numel()));
  }
  return {s, std::move(samples)};
}

void ExpectKind(const io::Container& c, const char* kind) {
  if (c.header.value("kind", "") != kind) {
    throw FormatError(std::string("expected container kind ") + kind);
  }
}

}  // namespace

std::string Shape3::ToString() const {
  return "(" + std::to_string(channels) + "," + std::to_string(height) + "," +
         std::to_string(width) + ")";
}

const char* SplitTagName(SplitTag tag) {
  return tag == SplitTag::kTrain ? "train" : "val";
}

LabeledDataset::LabeledDataset(Shape3 shape, std::vector<Sample> samples,
                               std::vector<int> labels, int num_classes,
                               SplitTag tag)
    : shape_(shape),
      samples_(std::move(samples)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      tag_(tag) {
  if (num_classes_ <= 0) throw ConsistencyError("num_classes must be positive");
  if (samples_.size() != labels_.size()) {
    throw ConsistencyError("samples/labels size mismatch");
  }
  for (int y : labels_) {
    if (y < 0 || y >= num_classes_) {
      throw ConsistencyError("label " + std::to_string(y) + " outside [0," +
                             std::to_string(num_classes_) + ")");
    }
  }
  CheckSamples(shape_, samples_, &index_);
}

std::vector<std::size_t> LabeledDataset::ClassCounts() const {
  std::vector<std::size_t> counts(num_classes_, 0);
  for (int y : labels_) ++counts[y];
  return counts;
}

std::optional<std::size_t> LabeledDataset::IndexOf(std::int64_t id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabeledDataset LabeledDataset::Subset(std::span<const std::size_t> indices,
                                      SplitTag tag) const {
  std::vector<Sample> samples;
  std::vector<int> labels;
  samples.reserve(indices.size());
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= samples_.size()) throw InputError("subset index out of range");
    samples.push_back(samples_[i]);
    labels.push_back(labels_[i]);
  }
  return LabeledDataset(shape_, std::move(samples), std::move(labels),
                        num_classes_, tag);
}

UnlabeledDataset::UnlabeledDataset(Shape3 shape, std::vector<Sample> samples,
                                   int num_classes,
                                   std::optional<std::vector<int>> hidden_labels)
    : shape_(shape),
      samples_(std::move(samples)),
      num_classes_(num_classes),
      hidden_labels_(std::move(hidden_labels)) {
  if (num_classes_ <= 0) throw ConsistencyError("num_classes must be positive");
  if (hidden_labels_) {
    if (hidden_labels_->size() != samples_.size()) {
      throw ConsistencyError("hidden label count mismatch");
    }
    for (int y : *hidden_labels_) {
      if (y < 0 || y >= num_classes_) throw ConsistencyError("hidden label out of range");
    }
  }
  std::map<std::int64_t, std::size_t> index;
  CheckSamples(shape_, samples_, &index);
}

void SaveLabeled(const LabeledDataset& dataset, const std::filesystem::path& path) {
  io::Container c;
  const Shape3& s = dataset.shape();
  c.header = {{"kind", "dataset"},
              {"shape", {dataset.size(), s.channels, s.height, s.width}},
              {"num_classes", dataset.num_classes()},
              {"split_tag", SplitTagName(dataset.split_tag())},
              {"ids", IdsJson(dataset.samples())},
              {"labels", dataset.labels()}};
  c.payload = Flatten(dataset.samples());
  io::WriteContainer(path, c);
}

LabeledDataset LoadLabeled(const std::filesystem::path& path) {
  const io::Container c = io::ReadContainer(path);
  ExpectKind(c, "dataset");
  auto [shape, samples] = Unflatten(c);
  const SplitTag tag =
      c.header.value("split_tag", "train") == "val" ? SplitTag::kVal : SplitTag::kTrain;
  return LabeledDataset(shape, std::move(samples),
                        c.header.at("labels").get<std::vector<int>>(),
                        c.header.at("num_classes").get<int>(), tag);
}

void SaveUnlabeled(const UnlabeledDataset& dataset,
                   const std::filesystem::path& path) {
  io::Container c;
  const Shape3& s = dataset.shape();
  c.header = {{"kind", "dataset"},
              {"shape", {dataset.size(), s.channels, s.height, s.width}},
              {"num_classes", dataset.num_classes()},
              {"split_tag", "unlabeled"},
              {"ids", IdsJson(dataset.samples())}};
  if (dataset.hidden_labels_) c.header["hidden_labels"] = *dataset.hidden_labels_;
  c.payload = Flatten(dataset.samples());
  io::WriteContainer(path, c);
}

UnlabeledDataset LoadUnlabeled(const std::filesystem::path& path) {
  const io::Container c = io::ReadContainer(path);
  ExpectKind(c, "dataset");
  auto [shape, samples] = Unflatten(c);
  std::optional<std::vector<int>> hidden;
  if (c.header.contains("hidden_labels")) {
    hidden = c.header.at("hidden_labels").get<std::vector<int>>();
  }
  return UnlabeledDataset(shape, std::move(samples),
                          c.header.at("num_classes").get<int>(), std::move(hidden));
}

void SaveMasks(const GroundTruthMasks& masks, const std::filesystem::path& path) {
  io::Container c;
  auto ids = nlohmann::json::array();
  for (const auto& [id, m] : masks.masks) {
    ids.push_back(id);
    c.payload.insert(c.payload.end(), m.begin(), m.end());
  }
  c.header = {{"kind", "masks"},
              {"shape", {masks.masks.size(), masks.height, masks.width}},
              {"ids", ids}};
  io::WriteContainer(path, c);
}

GroundTruthMasks LoadMasks(const std::filesystem::path& path) {
  const io::Container c = io::ReadContainer(path);
  ExpectKind(c, "masks");
  GroundTruthMasks out;
  const auto& shape = c.header.at("shape");
  out.height = shape[1].get<std::size_t>();
  out.width = shape[2].get<std::size_t>();
  const std::size_t plane = out.height * out.width;
  const auto& ids = c.header.at("ids");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::uint8_t> m(plane);
    for (std::size_t j = 0; j < plane; ++j) {
      m[j] = c.payload[i * plane + j] > 0.5f ? 1 : 0;
    }
    out.masks.emplace(ids[i].get<std::int64_t>(), std::move(m));
  }
  return out;
}

}  // namespace impactx::data

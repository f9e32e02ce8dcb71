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

#include "impactx/data/idx.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "impactx/binary_io.h"
#include "impactx/errors.h"

namespace impactx::data {
namespace {

std::uint32_t BigEndianU32(io::ByteReader& reader) {
  auto b = reader.Take(4);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

void PushBigEndian(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

LabeledDataset LoadIdx(const std::filesystem::path& image_path,
                       const std::filesystem::path& label_path) {
  const auto image_bytes = io::ReadFile(image_path);
  const auto label_bytes = io::ReadFile(label_path);
  io::ByteReader images(image_bytes);
  io::ByteReader labels(label_bytes);

  if (const auto magic = BigEndianU32(images); magic != kIdxImageMagic) {
    throw FormatError(image_path.string() + ": bad IDX image magic");
  }
  if (const auto magic = BigEndianU32(labels); magic != kIdxLabelMagic) {
    throw FormatError(label_path.string() + ": bad IDX label magic");
  }
  const std::uint32_t n_images = BigEndianU32(images);
  const std::uint32_t rows = BigEndianU32(images);
  const std::uint32_t cols = BigEndianU32(images);
  const std::uint32_t n_labels = BigEndianU32(labels);
  if (n_images != n_labels) {
    throw ConsistencyError("IDX count mismatch: " + std::to_string(n_images) +
                           " images vs " + std::to_string(n_labels) + " labels");
  }
  const Shape3 shape{1, rows, cols};
  std::vector<Sample> samples(n_images);
  std::vector<int> ys(n_images);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    auto pixels = images.Take(shape.numel());
    samples[i].id = i;
    samples[i].features.resize(shape.numel());
    std::transform(pixels.begin(), pixels.end(), samples[i].features.begin(),
                   [](std::uint8_t p) { return static_cast<float>(p) / 255.0f; });
    ys[i] = labels.Take(1)[0];
  }
  const int num_classes = ys.empty() ? 1 : *std::max_element(ys.begin(), ys.end()) + 1;
  return LabeledDataset(shape, std::move(samples), std::move(ys), num_classes,
                        SplitTag::kTrain);
}

void WriteIdx(const LabeledDataset& dataset,
              const std::filesystem::path& image_path,
              const std::filesystem::path& label_path) {
  const Shape3& s = dataset.shape();
  if (s.channels != 1) throw InputError("IDX export supports one channel only");
  std::vector<std::uint8_t> images;
  PushBigEndian(images, kIdxImageMagic);
  PushBigEndian(images, static_cast<std::uint32_t>(dataset.size()));
  PushBigEndian(images, static_cast<std::uint32_t>(s.height));
  PushBigEndian(images, static_cast<std::uint32_t>(s.width));
  std::vector<std::uint8_t> labels;
  PushBigEndian(labels, kIdxLabelMagic);
  PushBigEndian(labels, static_cast<std::uint32_t>(dataset.size()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (float v : dataset.sample(i).features) {
      images.push_back(static_cast<std::uint8_t>(
          std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
    }
    labels.push_back(static_cast<std::uint8_t>(dataset.label(i)));
  }
  io::WriteFileAtomic(image_path, images);
  io::WriteFileAtomic(label_path, labels);
}

}  // namespace impactx::data

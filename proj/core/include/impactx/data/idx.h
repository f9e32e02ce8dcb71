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

#ifndef IMPACTX_DATA_IDX_H_
#define IMPACTX_DATA_IDX_H_

#include <cstdint>
#include <filesystem>

#include "impactx/data/dataset.h"

namespace impactx::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Reads an MNIST-style IDX image/label pair. Pixels are divided by 255, the
// class count is max(label) + 1, and ids are 0..n-1 in file order.
LabeledDataset LoadIdx(const std::filesystem::path& image_path,
                       const std::filesystem::path& label_path);

// Writes single-channel datasets; pixels are quantized to round(255 * v).
void WriteIdx(const LabeledDataset& dataset,
              const std::filesystem::path& image_path,
              const std::filesystem::path& label_path);

}  // namespace impactx::data

#endif  // IMPACTX_DATA_IDX_H_

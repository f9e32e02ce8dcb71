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

#ifndef IMPACTX_MODEL_CHECKPOINT_H_
#define IMPACTX_MODEL_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "impactx/nn/network.h"
#include "json.hpp"

namespace impactx::model {

// Binary checkpoint container shared by every trained artifact:
//
//   magic "IMPXCKPT" | u32 format version | u32 header length |
//   JSON header | little-endian float32 parameter blocks
//
// The header records kind, frozen flag, one architecture descriptor per
// block, free-form metadata, and "digest": SHA-256 over the concatenated
// parameter bytes. Loading recomputes the digest.
inline constexpr char kCheckpointMagic[] = "IMPXCKPT";
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct CheckpointBlock {
  std::string name;
  nn::Network network;
};

struct Checkpoint {
  std::string kind;
  bool frozen = false;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<CheckpointBlock> blocks;

  std::string Digest() const;
  const nn::Network& Block(const std::string& name) const;
};

std::vector<std::uint8_t> EncodeCheckpoint(const Checkpoint& checkpoint);
// Throws FormatError on a bad magic or version and IntegrityError when the
// header is unreadable or the stored digest does not match.
Checkpoint DecodeCheckpoint(std::span<const std::uint8_t> bytes);

void WriteCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint ReadCheckpoint(const std::filesystem::path& path);

}  // namespace impactx::model

#endif  // IMPACTX_MODEL_CHECKPOINT_H_

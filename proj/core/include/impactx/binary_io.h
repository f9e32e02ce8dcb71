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

#ifndef IMPACTX_BINARY_IO_H_
#define IMPACTX_BINARY_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace impactx::io {

// Writes to `<path>.tmp-<pid>` and renames over `path`.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const std::uint8_t> bytes);
void WriteFileAtomic(const std::filesystem::path& path, const std::string& text);

std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path);
std::string ReadTextFile(const std::filesystem::path& path);

// Canonical JSON text: sorted keys, 2-space indent, trailing newline.
std::string CanonicalJson(const nlohmann::json& value);
void WriteJsonAtomic(const std::filesystem::path& path,
                     const nlohmann::json& value);
nlohmann::json ReadJson(const std::filesystem::path& path);

void AppendU32(std::vector<std::uint8_t>& out, std::uint32_t v);
void AppendU64(std::vector<std::uint8_t>& out, std::uint64_t v);
void AppendF32(std::vector<std::uint8_t>& out, std::span<const float> values);

// Bounds-checked little-endian reader. Running off the end throws IoError.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::span<const std::uint8_t> Take(std::size_t n);
  std::uint32_t U32();
  std::uint64_t U64();
  std::vector<float> F32(std::size_t count);
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

// The "XAICACHE" container shared by the explanation cache and dataset
// files:
//
//   magic "XAICACHE" | u32 format version | u32 header length |
//   JSON header | f32 LE payload (row-major) | u64 FNV-1a of payload bytes
//
// The header must carry "kind", "shape" and "dtype":"f32"; the payload
// length is the product of "shape".
inline constexpr char kCacheMagic[] = "XAICACHE";
inline constexpr std::uint32_t kCacheFormatVersion = 1;

struct Container {
  nlohmann::json header;
  std::vector<float> payload;
};

std::vector<std::uint8_t> EncodeContainer(const Container& container);
// Throws FormatError on bad magic/version/header, IoError on truncation and
// IntegrityError on checksum mismatch.
Container DecodeContainer(std::span<const std::uint8_t> bytes);

void WriteContainer(const std::filesystem::path& path,
                    const Container& container);
Container ReadContainer(const std::filesystem::path& path);

}  // namespace impactx::io

#endif  // IMPACTX_BINARY_IO_H_

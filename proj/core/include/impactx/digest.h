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

#ifndef IMPACTX_DIGEST_H_
#define IMPACTX_DIGEST_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace impactx {

// Lower-case hex SHA-256.
std::string Sha256Hex(std::span<const std::uint8_t> bytes);
std::string Sha256Hex(std::string_view text);

// SHA-256 over the little-endian float32 encoding of `values`.
std::string FloatDigest(std::span<const float> values);

// 64-bit FNV-1a, used as the trailing payload checksum of cache containers.
std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes);

// SplitMix64 finalizer; derives independent sub-seeds from a parent seed.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t MixSeed(std::uint64_t seed, std::string_view salt);

}  // namespace impactx

#endif  // IMPACTX_DIGEST_H_

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

#ifndef IMPACTX_XAI_CACHE_H_
#define IMPACTX_XAI_CACHE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace impactx::xai {

// Everything that determines one cached explanation.
struct CacheKey {
  std::string model_hash;
  std::int64_t sample_id = 0;
  std::string method;
  std::string target_policy;
  int target_class = 0;
  std::string baseline_digest;
  std::string grouping_digest;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  int num_groups = 0;

  // Container header fields (without kind/shape/dtype).
  nlohmann::json ToJson() const;
  std::string Digest() const;
};

// One XAICACHE file per explanation, named by the key digest. Payloads are
// the raw (unnormalized) group attributions.
class ExplanationCache {
 public:
  explicit ExplanationCache(std::filesystem::path dir);

  enum class Status { kHit, kMiss, kCorrupt };
  struct Lookup {
    Status status = Status::kMiss;
    std::vector<float> values;
    std::string detail;
  };

  Lookup Get(const CacheKey& key) const;
  // Atomic write-temp-then-rename.
  void Put(const CacheKey& key, std::span<const float> values) const;
  std::filesystem::path PathFor(const CacheKey& key) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace impactx::xai

#endif  // IMPACTX_XAI_CACHE_H_

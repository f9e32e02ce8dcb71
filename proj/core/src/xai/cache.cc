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

#include "impactx/xai/cache.h"

#include "impactx/binary_io.h"
#include "impactx/digest.h"
#include "impactx/errors.h"

namespace impactx::xai {

nlohmann::json CacheKey::ToJson() const {
  return {{"model_hash", model_hash},
          {"sample_id", sample_id},
          {"method", method},
          {"target_policy", target_policy},
          {"target_class", target_class},
          {"baseline_digest", baseline_digest},
          {"grouping_digest", grouping_digest},
          {"budget", budget},
          {"seed", seed}};
}

std::string CacheKey::Digest() const { return Sha256Hex(ToJson().dump()); }

ExplanationCache::ExplanationCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ExplanationCache::PathFor(const CacheKey& key) const {
  return dir_ / (key.Digest().substr(0, 40) + ".xai");
}

ExplanationCache::Lookup ExplanationCache::Get(const CacheKey& key) const {
  Lookup out;
  const auto path = PathFor(key);
  if (!std::filesystem::exists(path)) return out;
  try {
    io::Container c = io::ReadContainer(path);
    nlohmann::json expected = key.ToJson();
    expected["kind"] = "attribution";
    expected["shape"] = {key.num_groups};
    expected["dtype"] = "f32";
    if (c.header != expected) {
      out.status = Status::kCorrupt;
      out.detail = path.string() + ": header does not match the requested key";
      return out;
    }
    out.status = Status::kHit;
    out.values = std::move(c.payload);
  } catch (const Error& e) {
    out.status = Status::kCorrupt;
    out.detail = path.string() + ": " + e.what();
  } catch (const nlohmann::json::exception& e) {
    out.status = Status::kCorrupt;
    out.detail = path.string() + ": " + e.what();
  }
  return out;
}

void ExplanationCache::Put(const CacheKey& key, std::span<const float> values) const {
  if (values.size() != static_cast<std::size_t>(key.num_groups)) {
    throw ConsistencyError("cache payload size does not match num_groups");
  }
  io::Container c;
  c.header = key.ToJson();
  c.header["kind"] = "attribution";
  c.header["shape"] = {key.num_groups};
  c.payload.assign(values.begin(), values.end());
  io::WriteContainer(PathFor(key), c);
}

}  // namespace impactx::xai

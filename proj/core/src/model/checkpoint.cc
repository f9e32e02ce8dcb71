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

#include "impactx/model/checkpoint.h"

#include <cstring>

#include "impactx/binary_io.h"
#include "impactx/digest.h"
#include "impactx/errors.h"

namespace impactx::model {

std::string Checkpoint::Digest() const {
  std::vector<float> all;
  for (const auto& b : blocks) {
    all.insert(all.end(), b.network.params().begin(), b.network.params().end());
  }
  return FloatDigest(all);
}

const nn::Network& Checkpoint::Block(const std::string& name) const {
  for (const auto& b : blocks) {
    if (b.name == name) return b.network;
  }
  throw FormatError("checkpoint of kind " + kind + " has no block " + name);
}

std::vector<std::uint8_t> EncodeCheckpoint(const Checkpoint& checkpoint) {
  auto blocks = nlohmann::json::array();
  for (const auto& b : checkpoint.blocks) {
    blocks.push_back({{"name", b.name}, {"architecture", b.network.Describe()}});
  }
  const nlohmann::json header = {{"kind", checkpoint.kind},
                                 {"format_version", kCheckpointFormatVersion},
                                 {"frozen", checkpoint.frozen},
                                 {"metadata", checkpoint.metadata},
                                 {"blocks", blocks},
                                 {"digest", checkpoint.Digest()}};
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(kCheckpointMagic, kCheckpointMagic + 8);
  io::AppendU32(out, kCheckpointFormatVersion);
  io::AppendU32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& b : checkpoint.blocks) io::AppendF32(out, b.network.params());
  return out;
}

Checkpoint DecodeCheckpoint(std::span<const std::uint8_t> bytes) {
  io::ByteReader reader(bytes);
  if (std::memcmp(reader.Take(8).data(), kCheckpointMagic, 8) != 0) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  if (const auto v = reader.U32(); v != kCheckpointFormatVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(v));
  }
  const std::uint32_t header_len = reader.U32();
  auto header_bytes = reader.Take(header_len);
  Checkpoint out;
  std::string stored_digest;
  try {
    const auto header = nlohmann::json::parse(header_bytes.begin(), header_bytes.end());
    out.kind = header.at("kind").get<std::string>();
    out.frozen = header.at("frozen").get<bool>();
    out.metadata = header.at("metadata");
    stored_digest = header.at("digest").get<std::string>();
    for (const auto& b : header.at("blocks")) {
      out.blocks.push_back({b.at("name").get<std::string>(),
                            nn::Network::FromDescription(b.at("architecture"))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("corrupt checkpoint header: ") + e.what());
  } catch (const Error& e) {
    throw IntegrityError(std::string("corrupt checkpoint header: ") + e.what());
  }
  for (auto& b : out.blocks) {
    auto values = reader.F32(b.network.num_params());
    std::copy(values.begin(), values.end(), b.network.params().begin());
  }
  if (reader.remaining() != 0) throw IntegrityError("trailing bytes after checkpoint");
  if (out.Digest() != stored_digest) {
    throw IntegrityError("checkpoint digest mismatch (stored " + stored_digest + ")");
  }
  return out;
}

void WriteCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  io::WriteFileAtomic(path, EncodeCheckpoint(checkpoint));
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  return DecodeCheckpoint(io::ReadFile(path));
}

}  // namespace impactx::model

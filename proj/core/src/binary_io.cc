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

#include "impactx/binary_io.h"

#include <unistd.h>

#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "impactx/digest.h"
#include "impactx/errors.h"

namespace impactx::io {
namespace {

std::atomic<std::uint64_t> g_tmp_counter{0};

}  // namespace

void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" +
         std::to_string(g_tmp_counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& text) {
  WriteFileAtomic(path, std::span<const std::uint8_t>(
                            reinterpret_cast<const std::uint8_t*>(text.data()),
                            text.size()));
}

std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string CanonicalJson(const nlohmann::json& value) {
  // nlohmann::json objects are std::map backed, so keys are already sorted.
  return value.dump(2) + "\n";
}

void WriteJsonAtomic(const std::filesystem::path& path,
                     const nlohmann::json& value) {
  WriteFileAtomic(path, CanonicalJson(value));
}

nlohmann::json ReadJson(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void AppendU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void AppendU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void AppendF32(std::vector<std::uint8_t>& out, std::span<const float> values) {
  static_assert(std::endian::native == std::endian::little);
  const auto* p = reinterpret_cast<const std::uint8_t*>(values.data());
  out.insert(out.end(), p, p + values.size() * sizeof(float));
}

std::span<const std::uint8_t> ByteReader::Take(std::size_t n) {
  if (n > remaining()) {
    throw IoError("truncated input: wanted " + std::to_string(n) +
                  " bytes at offset " + std::to_string(pos_) + ", have " +
                  std::to_string(remaining()));
  }
  auto out = bytes_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint32_t ByteReader::U32() {
  auto b = Take(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t ByteReader::U64() {
  auto b = Take(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::vector<float> ByteReader::F32(std::size_t count) {
  auto b = Take(count * sizeof(float));
  std::vector<float> out(count);
  std::memcpy(out.data(), b.data(), b.size());
  return out;
}

namespace {

std::size_t ShapeProduct(const nlohmann::json& shape) {
  if (!shape.is_array()) throw FormatError("container header: shape must be an array");
  std::size_t n = 1;
  for (const auto& d : shape) {
    if (!d.is_number_unsigned() && !(d.is_number_integer() && d.get<long long>() >= 0)) {
      throw FormatError("container header: bad shape entry");
    }
    n *= d.get<std::size_t>();
  }
  return n;
}

}  // namespace

std::vector<std::uint8_t> EncodeContainer(const Container& container) {
  const auto& h = container.header;
  if (!h.contains("kind") || !h.contains("shape")) {
    throw FormatError("container header needs kind and shape");
  }
  if (ShapeProduct(h.at("shape")) != container.payload.size()) {
    throw ConsistencyError("container payload size does not match shape");
  }
  nlohmann::json header = h;
  header["dtype"] = "f32";
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(kCacheMagic, kCacheMagic + 8);
  AppendU32(out, kCacheFormatVersion);
  AppendU32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  const std::size_t payload_start = out.size();
  AppendF32(out, container.payload);
  const std::uint64_t checksum = Fnv1a64(
      std::span<const std::uint8_t>(out).subspan(payload_start));
  AppendU64(out, checksum);
  return out;
}

Container DecodeContainer(std::span<const std::uint8_t> bytes) {
  ByteReader reader(bytes);
  auto magic = reader.Take(8);
  if (std::memcmp(magic.data(), kCacheMagic, 8) != 0) {
    throw FormatError("bad container magic");
  }
  if (const auto version = reader.U32(); version != kCacheFormatVersion) {
    throw FormatError("unsupported container version " + std::to_string(version));
  }
  const std::uint32_t header_len = reader.U32();
  auto header_bytes = reader.Take(header_len);
  Container out;
  try {
    out.header = nlohmann::json::parse(header_bytes.begin(), header_bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("container header: ") + e.what());
  }
  if (out.header.value("dtype", "") != "f32") {
    throw FormatError("container dtype must be f32");
  }
  const std::size_t count = ShapeProduct(out.header.at("shape"));
  const std::size_t payload_start = reader.position();
  out.payload = reader.F32(count);
  const std::uint64_t expected = Fnv1a64(
      bytes.subspan(payload_start, count * sizeof(float)));
  if (reader.U64() != expected) {
    throw IntegrityError("container payload checksum mismatch");
  }
  return out;
}

void WriteContainer(const std::filesystem::path& path,
                    const Container& container) {
  WriteFileAtomic(path, EncodeContainer(container));
}

Container ReadContainer(const std::filesystem::path& path) {
  return DecodeContainer(ReadFile(path));
}

}  // namespace impactx::io

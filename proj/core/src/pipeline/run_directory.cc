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

#include "impactx/pipeline/run_directory.h"

#include <cstdlib>

#include "impactx/binary_io.h"
#include "impactx/digest.h"
#include "impactx/errors.h"

namespace impactx::pipeline {

namespace fs = std::filesystem;

RunDirectory::RunDirectory(fs::path root, ExperimentConfig config)
    : root_(std::move(root)), config_(std::move(config)) {}

RunDirectory RunDirectory::Create(const fs::path& root, const ExperimentConfig& config) {
  if (fs::exists(root) && !(fs::is_directory(root) && fs::is_empty(root))) {
    throw ConfigError("out", root.string() + " exists and is not empty; refusing to overwrite");
  }
  RunDirectory run(root, config);
  for (const fs::path& dir : {root, run.data_dir(), run.checkpoints_dir(), root / "cache",
                              run.reports_dir(), run.logs_dir()}) {
    fs::create_directories(dir);
  }
  io::WriteJsonAtomic(root / "config.json", config.ToJson());
  run.SaveManifest({{"artifacts", nlohmann::json::object()}, {"facts", nlohmann::json::object()}});
  run.Record(root / "config.json");
  return run;
}

RunDirectory RunDirectory::Open(const fs::path& root) {
  const fs::path config_path = root / "config.json";
  if (!fs::exists(config_path)) {
    throw IoError(root.string() + " is not a run directory (no config.json)");
  }
  RunDirectory run(root, ExperimentConfig::FromJson(io::ReadJson(config_path)));
  const auto mismatched = run.VerifyManifest();
  for (const auto& m : mismatched) {
    if (m == "config.json") throw IntegrityError("config.json changed after the run was created");
  }
  return run;
}

std::string RunDirectory::config_digest() const { return config_.Digest(); }

fs::path RunDirectory::cache_dir() const {
  if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return root_ / "cache";
}

nlohmann::json RunDirectory::LoadManifest() const {
  return io::ReadJson(root_ / "manifest.json");
}

void RunDirectory::SaveManifest(const nlohmann::json& manifest) const {
  io::WriteJsonAtomic(root_ / "manifest.json", manifest);
}

void RunDirectory::Record(const fs::path& file) {
  const std::string rel = fs::relative(file, root_).generic_string();
  if (rel.empty() || rel.starts_with("..")) {
    throw IoError(file.string() + " lies outside the run directory");
  }
  const auto bytes = io::ReadFile(file);
  nlohmann::json manifest = LoadManifest();
  manifest["artifacts"][rel] = {{"sha256", Sha256Hex(bytes)}, {"bytes", bytes.size()}};
  SaveManifest(manifest);
}

nlohmann::json RunDirectory::Fact(const std::string& key) const {
  const nlohmann::json manifest = LoadManifest();
  if (!manifest["facts"].contains(key)) {
    throw IoError("run manifest has no entry '" + key + "'");
  }
  return manifest["facts"][key];
}

bool RunDirectory::HasFact(const std::string& key) const {
  return LoadManifest()["facts"].contains(key);
}

void RunDirectory::SetFact(const std::string& key, const nlohmann::json& value) {
  nlohmann::json manifest = LoadManifest();
  manifest["facts"][key] = value;
  SaveManifest(manifest);
}

std::string RunDirectory::ArtifactDigest(const std::string& relative) const {
  const nlohmann::json manifest = LoadManifest();
  if (!manifest["artifacts"].contains(relative)) {
    throw IoError("manifest does not list " + relative);
  }
  return manifest["artifacts"][relative]["sha256"].get<std::string>();
}

std::vector<std::string> RunDirectory::VerifyManifest() const {
  std::vector<std::string> bad;
  const nlohmann::json manifest = LoadManifest();
  for (const auto& [rel, entry] : manifest["artifacts"].items()) {
    const fs::path p = root_ / rel;
    if (!fs::exists(p) || Sha256Hex(io::ReadFile(p)) != entry["sha256"].get<std::string>()) {
      bad.push_back(rel);
    }
  }
  return bad;
}

}  // namespace impactx::pipeline

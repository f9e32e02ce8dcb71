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

#ifndef IMPACTX_PIPELINE_RUN_DIRECTORY_H_
#define IMPACTX_PIPELINE_RUN_DIRECTORY_H_

#include <filesystem>
#include <string>
#include <vector>

#include "impactx/pipeline/config.h"
#include "json.hpp"

namespace impactx::pipeline {

// Environment variable that relocates the explanation cache.
inline constexpr char kCacheDirEnv[] = "IMPACTX_CACHE_DIR";

// Layout: config.json (frozen), data/, checkpoints/, cache/, reports/, logs/
// and manifest.json, which lists every artifact with its SHA-256 digest plus
// run-level facts (model hash, training ids, strategy).
class RunDirectory {
 public:
  // Creates a new run; refuses a path that exists and is not empty.
  static RunDirectory Create(const std::filesystem::path& root, const ExperimentConfig& config);
  // Opens an existing run; throws IoError if it has no config.json.
  static RunDirectory Open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  const ExperimentConfig& config() const { return config_; }
  std::string config_digest() const;

  std::filesystem::path data_dir() const { return root_ / "data"; }
  std::filesystem::path checkpoints_dir() const { return root_ / "checkpoints"; }
  std::filesystem::path reports_dir() const { return root_ / "reports"; }
  std::filesystem::path logs_dir() const { return root_ / "logs"; }
  // $IMPACTX_CACHE_DIR if set, otherwise <run>/cache.
  std::filesystem::path cache_dir() const;

  // Adds or refreshes `file` (inside the run) in the manifest.
  void Record(const std::filesystem::path& file);
  // Reads or writes a run-level manifest fact.
  nlohmann::json Fact(const std::string& key) const;
  bool HasFact(const std::string& key) const;
  void SetFact(const std::string& key, const nlohmann::json& value);
  // Relative paths whose current digest differs from the manifest.
  std::vector<std::string> VerifyManifest() const;
  std::string ArtifactDigest(const std::string& relative) const;

 private:
  RunDirectory(std::filesystem::path root, ExperimentConfig config);
  nlohmann::json LoadManifest() const;
  void SaveManifest(const nlohmann::json& manifest) const;

  std::filesystem::path root_;
  ExperimentConfig config_;
};

}  // namespace impactx::pipeline

#endif  // IMPACTX_PIPELINE_RUN_DIRECTORY_H_

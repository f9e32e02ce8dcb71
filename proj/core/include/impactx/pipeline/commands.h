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

#ifndef IMPACTX_PIPELINE_COMMANDS_H_
#define IMPACTX_PIPELINE_COMMANDS_H_

#include <filesystem>
#include <ostream>
#include <string>

#include "impactx/errors.h"
#include "impactx/pipeline/config.h"

namespace impactx::pipeline {

// Process exit codes shared by every command.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitTraining = 3,
  kExitMissingCheckpoint = 4,
  kExitMissingCache = 5,
  kExitHashDrift = 6,
  kExitMissingBaseline = 7,
};

// A pipeline-stage failure that maps to a specific exit code.
class StageError : public Error {
 public:
  StageError(ExitCode code, const std::string& message) : Error(message), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// Materializes the dataset, trains and freezes M, and writes the baseline
// report on U. Refuses a non-empty output directory.
int CmdPretrain(const std::filesystem::path& config_path, const std::filesystem::path& out,
                std::ostream& log);
int CmdPretrainJson(const nlohmann::json& config, const std::filesystem::path& out,
                std::ostream& log);

// Fills the explanation cache for the training subset ("train") or the
// validation split ("val").
int CmdExplain(const std::filesystem::path& run, const std::string& split, std::ostream& log);

// Runs strategy "ae" or "ed" from cached explanations.
int CmdTrainImpactx(const std::filesystem::path& run, const std::string& strategy,
                    std::ostream& log);

// Evaluates the assembled predictor on U and compares it with the baseline.
int CmdEvaluate(const std::filesystem::path& run, std::ostream& log);

// Runs the full pipeline for every grid combination and seed and writes a
// CSV of seed-averaged accuracies.
int CmdAblate(const std::filesystem::path& config_path, const std::filesystem::path& grid_path,
              const std::filesystem::path& out, std::ostream& log);

}  // namespace impactx::pipeline

#endif  // IMPACTX_PIPELINE_COMMANDS_H_

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

#ifndef IMPACTX_EVAL_REPORT_H_
#define IMPACTX_EVAL_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "impactx/eval/metrics.h"
#include "json.hpp"

namespace impactx::eval {

// Binary 8-bit PGM ("P5") of a signed map: values are divided by their
// maximum absolute value and mapped by v -> round(127.5 * (v + 1)). An
// all-zero map renders as mid-grey.
std::vector<std::uint8_t> EncodePgm(std::span<const float> values, std::size_t height,
                                    std::size_t width);
void WritePgm(const std::filesystem::path& path, std::span<const float> values,
              std::size_t height, std::size_t width);

// Accuracies of both predictors, their difference, per-class recall deltas
// with a min/max/spread summary, and the flip analysis.
nlohmann::json ComparisonJson(const EvalReport& baseline, const EvalReport& impactx);

}  // namespace impactx::eval

#endif  // IMPACTX_EVAL_REPORT_H_

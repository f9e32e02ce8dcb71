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

#include "impactx/eval/report.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "impactx/binary_io.h"
#include "impactx/errors.h"

namespace impactx::eval {

std::vector<std::uint8_t> EncodePgm(std::span<const float> values, std::size_t height,
                                    std::size_t width) {
  if (values.size() != height * width) {
    throw InputError("PGM needs height * width values");
  }
  float max_abs = 0.0f;
  for (float v : values) max_abs = std::max(max_abs, std::fabs(v));
  const std::string header =
      "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (float v : values) {
    const double n = max_abs > 0.0f ? static_cast<double>(v) / max_abs : 0.0;
    out.push_back(static_cast<std::uint8_t>(std::lround(127.5 * (n + 1.0))));
  }
  return out;
}

void WritePgm(const std::filesystem::path& path, std::span<const float> values,
              std::size_t height, std::size_t width) {
  io::WriteFileAtomic(path, EncodePgm(values, height, width));
}

nlohmann::json ComparisonJson(const EvalReport& baseline, const EvalReport& impactx) {
  const FlipAnalysis flips = AnalyzeFlips(baseline, impactx);
  const std::vector<double> delta = PerClassDelta(baseline, impactx);
  const long long correct_diff =
      static_cast<long long>(impactx.correct) - static_cast<long long>(baseline.correct);
  return {{"baseline_accuracy", baseline.accuracy},
          {"impactx_accuracy", impactx.accuracy},
          {"accuracy_difference", impactx.accuracy - baseline.accuracy},
          {"baseline_correct", baseline.correct},
          {"impactx_correct", impactx.correct},
          {"correct_difference", correct_diff},
          {"per_class_delta", delta},
          {"per_class_delta_summary", Summarize(delta).ToJson()},
          {"flips", flips.ToJson()}};
}

}  // namespace impactx::eval

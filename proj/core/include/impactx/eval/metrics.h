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

#ifndef IMPACTX_EVAL_METRICS_H_
#define IMPACTX_EVAL_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "impactx/data/dataset.h"
#include "impactx/strategy/predictor.h"
#include "impactx/xai/attribution.h"
#include "json.hpp"

namespace impactx::eval {

// The only route to the hidden labels of an unlabeled set. Training code
// never includes this header.
class LabelAccess {
 public:
  // Throws ConfigError if the set carries no hidden labels.
  static const std::vector<int>& Reveal(const data::UnlabeledDataset& dataset);
  // The same samples with their labels revealed, for evaluation-time
  // analyses such as true-class explanations of held-out data.
  static data::LabeledDataset RevealAsLabeled(const data::UnlabeledDataset& dataset);
};

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = 0);

  int num_classes() const { return num_classes_; }
  void Add(int truth, int predicted);
  std::uint64_t count(int truth, int predicted) const;
  std::uint64_t row_sum(int truth) const;
  std::uint64_t total() const;
  std::uint64_t trace() const;
  double accuracy() const;
  // count(k,k) / row_sum(k); 0 for an empty row.
  double recall(int k) const;

  // Header row and column of class indices.
  std::string ToCsv() const;
  nlohmann::json ToJson() const;

 private:
  int num_classes_ = 0;
  std::vector<std::uint64_t> counts_;
};

struct FlipAnalysis {
  std::vector<std::int64_t> corrected;  // baseline wrong, IMPACTX right
  std::vector<std::int64_t> broken;     // baseline right, IMPACTX wrong
  std::size_t unchanged_right = 0;
  std::size_t unchanged_wrong = 0;

  nlohmann::json ToJson() const;
};

struct EvalReport {
  int num_classes = 0;
  double accuracy = 0.0;
  std::vector<double> per_class_recall;
  ConfusionMatrix confusion;
  std::vector<std::int64_t> sample_ids;
  std::vector<int> predictions;
  std::vector<int> labels;
  std::size_t correct = 0;

  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& j);
};

// Deterministic evaluation of `predictor` on the revealed labels of `dataset`.
EvalReport Evaluate(const strategy::Predictor& predictor, const data::UnlabeledDataset& dataset);

// Builds a report from aligned predictions and labels.
EvalReport MakeReport(std::span<const std::int64_t> ids, std::span<const int> predictions,
                      std::span<const int> labels, int num_classes);

FlipAnalysis AnalyzeFlips(std::span<const std::int64_t> ids,
                          std::span<const int> baseline_predictions,
                          std::span<const int> impactx_predictions, std::span<const int> labels);
FlipAnalysis AnalyzeFlips(const EvalReport& baseline, const EvalReport& impactx);

// delta[k] = impactx.recall[k] - baseline.recall[k].
std::vector<double> PerClassDelta(const EvalReport& baseline, const EvalReport& impactx);

struct DeltaSummary {
  double min = 0.0;
  double max = 0.0;
  double spread = 0.0;  // max - min
  double mean = 0.0;

  nlohmann::json ToJson() const;
};
DeltaSummary Summarize(std::span<const double> deltas);

enum class SimilarityMetric { kCosine, kTopKOverlap };

struct SimilarityResult {
  double value = 0.0;
  bool degenerate = false;  // a zero-norm operand made cosine undefined
};

SimilarityResult CosineSimilarity(std::span<const float> a, std::span<const float> b);
// |topk(a) ∩ topk(b)| / k with indices ranked by signed value (ties by index).
double TopKOverlap(std::span<const float> a, std::span<const float> b, std::size_t k);
SimilarityResult ExplanationSimilarity(const xai::AttributionMap& a, const xai::AttributionMap& b,
                                       SimilarityMetric metric, std::size_t k = 1);

struct SimilarityStats {
  std::size_t pairs = 0;
  double mean_cosine = 0.0;
  double permuted_mean_cosine = 0.0;
  double mean_topk_overlap = 0.0;
  std::size_t degenerate = 0;
  std::size_t topk = 0;

  nlohmann::json ToJson() const;
};

// Mean cosine between paired rows, plus the same statistic after a seeded
// random re-pairing in which no row keeps its own partner.
SimilarityStats CompareExplanations(const std::vector<std::vector<float>>& reconstructed,
                                    const std::vector<std::vector<float>>& reference,
                                    std::uint64_t seed, std::size_t topk = 3);

}  // namespace impactx::eval

#endif  // IMPACTX_EVAL_METRICS_H_

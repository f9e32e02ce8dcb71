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

#include "impactx/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "impactx/digest.h"
#include "impactx/errors.h"

namespace impactx::eval {

const std::vector<int>& LabelAccess::Reveal(const data::UnlabeledDataset& dataset) {
  if (!dataset.hidden_labels_) {
    throw ConfigError("eval", "evaluation set carries no hidden labels");
  }
  return *dataset.hidden_labels_;
}

data::LabeledDataset LabelAccess::RevealAsLabeled(const data::UnlabeledDataset& dataset) {
  return data::LabeledDataset(dataset.shape(), dataset.samples(), Reveal(dataset),
                              dataset.num_classes(), data::SplitTag::kVal);
}

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : num_classes_(num_classes),
      counts_(static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(num_classes), 0) {}

void ConfusionMatrix::Add(int truth, int predicted) {
  if (truth < 0 || truth >= num_classes_ || predicted < 0 || predicted >= num_classes_) {
    throw ConfigError("eval", "class index outside [0, K)");
  }
  ++counts_[static_cast<std::size_t>(truth) * num_classes_ + predicted];
}

std::uint64_t ConfusionMatrix::count(int truth, int predicted) const {
  return counts_[static_cast<std::size_t>(truth) * num_classes_ + predicted];
}

std::uint64_t ConfusionMatrix::row_sum(int truth) const {
  std::uint64_t s = 0;
  for (int p = 0; p < num_classes_; ++p) s += count(truth, p);
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (int k = 0; k < num_classes_; ++k) s += count(k, k);
  return s;
}

double ConfusionMatrix::accuracy() const {
  const auto n = total();
  return n == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(n);
}

double ConfusionMatrix::recall(int k) const {
  const auto n = row_sum(k);
  return n == 0 ? 0.0 : static_cast<double>(count(k, k)) / static_cast<double>(n);
}

std::string ConfusionMatrix::ToCsv() const {
  std::ostringstream out;
  out << "true\\pred";
  for (int p = 0; p < num_classes_; ++p) out << ',' << p;
  out << '\n';
  for (int t = 0; t < num_classes_; ++t) {
    out << t;
    for (int p = 0; p < num_classes_; ++p) out << ',' << count(t, p);
    out << '\n';
  }
  return out.str();
}

nlohmann::json ConfusionMatrix::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int t = 0; t < num_classes_; ++t) {
    nlohmann::json row = nlohmann::json::array();
    for (int p = 0; p < num_classes_; ++p) row.push_back(count(t, p));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json FlipAnalysis::ToJson() const {
  return {{"corrected", corrected},
          {"broken", broken},
          {"num_corrected", corrected.size()},
          {"num_broken", broken.size()},
          {"unchanged_right", unchanged_right},
          {"unchanged_wrong", unchanged_wrong}};
}

nlohmann::json EvalReport::ToJson() const {
  return {{"num_classes", num_classes},
          {"num_samples", sample_ids.size()},
          {"correct", correct},
          {"accuracy", accuracy},
          {"per_class_recall", per_class_recall},
          {"confusion", confusion.ToJson()},
          {"sample_ids", sample_ids},
          {"predictions", predictions},
          {"labels", labels}};
}

EvalReport EvalReport::FromJson(const nlohmann::json& j) {
  const auto ids = j.at("sample_ids").get<std::vector<std::int64_t>>();
  const auto preds = j.at("predictions").get<std::vector<int>>();
  const auto labels = j.at("labels").get<std::vector<int>>();
  return MakeReport(ids, preds, labels, j.at("num_classes").get<int>());
}

EvalReport MakeReport(std::span<const std::int64_t> ids, std::span<const int> predictions,
                      std::span<const int> labels, int num_classes) {
  if (ids.size() != predictions.size() || ids.size() != labels.size()) {
    throw ConsistencyError("ids, predictions and labels must be aligned");
  }
  EvalReport r;
  r.num_classes = num_classes;
  r.confusion = ConfusionMatrix(num_classes);
  r.sample_ids.assign(ids.begin(), ids.end());
  r.predictions.assign(predictions.begin(), predictions.end());
  r.labels.assign(labels.begin(), labels.end());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    r.confusion.Add(labels[i], predictions[i]);
    if (labels[i] == predictions[i]) ++r.correct;
  }
  r.accuracy = ids.empty() ? 0.0 : static_cast<double>(r.correct) / static_cast<double>(ids.size());
  for (int k = 0; k < num_classes; ++k) r.per_class_recall.push_back(r.confusion.recall(k));
  return r;
}

EvalReport Evaluate(const strategy::Predictor& predictor, const data::UnlabeledDataset& dataset) {
  const std::vector<int>& labels = LabelAccess::Reveal(dataset);
  const int K = dataset.num_classes();
  if (predictor.num_classes() != K) {
    throw ConfigError("eval", "predictor has " + std::to_string(predictor.num_classes()) +
                                  " classes, evaluation set has " + std::to_string(K));
  }
  std::vector<std::int64_t> ids;
  std::vector<int> predictions;
  for (const auto& s : dataset.samples()) {
    ids.push_back(s.id);
    const nn::Prediction p = predictor.Predict(s);
    if (p.probabilities.size() != static_cast<std::size_t>(K)) {
      throw ConfigError("eval", "predictor output length differs from K");
    }
    predictions.push_back(p.label);
  }
  return MakeReport(ids, predictions, labels, K);
}

FlipAnalysis AnalyzeFlips(std::span<const std::int64_t> ids,
                          std::span<const int> baseline_predictions,
                          std::span<const int> impactx_predictions, std::span<const int> labels) {
  if (ids.size() != baseline_predictions.size() || ids.size() != impactx_predictions.size() ||
      ids.size() != labels.size()) {
    throw ConsistencyError("flip analysis needs aligned prediction vectors");
  }
  FlipAnalysis f;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const bool base_ok = baseline_predictions[i] == labels[i];
    const bool new_ok = impactx_predictions[i] == labels[i];
    if (!base_ok && new_ok) {
      f.corrected.push_back(ids[i]);
    } else if (base_ok && !new_ok) {
      f.broken.push_back(ids[i]);
    } else if (base_ok) {
      ++f.unchanged_right;
    } else {
      ++f.unchanged_wrong;
    }
  }
  return f;
}

namespace {

void CheckSameSet(const EvalReport& a, const EvalReport& b) {
  if (a.num_classes != b.num_classes || a.sample_ids != b.sample_ids || a.labels != b.labels) {
    throw ConsistencyError("reports were computed on different evaluation sets");
  }
}

}  // namespace

FlipAnalysis AnalyzeFlips(const EvalReport& baseline, const EvalReport& impactx) {
  CheckSameSet(baseline, impactx);
  return AnalyzeFlips(baseline.sample_ids, baseline.predictions, impactx.predictions,
                      baseline.labels);
}

std::vector<double> PerClassDelta(const EvalReport& baseline, const EvalReport& impactx) {
  CheckSameSet(baseline, impactx);
  std::vector<double> delta(baseline.num_classes);
  for (int k = 0; k < baseline.num_classes; ++k) {
    delta[k] = impactx.per_class_recall[k] - baseline.per_class_recall[k];
  }
  return delta;
}

nlohmann::json DeltaSummary::ToJson() const {
  return {{"min", min}, {"max", max}, {"spread", spread}, {"mean", mean}};
}

DeltaSummary Summarize(std::span<const double> deltas) {
  DeltaSummary s;
  if (deltas.empty()) return s;
  const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
  s.min = *lo;
  s.max = *hi;
  s.spread = s.max - s.min;
  s.mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / static_cast<double>(deltas.size());
  return s;
}

SimilarityResult CosineSimilarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw InputError("explanations differ in shape");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return {0.0, true};
  return {std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0), false};
}

double TopKOverlap(std::span<const float> a, std::span<const float> b, std::size_t k) {
  if (a.size() != b.size()) throw InputError("explanations differ in shape");
  if (k == 0 || k > a.size()) throw InputError("top-k needs 1 <= k <= number of groups");
  auto top = [k](std::span<const float> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return v[i] > v[j]; });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
  };
  const auto ta = top(a);
  const auto tb = top(b);
  std::vector<std::size_t> common;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(k);
}

SimilarityResult ExplanationSimilarity(const xai::AttributionMap& a, const xai::AttributionMap& b,
                                       SimilarityMetric metric, std::size_t k) {
  if (metric == SimilarityMetric::kCosine) return CosineSimilarity(a.values, b.values);
  return {TopKOverlap(a.values, b.values, k), false};
}

nlohmann::json SimilarityStats::ToJson() const {
  return {{"pairs", pairs},
          {"mean_cosine", mean_cosine},
          {"permuted_mean_cosine", permuted_mean_cosine},
          {"margin", mean_cosine - permuted_mean_cosine},
          {"mean_topk_overlap", mean_topk_overlap},
          {"topk", topk},
          {"degenerate", degenerate}};
}

SimilarityStats CompareExplanations(const std::vector<std::vector<float>>& reconstructed,
                                    const std::vector<std::vector<float>>& reference,
                                    std::uint64_t seed, std::size_t topk) {
  if (reconstructed.size() != reference.size()) {
    throw ConsistencyError("explanation lists must be paired");
  }
  SimilarityStats s;
  s.pairs = reconstructed.size();
  if (s.pairs == 0) return s;
  s.topk = std::min(topk, reference.front().size());
  // A random cyclic re-pairing: shuffle, then pair each with its successor.
  std::vector<std::size_t> order(s.pairs);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(MixSeed(seed, "similarity.permutation"));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> partner(s.pairs);
  for (std::size_t j = 0; j < s.pairs; ++j) partner[order[j]] = order[(j + 1) % s.pairs];

  for (std::size_t i = 0; i < s.pairs; ++i) {
    const SimilarityResult c = CosineSimilarity(reconstructed[i], reference[i]);
    s.mean_cosine += c.value;
    if (c.degenerate) ++s.degenerate;
    s.permuted_mean_cosine += CosineSimilarity(reconstructed[i], reference[partner[i]]).value;
    s.mean_topk_overlap += TopKOverlap(reconstructed[i], reference[i], s.topk);
  }
  const double n = static_cast<double>(s.pairs);
  s.mean_cosine /= n;
  s.permuted_mean_cosine /= n;
  s.mean_topk_overlap /= n;
  return s;
}

}  // namespace impactx::eval

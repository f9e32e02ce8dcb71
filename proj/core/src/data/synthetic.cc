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

#include "impactx/data/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "impactx/digest.h"
#include "impactx/errors.h"

namespace impactx::data {
namespace {

// With strength d: background noise in [0, kBackground*d], the true pattern at
// amplitude 1 - kTrueJitter*d*u, and distractors at d*[kDistractorLow,
// kDistractorHigh]. The amplitude ranges touch at d = 0.5 and overlap above it;
// together with the background noise this leaves a few percent of samples
// ambiguous at d = 0.5.
constexpr int kDistractorsPerSample = 2;
constexpr double kBackground = 0.6;
constexpr double kTrueJitter = 0.6;
constexpr double kDistractorLow = 0.7;
constexpr double kDistractorHigh = 1.4;

struct Generator {
  const PatchDatasetOptions& opt;
  int cell;
  std::vector<std::vector<float>> patterns;
  std::mt19937_64 rng;

  explicit Generator(const PatchDatasetOptions& o)
      : opt(o), cell(o.image_side / o.grid_side), rng(o.seed) {
    for (int k = 0; k < opt.num_classes; ++k) patterns.push_back(ClassPattern(k, cell));
  }

  double Uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

  void Stamp(std::vector<float>& img, int k, double amplitude) const {
    const auto [row, col] = ClassCell(k, opt.grid_side);
    const int side = opt.image_side;
    for (int y = 0; y < cell; ++y) {
      for (int x = 0; x < cell; ++x) {
        const int py = row * cell + y;
        const int px = col * cell + x;
        img[py * side + px] += static_cast<float>(amplitude * patterns[k][y * cell + x]);
      }
    }
  }

  std::vector<std::uint8_t> Mask(int k) const {
    const auto [row, col] = ClassCell(k, opt.grid_side);
    std::vector<std::uint8_t> mask(opt.image_side * opt.image_side, 0);
    for (int y = 0; y < cell; ++y) {
      for (int x = 0; x < cell; ++x) {
        mask[(row * cell + y) * opt.image_side + col * cell + x] = 1;
      }
    }
    return mask;
  }

  std::vector<float> Draw(int k) {
    const int side = opt.image_side;
    const double d = opt.distractor_strength;
    std::vector<float> img(side * side, 0.0f);
    if (d <= 0.0) {
      Stamp(img, k, 1.0);
      return img;
    }
    for (float& v : img) v = static_cast<float>(kBackground * d * Uniform());
    Stamp(img, k, 1.0 - kTrueJitter * d * Uniform());
    std::vector<int> others;
    for (int j = 0; j < opt.num_classes; ++j) {
      if (j != k) others.push_back(j);
    }
    const int count = std::min<int>(kDistractorsPerSample, others.size());
    for (int i = 0; i < count; ++i) {
      const auto pick = static_cast<std::size_t>(Uniform() * (others.size() - i)) + i;
      std::swap(others[i], others[std::min(pick, others.size() - 1)]);
      Stamp(img, others[i],
            d * (kDistractorLow + (kDistractorHigh - kDistractorLow) * Uniform()));
    }
    for (float& v : img) v = std::clamp(v, 0.0f, 1.0f);
    return img;
  }
};

}  // namespace

void PatchDatasetOptions::Validate() const {
  if (num_classes < 2) throw ConfigError("num_classes", "must be >= 2");
  if (samples_per_class < 1) throw ConfigError("samples_per_class", "must be >= 1");
  if (grid_side < 1) throw ConfigError("grid_side", "must be >= 1");
  if (image_side < 8) throw ConfigError("image_side", "must be >= 8");
  if (image_side % grid_side != 0) {
    throw ConfigError("image_side", "must be divisible by grid_side " +
                                        std::to_string(grid_side));
  }
  if (!(distractor_strength >= 0.0 && distractor_strength <= 1.0)) {
    throw ConfigError("distractor_strength", "must lie in [0, 1]");
  }
  if (!(label_noise >= 0.0 && label_noise < 1.0)) {
    throw ConfigError("label_noise", "must lie in [0, 1)");
  }
}

std::pair<int, int> ClassCell(int k, int grid_side) {
  const int slot = k % (grid_side * grid_side);
  return {slot / grid_side, slot % grid_side};
}

std::vector<float> ClassPattern(int k, int cell) {
  std::mt19937_64 rng(MixSeed(0x9a77e4ULL, static_cast<std::uint64_t>(k)));
  std::vector<float> pattern(cell * cell);
  for (float& v : pattern) v = (rng() & 1U) ? 1.0f : 0.6f;
  return pattern;
}

PatchDataset GeneratePatchDataset(const PatchDatasetOptions& options) {
  options.Validate();
  Generator gen(options);
  const int K = options.num_classes;
  const int unlabeled_per_class = options.unlabeled_per_class > 0
                                      ? options.unlabeled_per_class
                                      : 2 * options.samples_per_class;
  const Shape3 shape{1, static_cast<std::size_t>(options.image_side),
                     static_cast<std::size_t>(options.image_side)};

  PatchDataset out;
  out.masks.height = shape.height;
  out.masks.width = shape.width;

  std::int64_t next_id = 0;
  std::vector<Sample> labeled;
  std::vector<int> labels;
  for (int i = 0; i < options.samples_per_class; ++i) {
    for (int k = 0; k < K; ++k) {
      labeled.push_back({next_id, gen.Draw(k)});
      labels.push_back(k);
      out.masks.masks.emplace(next_id, gen.Mask(k));
      ++next_id;
    }
  }
  std::vector<Sample> unlabeled;
  std::vector<int> hidden;
  for (int i = 0; i < unlabeled_per_class; ++i) {
    for (int k = 0; k < K; ++k) {
      unlabeled.push_back({next_id, gen.Draw(k)});
      hidden.push_back(k);
      out.masks.masks.emplace(next_id, gen.Mask(k));
      ++next_id;
    }
  }

  const auto noisy = static_cast<std::size_t>(
      std::floor(options.label_noise * static_cast<double>(labels.size()) + 0.5));
  if (noisy > 0) {
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen.rng);
    std::uniform_int_distribution<int> any_class(0, K - 1);
    for (std::size_t i = 0; i < noisy; ++i) labels[order[i]] = any_class(gen.rng);
  }

  out.labeled = LabeledDataset(shape, std::move(labeled), std::move(labels), K,
                               SplitTag::kTrain);
  out.unlabeled = UnlabeledDataset(shape, std::move(unlabeled), K, std::move(hidden));
  return out;
}

}  // namespace impactx::data

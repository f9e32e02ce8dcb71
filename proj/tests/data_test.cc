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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "impactx/binary_io.h"
#include "impactx/data/dataset.h"
#include "impactx/data/idx.h"
#include "impactx/data/split.h"
#include "impactx/data/synthetic.h"
#include "impactx/errors.h"
#include "test_util.h"

namespace impactx::data {
namespace {

using ::impactx::testing::TempDir;

PatchDatasetOptions Options(int K, int n, int side, double d, double noise,
                            std::uint64_t seed) {
  PatchDatasetOptions o;
  o.num_classes = K;
  o.samples_per_class = n;
  o.image_side = side;
  o.distractor_strength = d;
  o.label_noise = noise;
  o.seed = seed;
  return o;
}

// Nearest class centroid where each sample is compared only on the pixels
// of its own ground-truth mask. Returns training accuracy.
double NearestCentroidAccuracy(const PatchDataset& ds) {
  const LabeledDataset& d = ds.labeled;
  const std::size_t P = d.shape().numel();
  const int K = d.num_classes();
  std::vector<std::vector<double>> centroid(K, std::vector<double>(P, 0.0));
  std::vector<double> count(K, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t p = 0; p < P; ++p) centroid[d.label(i)][p] += d.sample(i).features[p];
    count[d.label(i)] += 1.0;
  }
  for (int k = 0; k < K; ++k) {
    for (double& v : centroid[k]) v /= count[k];
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& mask = ds.masks.masks.at(d.sample(i).id);
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      double dist = 0.0;
      for (std::size_t p = 0; p < P; ++p) {
        if (!mask[p]) continue;
        const double diff = d.sample(i).features[p] - centroid[k][p];
        dist += diff * diff;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    correct += best == d.label(i);
  }
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

// Multiclass perceptron on mask-restricted inputs; converges to zero
// training error exactly when the classes are linearly separable.
double LinearProbeTrainAccuracy(const PatchDataset& ds, int max_epochs) {
  const LabeledDataset& d = ds.labeled;
  const std::size_t P = d.shape().numel();
  const int K = d.num_classes();
  std::vector<std::vector<double>> w(K, std::vector<double>(P + 1, 0.0));
  auto features = [&](std::size_t i) {
    std::vector<double> f(P + 1, 1.0);
    const auto& mask = ds.masks.masks.at(d.sample(i).id);
    for (std::size_t p = 0; p < P; ++p) f[p] = mask[p] ? d.sample(i).features[p] : 0.0;
    return f;
  };
  auto predict = [&](const std::vector<double>& f) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      const double s = std::inner_product(f.begin(), f.end(), w[k].begin(), 0.0);
      if (s > best_score) {
        best_score = s;
        best = k;
      }
    }
    return best;
  };
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    std::size_t mistakes = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto f = features(i);
      const int pred = predict(f);
      if (pred == d.label(i)) continue;
      ++mistakes;
      for (std::size_t p = 0; p <= P; ++p) {
        w[d.label(i)][p] += f[p];
        w[pred][p] -= f[p];
      }
    }
    if (mistakes == 0) break;
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) correct += predict(features(i)) == d.label(i);
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

TEST(SyntheticTest, ZeroDistractorPixelDifferenceLiesInUnionOfPatches) {
  const PatchDataset ds = GeneratePatchDataset(Options(2, 4, 8, 0.0, 0.0, 0));
  EXPECT_EQ(ds.labeled.size(), 8u);
  EXPECT_GT(ds.unlabeled.size(), 0u);
  const auto& m0 = ds.masks.masks.at(ds.labeled.sample(0).id);
  const auto& m1 = ds.masks.masks.at(ds.labeled.sample(1).id);
  ASSERT_EQ(ds.labeled.label(0), 0);
  ASSERT_EQ(ds.labeled.label(1), 1);
  for (std::size_t a = 0; a < ds.labeled.size(); ++a) {
    for (std::size_t b = 0; b < ds.labeled.size(); ++b) {
      if (ds.labeled.label(a) != 0 || ds.labeled.label(b) != 1) continue;
      for (std::size_t p = 0; p < 64; ++p) {
        const bool differs =
            ds.labeled.sample(a).features[p] != ds.labeled.sample(b).features[p];
        EXPECT_EQ(differs, m0[p] || m1[p]) << "pixel " << p;
      }
    }
  }
}

TEST(SyntheticTest, SameSeedGivesIdenticalTensors) {
  const auto o = Options(10, 200, 16, 0.5, 0.1, 7);
  const PatchDataset a = GeneratePatchDataset(o);
  const PatchDataset b = GeneratePatchDataset(o);
  ASSERT_EQ(a.labeled.size(), b.labeled.size());
  for (std::size_t i = 0; i < a.labeled.size(); ++i) {
    EXPECT_EQ(a.labeled.sample(i).features, b.labeled.sample(i).features);
    EXPECT_EQ(a.labeled.label(i), b.labeled.label(i));
  }
  for (std::size_t i = 0; i < a.unlabeled.size(); ++i) {
    EXPECT_EQ(a.unlabeled.sample(i).features, b.unlabeled.sample(i).features);
  }
}

TEST(SyntheticTest, NearestCentroidOnGroundTruthPatchesIsPerfect) {
  const PatchDataset ds = GeneratePatchDataset(Options(10, 200, 16, 0.5, 0.0, 7));
  EXPECT_EQ(NearestCentroidAccuracy(ds), 1.0);
}

TEST(SyntheticTest, ZeroDistractorPatternsAreLinearlySeparable) {
  const PatchDataset ds = GeneratePatchDataset(Options(10, 50, 16, 0.0, 0.0, 3));
  EXPECT_EQ(LinearProbeTrainAccuracy(ds, 200), 1.0);
}

TEST(SyntheticTest, MasksAreNonEmptyAndValuesInUnitRange) {
  const PatchDataset ds = GeneratePatchDataset(Options(10, 20, 16, 1.0, 0.0, 1));
  for (const auto& [id, mask] : ds.masks.masks) {
    EXPECT_GT(std::accumulate(mask.begin(), mask.end(), 0), 0) << id;
  }
  for (const auto& s : ds.labeled.samples()) {
    for (float v : s.features) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 1.0f);
    }
  }
}

TEST(SyntheticTest, LabelNoiseResamplesRequestedFraction) {
  const PatchDataset clean = GeneratePatchDataset(Options(10, 100, 16, 0.5, 0.0, 5));
  const PatchDataset noisy = GeneratePatchDataset(Options(10, 100, 16, 0.5, 0.3, 5));
  std::size_t changed = 0;
  for (std::size_t i = 0; i < clean.labeled.size(); ++i) {
    changed += clean.labeled.label(i) != noisy.labeled.label(i);
  }
  // 300 labels are resampled uniformly; 9/10 of them land on another class.
  EXPECT_GT(changed, 220u);
  EXPECT_LE(changed, 300u);
}

TEST(SyntheticTest, InvalidOptionsNameTheField) {
  auto expect_field = [](PatchDatasetOptions o, const std::string& field) {
    try {
      GeneratePatchDataset(o);
      ADD_FAILURE() << "expected ConfigError for " << field;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), field);
    }
  };
  expect_field(Options(1, 4, 8, 0.0, 0.0, 0), "num_classes");
  expect_field(Options(2, 4, 6, 0.0, 0.0, 0), "image_side");
  expect_field(Options(2, 4, 10, 0.0, 0.0, 0), "image_side");
  expect_field(Options(2, 4, 8, 1.5, 0.0, 0), "distractor_strength");
  expect_field(Options(2, 4, 8, 0.0, 1.0, 0), "label_noise");
}

TEST(SplitTest, StratifiedArithmetic) {
  const LabeledDataset d = testing::RandomDataset({1, 4, 4}, 10, 100, 1);
  const auto [train, val] = StratifiedSplit(d, 0.2, 1);
  EXPECT_EQ(train.size(), 80u);
  EXPECT_EQ(val.size(), 20u);
  for (std::size_t c : val.ClassCounts()) EXPECT_EQ(c, 2u);
  std::multiset<std::int64_t> ids;
  for (const auto& s : train.samples()) ids.insert(s.id);
  for (const auto& s : val.samples()) ids.insert(s.id);
  EXPECT_EQ(ids.size(), 100u);
  EXPECT_EQ(std::set<std::int64_t>(ids.begin(), ids.end()).size(), 100u);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(train.ClassCounts()[k] + val.ClassCounts()[k], d.ClassCounts()[k]);
  }
}

TEST(SplitTest, DeterministicPartitions) {
  const LabeledDataset d = testing::RandomDataset({1, 4, 4}, 10, 100, 1);
  const auto a = StratifiedSplit(d, 0.2, 9);
  const auto b = StratifiedSplit(d, 0.2, 9);
  for (std::size_t i = 0; i < a.second.size(); ++i) {
    EXPECT_EQ(a.second.sample(i).id, b.second.sample(i).id);
  }
}

TEST(SplitTest, InfeasibleStratificationIsConfigError) {
  const LabeledDataset d = testing::RandomDataset({1, 4, 4}, 10, 10, 1);
  EXPECT_THROW(StratifiedSplit(d, 0.05, 1), ConfigError);
  EXPECT_THROW(StratifiedSplit(d, 0.0, 1), ConfigError);
  EXPECT_THROW(StratifiedSplit(d, 1.0, 1), ConfigError);
}

TEST(SplitTest, SubsetSizeIsCeilingOfFraction) {
  const LabeledDataset d = testing::RandomDataset({1, 4, 4}, 10, 101, 1);
  EXPECT_EQ(StratifiedSubset(d, 0.5, 3).size(), 51u);
  EXPECT_EQ(StratifiedSubset(d, 1.0, 3).size(), 101u);
  EXPECT_EQ(StratifiedSubset(d, 0.5, 3), StratifiedSubset(d, 0.5, 3));
  EXPECT_THROW(StratifiedSubset(d, 0.0, 3), ConfigError);
}

void WriteBytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream(path, std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
}

std::vector<std::uint8_t> BigEndian(std::initializer_list<std::uint32_t> words) {
  std::vector<std::uint8_t> out;
  for (std::uint32_t w : words) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(w >> s));
  }
  return out;
}

TEST(IdxTest, HandWrittenPair) {
  TempDir dir;
  auto images = BigEndian({0x00000803, 2, 2, 2});
  for (std::uint8_t v : {0, 255, 51, 102, 255, 0, 0, 255}) images.push_back(v);
  auto labels = BigEndian({0x00000801, 2});
  labels.push_back(0);
  labels.push_back(1);
  WriteBytes(dir / "img", images);
  WriteBytes(dir / "lbl", labels);
  const LabeledDataset d = LoadIdx(dir / "img", dir / "lbl");
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.num_classes(), 2);
  EXPECT_EQ(d.shape(), (Shape3{1, 2, 2}));
  EXPECT_FLOAT_EQ(d.sample(0).features[1], 1.0f);
  EXPECT_FLOAT_EQ(d.sample(0).features[2], 0.2f);
  EXPECT_EQ(d.label(1), 1);
}

TEST(IdxTest, WrongMagicIsFormatError) {
  TempDir dir;
  auto images = BigEndian({0x00000801, 1, 1, 1});
  images.push_back(0);
  auto labels = BigEndian({0x00000801, 1});
  labels.push_back(0);
  WriteBytes(dir / "img", images);
  WriteBytes(dir / "lbl", labels);
  EXPECT_THROW(LoadIdx(dir / "img", dir / "lbl"), FormatError);
}

TEST(IdxTest, CountMismatchAndTruncation) {
  TempDir dir;
  auto images = BigEndian({0x00000803, 2, 1, 1});
  images.push_back(0);
  images.push_back(0);
  auto labels = BigEndian({0x00000801, 3});
  for (int i = 0; i < 3; ++i) labels.push_back(0);
  WriteBytes(dir / "img", images);
  WriteBytes(dir / "lbl", labels);
  EXPECT_THROW(LoadIdx(dir / "img", dir / "lbl"), ConsistencyError);

  auto short_images = BigEndian({0x00000803, 2, 2, 2});
  short_images.push_back(7);
  auto two_labels = BigEndian({0x00000801, 2});
  two_labels.push_back(0);
  two_labels.push_back(1);
  WriteBytes(dir / "img2", short_images);
  WriteBytes(dir / "lbl2", two_labels);
  EXPECT_THROW(LoadIdx(dir / "img2", dir / "lbl2"), IoError);
}

TEST(IdxTest, RoundTripThroughWriter) {
  TempDir dir;
  const PatchDataset ds = GeneratePatchDataset(Options(3, 5, 8, 0.0, 0.0, 2));
  WriteIdx(ds.labeled, dir / "i", dir / "l");
  const LabeledDataset back = LoadIdx(dir / "i", dir / "l");
  ASSERT_EQ(back.size(), ds.labeled.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back.label(i), ds.labeled.label(i));
    for (std::size_t p = 0; p < 64; ++p) {
      EXPECT_NEAR(back.sample(i).features[p], ds.labeled.sample(i).features[p], 0.5 / 255.0);
    }
  }
}

TEST(DatasetTest, InvariantsAreEnforced) {
  const Shape3 shape{1, 2, 2};
  std::vector<Sample> dup = {{1, std::vector<float>(4)}, {1, std::vector<float>(4)}};
  EXPECT_THROW(LabeledDataset(shape, dup, {0, 1}, 2, SplitTag::kTrain), ConsistencyError);
  std::vector<Sample> ok = {{1, std::vector<float>(4)}, {2, std::vector<float>(4)}};
  EXPECT_THROW(LabeledDataset(shape, ok, {0, 2}, 2, SplitTag::kTrain), ConsistencyError);
  EXPECT_THROW(LabeledDataset(shape, ok, {0}, 2, SplitTag::kTrain), ConsistencyError);
  std::vector<Sample> bad_shape = {{1, std::vector<float>(3)}};
  EXPECT_THROW(LabeledDataset(shape, bad_shape, {0}, 2, SplitTag::kTrain), ConsistencyError);
}

TEST(DatasetTest, PersistenceRoundTrip) {
  TempDir dir;
  const PatchDataset ds = GeneratePatchDataset(Options(3, 4, 8, 0.5, 0.0, 4));
  SaveLabeled(ds.labeled, dir / "d.ds");
  SaveUnlabeled(ds.unlabeled, dir / "u.ds");
  SaveMasks(ds.masks, dir / "m.ds");
  const LabeledDataset d = LoadLabeled(dir / "d.ds");
  const UnlabeledDataset u = LoadUnlabeled(dir / "u.ds");
  const GroundTruthMasks m = LoadMasks(dir / "m.ds");
  EXPECT_EQ(d.labels(), ds.labeled.labels());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(d.sample(i).id, ds.labeled.sample(i).id);
    EXPECT_EQ(d.sample(i).features, ds.labeled.sample(i).features);
  }
  EXPECT_EQ(u.size(), ds.unlabeled.size());
  EXPECT_TRUE(u.has_hidden_labels());
  EXPECT_EQ(m.masks, ds.masks.masks);
}

TEST(ContainerTest, RoundTripAndCorruption) {
  io::Container c;
  c.header = {{"kind", "test"}, {"shape", {2, 3}}, {"dtype", "f32"}};
  c.payload = {1, 2, 3, 4, 5, 6};
  const auto bytes = io::EncodeContainer(c);
  const io::Container back = io::DecodeContainer(bytes);
  EXPECT_EQ(back.payload, c.payload);
  EXPECT_EQ(back.header.at("kind"), "test");

  auto flipped = bytes;
  flipped[flipped.size() - 12] ^= 0x01;  // inside the payload
  EXPECT_THROW(io::DecodeContainer(flipped), IntegrityError);

  auto bad_magic = bytes;
  bad_magic[0] = 'Y';
  EXPECT_THROW(io::DecodeContainer(bad_magic), FormatError);

  const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 3);
  EXPECT_THROW(io::DecodeContainer(truncated), IoError);
}

}  // namespace
}  // namespace impactx::data

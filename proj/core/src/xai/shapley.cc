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

#include "impactx/xai/shapley.h"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "impactx/errors.h"

namespace impactx::xai {
namespace {

double Binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// Total Shapley-kernel mass of all coalitions of size s.
double SizeMass(int G, int s) {
  return static_cast<double>(G - 1) / (static_cast<double>(s) * (G - s));
}

void EnumerateSize(int G, int s, std::vector<std::uint64_t>* out) {
  // Gosper's hack over G-bit masks with s bits set.
  if (s == 0) return;
  std::uint64_t mask = (std::uint64_t{1} << s) - 1;
  const std::uint64_t limit = std::uint64_t{1} << G;
  while (mask < limit) {
    out->push_back(mask);
    const std::uint64_t c = mask & (~mask + 1);
    const std::uint64_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
}

std::uint64_t RandomSubset(int G, int s, std::mt19937_64& rng) {
  std::vector<int> items(G);
  std::iota(items.begin(), items.end(), 0);
  std::uint64_t mask = 0;
  for (int i = 0; i < s; ++i) {
    std::uniform_int_distribution<int> pick(i, G - 1);
    std::swap(items[i], items[pick(rng)]);
    mask |= std::uint64_t{1} << items[i];
  }
  return mask;
}

}  // namespace

std::vector<double> ExactShapley(const CoalitionValue& v, int num_groups) {
  internal::CountAttributionCall();
  const int G = num_groups;
  if (G < 1) throw InputError("exact Shapley needs at least one group");
  if (G > kMaxExactGroups) {
    throw CapacityError("exact Shapley over " + std::to_string(G) +
                        " groups needs 2^G evaluations; use kernel_shap");
  }
  const std::uint64_t n = std::uint64_t{1} << G;
  std::vector<double> values(n);
  for (std::uint64_t s = 0; s < n; ++s) values[s] = v(s);

  // weight[k] = k! (G-k-1)! / G!
  std::vector<double> weight(G);
  for (int k = 0; k < G; ++k) weight[k] = 1.0 / (G * Binomial(G - 1, k));

  std::vector<double> phi(G, 0.0);
  for (int i = 0; i < G; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double acc = 0.0;
    for (std::uint64_t s = 0; s < n; ++s) {
      if (s & bit) continue;
      acc += weight[std::popcount(s)] * (values[s | bit] - values[s]);
    }
    phi[i] = acc;
  }
  return phi;
}

std::size_t FullEnumerationBudget(int num_groups) {
  if (num_groups < 1 || num_groups > kMaxKernelGroups) {
    throw InputError("group count out of range for coalition enumeration");
  }
  return (std::size_t{1} << num_groups) - 2;
}

std::vector<WeightedCoalition> SampleCoalitions(int num_groups, std::size_t budget,
                                                std::uint64_t seed) {
  const int G = num_groups;
  if (G < 2 || G > kMaxKernelGroups) {
    throw InputError("KernelSHAP needs 2 <= G <= " + std::to_string(kMaxKernelGroups));
  }
  budget = std::min(budget, FullEnumerationBudget(G));

  std::vector<WeightedCoalition> out;
  std::size_t remaining = budget;
  int p = 1;
  const int half = G / 2;
  for (; p <= half; ++p) {
    const int q = G - p;
    const double count = Binomial(G, p) * (p == q ? 1.0 : 2.0);
    if (count > static_cast<double>(remaining)) break;
    for (int s : {p, q}) {
      std::vector<std::uint64_t> masks;
      EnumerateSize(G, s, &masks);
      const double w = SizeMass(G, s) / Binomial(G, s);
      for (auto m : masks) out.push_back({m, w});
      if (p == q) break;
    }
    remaining -= static_cast<std::size_t>(count);
  }
  if (p > half || remaining == 0) return out;

  // The open sizes form complementary classes {s, G - s}. Draws of a size-s
  // coalition are paired with their complement (antithetic sampling), which
  // cancels the leading error term of the regression. A complement pair adds
  // only one direction to the design once efficiency is imposed. Draws are
  // apportioned over the classes by highest averages (D'Hondt) on kernel
  // mass.
  struct SizeClass {
    int small = 0;
    double mass = 0.0;
    double capacity = 0.0;  // in coalitions
    std::size_t used = 0;
    std::size_t pairs = 0;
    std::size_t singles = 0;
  };
  std::vector<SizeClass> classes;
  for (int sz = p; sz <= G - sz; ++sz) {
    const bool middle = sz == G - sz;
    classes.push_back({sz, middle ? SizeMass(G, sz) : SizeMass(G, sz) + SizeMass(G, G - sz),
                       middle ? Binomial(G, sz) : 2.0 * Binomial(G, sz)});
  }
  auto pick_class = [&](std::size_t cost) {
    std::size_t best = classes.size();
    double best_score = -1.0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (static_cast<double>(classes[i].used + cost) > classes[i].capacity) continue;
      const double score = classes[i].mass / static_cast<double>(classes[i].used + cost);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  };
  // Pairs are used only with a comfortable margin over the G - 1 directions
  // the design needs; tighter budgets are drawn unpaired.
  const std::size_t rank_needed = static_cast<std::size_t>(G - 1);
  const std::size_t num_pairs = remaining >= 4 * rank_needed ? remaining / 2 : 0;
  std::size_t num_singles = remaining - 2 * num_pairs;
  for (std::size_t k = 0; k < num_pairs; ++k) {
    const std::size_t best = pick_class(2);
    if (best == classes.size()) {
      num_singles += 2 * (num_pairs - k);
      break;
    }
    classes[best].used += 2;
    ++classes[best].pairs;
  }
  for (std::size_t k = 0; k < num_singles; ++k) {
    const std::size_t best = pick_class(1);
    if (best == classes.size()) break;
    ++classes[best].used;
    ++classes[best].singles;
  }

  std::mt19937_64 rng(seed);
  const std::uint64_t full = (std::uint64_t{1} << G) - 1;
  std::set<std::uint64_t> seen;
  std::vector<std::uint64_t> drawn;
  for (const SizeClass& c : classes) {
    for (std::size_t made = 0; made < c.pairs;) {
      const std::uint64_t m = RandomSubset(G, c.small, rng);
      if (seen.count(m) || seen.count(full & ~m)) continue;
      seen.insert(m);
      seen.insert(full & ~m);
      drawn.push_back(m);
      drawn.push_back(full & ~m);
      ++made;
    }
    // Unpaired draws alternate between the two sizes of the class and never
    // include a complement of an earlier draw.
    for (std::size_t made = 0; made < c.singles;) {
      const int sz = made % 2 == 0 ? c.small : G - c.small;
      const std::uint64_t m = RandomSubset(G, sz, rng);
      if (seen.count(m) || seen.count(full & ~m)) continue;
      seen.insert(m);
      drawn.push_back(m);
      ++made;
    }
  }
  // Each sampled coalition carries its size's kernel mass divided by the
  // number of coalitions drawn at that size.
  std::vector<std::size_t> per_size(G + 1, 0);
  for (auto m : drawn) ++per_size[std::popcount(m)];
  for (auto m : drawn) {
    const int sz = std::popcount(m);
    out.push_back({m, SizeMass(G, sz) / static_cast<double>(per_size[sz])});
  }
  return out;
}

std::vector<double> KernelShap(const CoalitionValue& v, int num_groups,
                               std::size_t num_coalitions, std::uint64_t seed) {
  internal::CountAttributionCall();
  const int G = num_groups;
  if (G < 2 || G > kMaxKernelGroups) {
    throw InputError("KernelSHAP needs 2 <= G <= " + std::to_string(kMaxKernelGroups));
  }
  const bool enumerates = num_coalitions >= FullEnumerationBudget(G);
  if (!enumerates && num_coalitions < static_cast<std::size_t>(G) + 2) {
    throw ConfigError("num_coalitions", "must be >= G + 2 or the full enumeration size");
  }
  const std::uint64_t full_mask = (std::uint64_t{1} << G) - 1;
  const double v_empty = v(0);
  const double v_full = v(full_mask);
  const double delta = v_full - v_empty;

  const auto coalitions = SampleCoalitions(G, num_coalitions, seed);
  // Eliminate the last attribution through the efficiency constraint:
  //   y(z) - z_last * delta = sum_{i<G-1} (z_i - z_last) phi_i.
  const int cols = G - 1;
  Eigen::MatrixXd a(coalitions.size(), cols);
  Eigen::VectorXd b(coalitions.size());
  for (std::size_t r = 0; r < coalitions.size(); ++r) {
    const std::uint64_t m = coalitions[r].mask;
    const double sw = std::sqrt(coalitions[r].weight);
    const double z_last = (m >> (G - 1)) & 1U ? 1.0 : 0.0;
    for (int i = 0; i < cols; ++i) {
      const double zi = (m >> i) & 1U ? 1.0 : 0.0;
      a(r, i) = sw * (zi - z_last);
    }
    b(r) = sw * (v(m) - v_empty - z_last * delta);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < cols) {
    throw DegenerateDesignError("KernelSHAP design has rank " + std::to_string(qr.rank()) +
                                " < " + std::to_string(cols) +
                                "; raise num_coalitions");
  }
  const Eigen::VectorXd solved = qr.solve(b);
  std::vector<double> phi(G);
  double sum = 0.0;
  for (int i = 0; i < cols; ++i) {
    phi[i] = solved(i);
    sum += phi[i];
  }
  phi[G - 1] = delta - sum;
  return phi;
}

ModelCoalitionValue::ModelCoalitionValue(const model::BaseClassifier& model,
                                         std::span<const float> x,
                                         const BaselineSpec& baseline,
                                         const FeatureGrouping& grouping, int target_class)
    : model_(model), x_(x), baseline_(baseline), grouping_(grouping),
      target_class_(target_class) {
  const std::size_t n = model.network().input_size();
  if (x.size() != n || baseline.reference.size() != n || grouping.shape().numel() != n) {
    throw InputError("coalition value: input, baseline and grouping shapes differ");
  }
  if (target_class < 0 || target_class >= model.num_classes()) {
    throw InputError("target class out of range");
  }
}

double ModelCoalitionValue::operator()(std::uint64_t coalition) const {
  ++evaluations_;
  hybrid_ = baseline_.reference;
  for (int g = 0; g < grouping_.num_groups(); ++g) {
    if (!((coalition >> g) & 1U)) continue;
    for (std::size_t i : grouping_.members(g)) hybrid_[i] = x_[i];
  }
  model_.network().Forward(hybrid_, acts_);
  return acts_.output()[target_class_];
}

namespace {

AttributionMap MakeMap(const data::Sample& x, int target, AttributionMethod method,
                       const BaselineSpec& baseline, const std::vector<double>& phi) {
  AttributionMap map;
  map.sample_id = x.id;
  map.target_class = target;
  map.method = method;
  map.baseline_ref = baseline.Digest();
  map.values.assign(phi.begin(), phi.end());
  return map;
}

}  // namespace

AttributionMap ExactShapleyMap(const model::BaseClassifier& model, const data::Sample& x,
                               const BaselineSpec& baseline,
                               const FeatureGrouping& grouping, int target_class,
                               std::size_t* evaluations) {
  ModelCoalitionValue v(model, x.features, baseline, grouping, target_class);
  const auto phi = ExactShapley(v.AsFunction(), grouping.num_groups());
  if (evaluations) *evaluations += v.evaluations();
  return MakeMap(x, target_class, AttributionMethod::kExactShapley, baseline, phi);
}

AttributionMap KernelShapMap(const model::BaseClassifier& model, const data::Sample& x,
                             const BaselineSpec& baseline, const FeatureGrouping& grouping,
                             int target_class, std::size_t num_coalitions,
                             std::uint64_t seed, std::size_t* evaluations) {
  ModelCoalitionValue v(model, x.features, baseline, grouping, target_class);
  const auto phi = KernelShap(v.AsFunction(), grouping.num_groups(), num_coalitions, seed);
  if (evaluations) *evaluations += v.evaluations();
  return MakeMap(x, target_class, AttributionMethod::kKernelShap, baseline, phi);
}

}  // namespace impactx::xai

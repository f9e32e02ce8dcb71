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

// End-to-end acceptance check. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
// Usage: impactx_acceptance [work_dir]
// Without a work directory a temporary one is created and removed afterwards.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "impactx/model/base_classifier.h"
#include "impactx/nn/network.h"
#include "impactx/pipeline/commands.h"
#include "impactx/pipeline/run_directory.h"
#include "impactx/xai/gradients.h"
#include "impactx/xai/grouping.h"
#include "impactx/xai/shapley.h"
#include "json.hpp"
#include "test_util.h"

namespace impactx {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// A random grouping of the pixels of `shape` into exactly `g` non-empty
// groups.
xai::FeatureGrouping RandomGrouping(const data::Shape3& shape, int g, std::uint64_t seed) {
  const std::size_t pixels = shape.height * shape.width;
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(pixels);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> group(pixels);
  std::uniform_int_distribution<int> pick(0, g - 1);
  for (std::size_t i = 0; i < pixels; ++i) {
    group[order[i]] = i < static_cast<std::size_t>(g) ? static_cast<int>(i) : pick(rng);
  }
  return xai::FeatureGrouping(shape, group, g);
}

xai::BaselineSpec RandomBaseline(const data::Shape3& shape, std::uint64_t seed) {
  xai::BaselineSpec b = xai::BaselineSpec::Zero(shape);
  b.reference = testing::RandomVector(shape.numel(), seed, 0.0f, 0.3f);
  return b;
}

// Shapley values computed independently of the library: the subset formula
// over all coalitions, with the hybrid inputs evaluated by the
// double-precision reference forward pass.
std::vector<double> OracleShapley(const model::BaseClassifier& m, const std::vector<float>& x,
                                  const xai::BaselineSpec& b, const xai::FeatureGrouping& g,
                                  int target) {
  const int G = g.num_groups();
  const std::uint64_t full = (std::uint64_t{1} << G) - 1;
  std::vector<double> value(full + 1);
  for (std::uint64_t s = 0; s <= full; ++s) {
    std::vector<double> h(b.reference.begin(), b.reference.end());
    for (int k = 0; k < G; ++k) {
      if (s >> k & 1) {
        for (std::size_t f : g.members(k)) h[f] = x[f];
      }
    }
    value[s] = testing::ReferenceForward(m.network(), h)[target];
  }
  std::vector<double> fact(G + 1, 1.0);
  for (int i = 1; i <= G; ++i) fact[i] = fact[i - 1] * i;
  std::vector<double> phi(G, 0.0);
  for (std::uint64_t s = 0; s <= full; ++s) {
    const int size = __builtin_popcountll(s);
    for (int i = 0; i < G; ++i) {
      if (s >> i & 1) continue;
      const double w = fact[size] * fact[G - size - 1] / fact[G];
      phi[i] += w * (value[s | (std::uint64_t{1} << i)] - value[s]);
    }
  }
  return phi;
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<float>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

const data::Shape3 kImage{1, 16, 16};

Outcome ShapleyOracleEquivalence() {
  const auto start = Clock::now();
  double worst_kernel = 0.0, worst_oracle = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto m = testing::RandomClassifier(kImage, 4, 1000 + i);
    const data::Sample x{static_cast<std::int64_t>(i),
                         testing::RandomVector(kImage.numel(), 2000 + i)};
    const auto g = RandomGrouping(kImage, 8, 3000 + i);
    const auto b = RandomBaseline(kImage, 4000 + i);
    const int target = static_cast<int>(i % 4);
    const auto exact = xai::ExactShapleyMap(m, x, b, g, target);
    const auto kernel =
        xai::KernelShapMap(m, x, b, g, target, xai::FullEnumerationBudget(8), i);
    const auto oracle = OracleShapley(m, x.features, b, g, target);
    std::vector<double> e(exact.values.begin(), exact.values.end());
    worst_kernel = std::max(worst_kernel, MaxAbsDiff(e, kernel.values));
    worst_oracle = std::max(worst_oracle, MaxAbsDiff(oracle, exact.values));
  }
  const double secs = Seconds(start);
  return {worst_kernel < 1e-5 && worst_oracle < 1e-4 && secs < 120.0,
          Fmt("max |kernel_full - exact| = %.2e (< 1e-5); max |exact - independent oracle| = "
              "%.2e (< 1e-4); %.1f s",
              worst_kernel, worst_oracle, secs)};
}

using Game = std::function<double(std::uint64_t)>;

Game TableGame(int g, std::uint64_t seed) {
  auto table = std::make_shared<std::vector<double>>(std::size_t{1} << g);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& v : *table) v = n(rng);
  return [table](std::uint64_t s) { return (*table)[s]; };
}

Outcome ShapleyAxioms() {
  const auto start = Clock::now();
  double eff = 0.0, dummy = 0.0, sym = 0.0, lin = 0.0;
  int games = 0;
  for (int g = 3; g <= 10; ++g) {
    for (std::uint64_t r = 0; r < 3; ++r) {
      const std::uint64_t seed = 100 * static_cast<std::uint64_t>(g) + r;
      const std::uint64_t full = (std::uint64_t{1} << g) - 1;
      using Solver = std::function<std::vector<double>(const Game&)>;
      const std::vector<Solver> solvers = {
          [g](const Game& v) { return xai::ExactShapley(v, g); },
          [g, seed](const Game& v) {
            return xai::KernelShap(v, g, xai::FullEnumerationBudget(g), seed);
          }};
      for (const Solver& solve : solvers) {
        ++games;
        // Efficiency.
        const Game v = TableGame(g, seed);
        const auto phi = solve(v);
        const double sum = std::accumulate(phi.begin(), phi.end(), 0.0);
        eff = std::max(eff, std::abs(sum - (v(full) - v(0))));

        // Dummy: player d never changes the value.
        const int d = static_cast<int>(seed % static_cast<std::uint64_t>(g));
        const std::uint64_t dbit = std::uint64_t{1} << d;
        const Game vd = [v, dbit](std::uint64_t s) { return v(s & ~dbit); };
        dummy = std::max(dummy, std::abs(solve(vd)[d]));

        // Symmetry: players i and j are interchangeable.
        const int i = 0, j = g - 1;
        const std::uint64_t bi = std::uint64_t{1} << i, bj = std::uint64_t{1} << j;
        const Game vs = [v, bi, bj](std::uint64_t s) {
          const int c = ((s & bi) != 0) + ((s & bj) != 0);
          const std::uint64_t key = (s & ~(bi | bj)) | (c >= 1 ? bi : 0) | (c == 2 ? bj : 0);
          return v(key);
        };
        const auto ps = solve(vs);
        sym = std::max(sym, std::abs(ps[i] - ps[j]));

        // Linearity.
        const Game w = TableGame(g, seed + 7);
        const double a = 1.7, c = -0.6;
        const Game vw = [v, w, a, c](std::uint64_t s) { return a * v(s) + c * w(s); };
        const auto pw = solve(w);
        const auto pvw = solve(vw);
        for (int k = 0; k < g; ++k) {
          lin = std::max(lin, std::abs(pvw[k] - (a * phi[k] + c * pw[k])));
        }
      }
    }
  }
  const double secs = Seconds(start);
  return {eff < 1e-5 && dummy < 1e-5 && sym < 1e-5 && lin < 1e-5 && secs < 60.0,
          Fmt("%d games (exact and full kernel, G=3..10): efficiency %.1e, dummy %.1e, "
              "symmetry %.1e, linearity %.1e (each < 1e-5); %.1f s",
              games, eff, dummy, sym, lin, secs)};
}

Outcome SampledKernelShapAccuracy() {
  const auto start = Clock::now();
  double worst_ratio = 0.0;
  int failures = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto m = testing::RandomClassifier(kImage, 4, 5000 + i);
    const data::Sample x{static_cast<std::int64_t>(i),
                         testing::RandomVector(kImage.numel(), 6000 + i)};
    const auto g = RandomGrouping(kImage, 12, 7000 + i);
    const auto b = RandomBaseline(kImage, 8000 + i);
    const int target = static_cast<int>(i % 4);
    const auto exact = xai::ExactShapleyMap(m, x, b, g, target);
    const auto kernel = xai::KernelShapMap(m, x, b, g, target, 2000, 9000 + i);
    double mae = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < exact.values.size(); ++k) {
      mae += std::abs(kernel.values[k] - exact.values[k]);
      scale = std::max(scale, static_cast<double>(std::abs(exact.values[k])));
    }
    mae /= static_cast<double>(exact.values.size());
    const double ratio = mae / scale;
    worst_ratio = std::max(worst_ratio, ratio);
    failures += !(ratio < 0.05);
  }
  const double secs = Seconds(start);
  return {failures == 0 && secs < 300.0,
          Fmt("G=12, budget 2000: worst mean|err| / max|phi_exact| = %.4f (< 0.05), %d of 20 "
              "instances over; %.1f s",
              worst_ratio, failures, secs)};
}

// f(x) = w . x + c, with an exact gradient.
class LinearScore : public xai::DifferentiableScore {
 public:
  LinearScore(std::vector<float> w, double c) : w_(std::move(w)), c_(c) {}
  double Value(std::span<const float> x) const override {
    double v = c_;
    for (std::size_t i = 0; i < x.size(); ++i) v += static_cast<double>(w_[i]) * x[i];
    return v;
  }
  std::vector<float> Gradient(std::span<const float>) const override { return w_; }

 private:
  std::vector<float> w_;
  double c_;
};

Outcome IntegratedGradientsCompleteness() {
  const auto start = Clock::now();
  int violations = 0;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto m = testing::RandomClassifier(kImage, 4, 10000 + i);
    const auto x = testing::RandomVector(kImage.numel(), 11000 + i);
    const auto b = testing::RandomVector(kImage.numel(), 12000 + i, 0.0f, 0.3f);
    const xai::ClassLogitScore f(m, static_cast<int>(i % 4));
    const auto ig = xai::IntegratedGradientsPerFeature(f, x, b, 512);
    const double delta = f.Value(x) - f.Value(b);
    const double gap = std::abs(std::accumulate(ig.begin(), ig.end(), 0.0) - delta);
    const double bound = 1e-3 * std::abs(delta) + 1e-4;
    worst = std::max(worst, gap / bound);
    violations += gap > bound;
  }
  // Linear models: one step is exact, feature by feature.
  double linear_err = 0.0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const auto w = testing::RandomVector(64, 13000 + i, -1.0f, 1.0f);
    const auto x = testing::RandomVector(64, 14000 + i);
    const auto b = testing::RandomVector(64, 15000 + i);
    const LinearScore f(w, 0.25);
    const auto ig = xai::IntegratedGradientsPerFeature(f, x, b, 1);
    for (std::size_t k = 0; k < 64; ++k) {
      linear_err = std::max(
          linear_err, std::abs(ig[k] - static_cast<double>(w[k]) * (static_cast<double>(x[k]) -
                                                                     b[k])));
    }
    linear_err = std::max(
        linear_err, std::abs(std::accumulate(ig.begin(), ig.end(), 0.0) -
                             (f.Value(x) - f.Value(b))));
  }
  const double secs = Seconds(start);
  return {violations == 0 && linear_err < 1e-9 && secs < 120.0,
          Fmt("steps=512 on 20 CNNs: worst gap / (1e-3|df| + 1e-4) = %.3f (<= 1); linear "
              "steps=1 max error %.1e; %.1f s",
              worst, linear_err, secs)};
}

Outcome GradientCorrectness() {
  const auto start = Clock::now();
  constexpr double kStep = 1e-5;
  std::size_t checked = 0, agreed = 0;
  for (std::uint64_t pair = 0; pair < 20; ++pair) {
    const auto m = testing::RandomClassifier(kImage, 10, 16000 + pair);
    const auto x = testing::RandomVector(kImage.numel(), 17000 + pair);
    const int target = static_cast<int>(pair % 10);
    const auto grad = m.ClassScoreGradient(x, target);
    std::vector<double> xd(x.begin(), x.end());
    std::mt19937_64 rng(18000 + pair);
    std::uniform_int_distribution<std::size_t> coord(0, x.size() - 1);
    for (int s = 0; s < 64; ++s) {
      const std::size_t i = coord(rng);
      const double saved = xd[i];
      xd[i] = saved + kStep;
      const double up = testing::ReferenceForward(m.network(), xd)[target];
      xd[i] = saved - kStep;
      const double down = testing::ReferenceForward(m.network(), xd)[target];
      xd[i] = saved;
      const double fd = (up - down) / (2.0 * kStep);
      const double scale = std::max(std::abs(fd), static_cast<double>(std::abs(grad[i])));
      const double rel = scale == 0.0 ? 0.0 : std::abs(grad[i] - fd) / scale;
      ++checked;
      agreed += rel < 1e-3;
    }
  }
  const double frac = static_cast<double>(agreed) / static_cast<double>(checked);
  const double secs = Seconds(start);
  return {frac >= 0.99 && secs < 120.0,
          Fmt("%zu/%zu sampled coordinates (%.2f%%) within relative error 1e-3 (need >= 99%%); "
              "%.1f s",
              agreed, checked, 100.0 * frac, secs)};
}

// ---------------------------------------------------------------------------
// Desk-scale pipeline runs.

json DeskConfig(int seed) {
  json c = json::parse(R"({
    "dataset": {"num_classes": 10, "samples_per_class": 200, "image_side": 16,
                "distractor_strength": 0.5, "label_noise": 0.1},
    "model": {"epochs": 3, "learning_rate": 0.0007}
  })");
  c["seed"] = seed;
  return c;
}

struct RunResult {
  bool ok = false;
  std::string log;
  json comparison;
  std::string comparison_bytes;
  bool hash_unchanged = false;
  double seconds = 0.0;
};

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunResult RunPipeline(const fs::path& dir, int seed, const std::string& strategy) {
  using namespace pipeline;
  const auto start = Clock::now();
  RunResult r;
  std::ostringstream log;
  int code = CmdPretrainJson(DeskConfig(seed), dir, log);
  std::string hash_before;
  if (code == kExitOk) {
    hash_before = RunDirectory::Open(dir).Fact("model_hash").get<std::string>();
  }
  if (code == kExitOk) code = CmdExplain(dir, "train", log);
  if (code == kExitOk) code = CmdExplain(dir, "val", log);
  if (code == kExitOk) code = CmdTrainImpactx(dir, strategy, log);
  if (code == kExitOk) code = CmdEvaluate(dir, log);
  r.log = log.str();
  r.seconds = Seconds(start);
  if (code != kExitOk) {
    r.log += "exit code " + std::to_string(code) + "\n";
    return r;
  }
  const model::BaseClassifier after = model::LoadCheckpoint(dir / "checkpoints" / "M.ckpt");
  r.comparison_bytes = ReadFile(dir / "reports" / "comparison.json");
  r.comparison = json::parse(r.comparison_bytes);
  r.hash_unchanged = after.checkpoint_hash() == hash_before &&
                     after.RecomputeHash() == hash_before &&
                     r.comparison["model_hash_unchanged"].get<bool>();
  r.ok = true;
  return r;
}

double Accuracy(const json& cmp, const char* key) { return cmp[key].get<double>(); }

int Run(const fs::path& work) {
  std::vector<std::pair<int, Outcome>> outcomes;
  auto report = [&](int id, Outcome o) {
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail
              << std::endl;
    outcomes.emplace_back(id, std::move(o));
  };
  report(1, ShapleyOracleEquivalence());
  report(2, ShapleyAxioms());
  report(3, SampledKernelShapAccuracy());
  report(4, IntegratedGradientsCompleteness());
  report(5, GradientCorrectness());

  setenv(pipeline::kCacheDirEnv, (work / "cache").c_str(), 1);
  const std::vector<int> seeds = {1, 2, 3, 4, 5};
  std::vector<RunResult> ed, ae, rerun;
  double ed_seconds = 0.0;
  for (int seed : seeds) {
    ed.push_back(RunPipeline(work / ("ed_s" + std::to_string(seed)), seed, "ed"));
    ed_seconds += ed.back().seconds;
    if (!ed.back().ok) std::cerr << ed.back().log;
  }
  for (int seed : seeds) {
    ae.push_back(RunPipeline(work / ("ae_s" + std::to_string(seed)), seed, "ae"));
    if (!ae.back().ok) std::cerr << ae.back().log;
  }
  for (int seed : seeds) {
    rerun.push_back(RunPipeline(work / ("ed_rerun_s" + std::to_string(seed)), seed, "ed"));
    if (!rerun.back().ok) std::cerr << rerun.back().log;
  }
  auto all_ok = [](const std::vector<RunResult>& runs) {
    return std::all_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.ok; });
  };

  // 6: improvement of strategy ed.
  {
    Outcome o;
    if (!all_ok(ed)) {
      o.detail = "a pipeline run failed";
    } else {
      double sum = 0.0, worst = 1.0;
      bool baseline_in_range = true;
      std::ostringstream per_seed;
      for (std::size_t i = 0; i < ed.size(); ++i) {
        const double base = Accuracy(ed[i].comparison, "baseline_accuracy");
        const double imp = Accuracy(ed[i].comparison, "impactx_accuracy");
        sum += imp - base;
        worst = std::min(worst, imp - base);
        baseline_in_range &= base >= 0.70 && base <= 0.85;
        per_seed << Fmt(" s%d %.4f->%.4f", seeds[i], base, imp);
      }
      const double mean_pp = 100.0 * sum / static_cast<double>(ed.size());
      o.pass = mean_pp >= 2.0 && worst >= 0.0 && baseline_in_range && ed_seconds < 900.0;
      o.detail = Fmt("mean improvement %+.2f pp (>= +2.0), worst seed %+.2f pp (>= 0), "
                     "baselines in [0.70, 0.85]: %s, %.0f s;",
                     mean_pp, 100.0 * worst, baseline_in_range ? "yes" : "no", ed_seconds) +
                 per_seed.str();
    }
    report(6, o);
  }

  // 7: strategy ae does not degrade on average.
  {
    Outcome o;
    if (!all_ok(ae)) {
      o.detail = "a pipeline run failed";
    } else {
      double sum = 0.0;
      std::ostringstream per_seed;
      for (std::size_t i = 0; i < ae.size(); ++i) {
        const double d = Accuracy(ae[i].comparison, "accuracy_difference");
        sum += d;
        per_seed << Fmt(" s%d %+.2f", seeds[i], 100.0 * d);
      }
      const double mean_pp = 100.0 * sum / static_cast<double>(ae.size());
      o.pass = mean_pp >= 0.0;
      o.detail = Fmt("mean improvement %+.2f pp (>= 0); per seed (pp):", mean_pp) +
                 per_seed.str();
    }
    report(7, o);
  }

  // 8: no class loses more than 5 pp of recall when accuracy improves.
  {
    Outcome o;
    if (!all_ok(ed)) {
      o.detail = "a pipeline run failed";
    } else {
      o.pass = true;
      std::ostringstream per_seed;
      for (std::size_t i = 0; i < ed.size(); ++i) {
        const json& s = ed[i].comparison["per_class_delta_summary"];
        const double min = s["min"].get<double>();
        const bool improved = Accuracy(ed[i].comparison, "accuracy_difference") > 0.0;
        if (improved && min < -0.05) o.pass = false;
        per_seed << Fmt(" s%d min %+.1f spread %.1f", seeds[i], 100.0 * min,
                        100.0 * s["spread"].get<double>());
      }
      o.detail = "per-class recall delta in pp (min must be >= -5):" + per_seed.str();
    }
    report(8, o);
  }

  // 9: reconstructed explanations beat the permuted pairing by >= 0.2.
  {
    Outcome o;
    if (!all_ok(ed)) {
      o.detail = "a pipeline run failed";
    } else {
      o.pass = true;
      std::ostringstream per_seed;
      for (std::size_t i = 0; i < ed.size(); ++i) {
        const json& s = ed[i].comparison["explanation_similarity"];
        const double cos = s["mean_cosine"].get<double>();
        const double perm = s["permuted_mean_cosine"].get<double>();
        if (!(cos - perm >= 0.2)) o.pass = false;
        per_seed << Fmt(" s%d %.3f vs %.3f", seeds[i], cos, perm);
      }
      o.detail = "mean cosine vs permuted (margin >= 0.2):" + per_seed.str();
    }
    report(9, o);
  }

  // 10: M is bit-identical before and after every strategy run.
  {
    Outcome o;
    o.pass = all_ok(ed) && all_ok(ae);
    std::size_t checked = 0;
    for (const auto* runs : {&ed, &ae}) {
      for (const RunResult& r : *runs) {
        o.pass &= r.hash_unchanged;
        checked += r.ok;
      }
    }
    o.detail = Fmt("%zu runs checked (5 ed, 5 ae): checkpoint hash and recomputed parameter "
                   "digest unchanged",
                   checked);
    report(10, o);
  }

  // 11: identical seeds give byte-identical comparison.json.
  {
    Outcome o;
    o.pass = all_ok(ed) && all_ok(rerun);
    std::size_t same = 0;
    for (std::size_t i = 0; i < ed.size() && i < rerun.size(); ++i) {
      const bool eq = ed[i].ok && rerun[i].ok &&
                      ed[i].comparison_bytes == rerun[i].comparison_bytes;
      same += eq;
      o.pass &= eq;
    }
    o.detail = Fmt("%zu/%zu reruns of the criterion-6 seeds byte-identical", same, ed.size());
    report(11, o);
  }

  // 12: corrected - broken equals the difference in correct counts.
  {
    Outcome o;
    o.pass = all_ok(ed);
    std::ostringstream per_seed;
    for (std::size_t i = 0; i < ed.size(); ++i) {
      if (!ed[i].ok) continue;
      const json& c = ed[i].comparison;
      const long corrected = c["flips"]["num_corrected"].get<long>();
      const long broken = c["flips"]["num_broken"].get<long>();
      const long diff =
          c["impactx_correct"].get<long>() - c["baseline_correct"].get<long>();
      o.pass &= corrected - broken == diff && c["correct_difference"].get<long>() == diff;
      per_seed << Fmt(" s%d %ld-%ld=%ld", seeds[i], corrected, broken, diff);
    }
    o.detail = "corrected - broken = correct difference:" + per_seed.str();
    report(12, o);
  }

  const bool all_pass = std::all_of(outcomes.begin(), outcomes.end(),
                                    [](const auto& p) { return p.second.pass; });
  std::cout << (all_pass ? "all criteria passed" : "some criteria failed") << std::endl;
  return all_pass ? 0 : 1;
}

}  // namespace
}  // namespace impactx

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  fs::path work;
  bool cleanup = false;
  if (argc > 1) {
    work = argv[1];
    if (fs::exists(work) && !fs::is_empty(work)) {
      std::cerr << work << " exists and is not empty\n";
      return 2;
    }
  } else {
    work = fs::temp_directory_path() / ("impactx_acceptance_" + std::to_string(getpid()));
    cleanup = true;
  }
  fs::create_directories(work);
  const int code = impactx::Run(work);
  if (cleanup) fs::remove_all(work);
  return code;
}

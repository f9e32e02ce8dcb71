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

#include "impactx/pipeline/commands.h"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "impactx/binary_io.h"
#include "impactx/data/dataset.h"
#include "impactx/data/idx.h"
#include "impactx/data/split.h"
#include "impactx/data/synthetic.h"
#include "impactx/digest.h"
#include "impactx/eval/metrics.h"
#include "impactx/eval/report.h"
#include "impactx/fusion/fusion_classifier.h"
#include "impactx/model/base_classifier.h"
#include "impactx/model/checkpoint.h"
#include "impactx/pipeline/run_directory.h"
#include "impactx/strategy/autoencoder.h"
#include "impactx/strategy/encoder_decoder.h"
#include "impactx/strategy/predictor.h"
#include "impactx/xai/explain.h"
#include "impactx/xai/shapley.h"

namespace impactx::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char kModelCheckpoint[] = "checkpoints/M.ckpt";

// Maps library exceptions onto the fixed exit-code table.
template <typename Fn>
int Guard(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError& e) {
    log << "error: " << e.what() << "\n";
    return e.code();
  } catch (const ConfigError& e) {
    log << "configuration error at '" << e.field() << "': " << e.what() << "\n";
    return kExitConfig;
  } catch (const TrainingError& e) {
    log << "training error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const xai::CacheMissError& e) {
    log << "error: " << e.what() << "\n";
    return kExitMissingCache;
  } catch (const IntegrityError& e) {
    log << "integrity error: " << e.what() << "\n";
    return kExitHashDrift;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

struct RunData {
  data::LabeledDataset train;
  data::LabeledDataset val;
  data::UnlabeledDataset eval;
};

RunData LoadRunData(const RunDirectory& run) {
  return {data::LoadLabeled(run.data_dir() / "train.ds"),
          data::LoadLabeled(run.data_dir() / "val.ds"),
          data::LoadUnlabeled(run.data_dir() / "eval.ds")};
}

// Loads M and checks it against the hash recorded at pretraining time.
std::shared_ptr<const model::BaseClassifier> LoadFrozenModel(const RunDirectory& run) {
  const fs::path path = run.root() / kModelCheckpoint;
  if (!fs::exists(path) || !run.HasFact("model_hash")) {
    throw StageError(kExitMissingCheckpoint,
                     "no frozen classifier in " + run.root().string() + "; run pretrain first");
  }
  auto model = std::make_shared<const model::BaseClassifier>(model::LoadCheckpoint(path));
  const std::string expected = run.Fact("model_hash").get<std::string>();
  if (model->checkpoint_hash() != expected || model->RecomputeHash() != expected) {
    throw StageError(kExitHashDrift, "frozen classifier hash drifted from " + expected);
  }
  return model;
}

void CheckModelUnchanged(const RunDirectory& run, const model::BaseClassifier& model) {
  if (model.RecomputeHash() != run.Fact("model_hash").get<std::string>()) {
    throw StageError(kExitHashDrift, "frozen classifier changed during the command");
  }
}

xai::FeatureGrouping MakeGrouping(const ExperimentConfig& config, const data::Shape3& shape) {
  return xai::FeatureGrouping::Grid(shape, config.xai.grid_rows, config.xai.grid_cols);
}

xai::BaselineSpec MakeBaseline(const ExperimentConfig& config, const data::LabeledDataset& train) {
  return config.xai.baseline == xai::BaselineMode::kZero ? xai::BaselineSpec::Zero(train.shape())
                                                         : xai::BaselineSpec::DatasetMean(train);
}

xai::ExplainOptions MakeExplainOptions(const RunDirectory& run, const xai::FeatureGrouping& g,
                                       xai::TargetPolicy policy, bool cache_only) {
  const ExperimentConfig& c = run.config();
  xai::ExplainOptions o;
  o.method = c.xai.method;
  o.policy = policy;
  o.budget = c.xai.budget == 0 ? xai::FullEnumerationBudget(g.num_groups()) : c.xai.budget;
  o.ig_steps = c.xai.ig_steps;
  o.seed = MixSeed(c.seed, "xai");
  o.cache_dir = run.cache_dir();
  o.cache_only = cache_only;
  o.workers = c.xai.workers;
  return o;
}

// The deterministic stratified subset of the training split available to the
// strategies.
data::LabeledDataset TrainingSubset(const RunDirectory& run, const data::LabeledDataset& train,
                                    std::vector<std::int64_t>* ids = nullptr) {
  std::vector<std::size_t> idx =
      data::StratifiedSubset(train, run.config().impactx_train_fraction,
                             MixSeed(run.config().seed, "impactx_train_fraction"));
  std::sort(idx.begin(), idx.end());
  data::LabeledDataset subset = train.Subset(idx, data::SplitTag::kTrain);
  if (ids != nullptr) {
    ids->clear();
    for (const auto& s : subset.samples()) ids->push_back(s.id);
  }
  return subset;
}

std::string KeysDigest(const std::vector<std::string>& keys) {
  std::string joined;
  for (const auto& k : keys) joined += k + "\n";
  return Sha256Hex(joined);
}

xai::ExplanationSet ExplainCached(const RunDirectory& run, const model::BaseClassifier& model,
                                  const data::LabeledDataset& dataset,
                                  const data::LabeledDataset& train, xai::TargetPolicy policy,
                                  bool cache_only) {
  const auto grouping = MakeGrouping(run.config(), dataset.shape());
  const auto baseline = MakeBaseline(run.config(), train);
  try {
    return xai::ExplainDataset(model, dataset, baseline, grouping,
                               MakeExplainOptions(run, grouping, policy, cache_only));
  } catch (const xai::CacheMissError& e) {
    throw StageError(kExitMissingCache,
                     std::string(e.what()) + "; run `impactx explain` for this split first");
  }
}

void WriteJson(RunDirectory& run, const fs::path& path, const json& value) {
  io::WriteJsonAtomic(path, value);
  run.Record(path);
}

void WriteText(RunDirectory& run, const fs::path& path, const std::string& text) {
  io::WriteFileAtomic(path, text);
  run.Record(path);
}

json Provenance(const RunDirectory& run) {
  json p = {{"config_digest", run.config_digest()}, {"model_hash", run.Fact("model_hash")}};
  if (run.HasFact("strategy")) {
    p["strategy"] = run.Fact("strategy");
    p["strategy_checkpoints"] = run.Fact("strategy_checkpoints");
    p["cache_keys"] = run.Fact("cache_keys");
  }
  return p;
}

int Pretrain(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
  RunDirectory run = RunDirectory::Create(out, config);

  data::LabeledDataset labeled;
  data::UnlabeledDataset unlabeled;
  if (config.dataset.source == "synthetic") {
    data::PatchDataset generated = data::GeneratePatchDataset(config.dataset.synthetic);
    labeled = std::move(generated.labeled);
    unlabeled = std::move(generated.unlabeled);
    data::SaveMasks(generated.masks, run.data_dir() / "masks.ds");
    run.Record(run.data_dir() / "masks.ds");
  } else {
    labeled = data::LoadIdx(config.dataset.train_images, config.dataset.train_labels);
    unlabeled = data::HideLabels(
        data::LoadIdx(config.dataset.eval_images, config.dataset.eval_labels));
    if (!(labeled.shape() == unlabeled.shape())) {
      throw ConfigError("dataset.eval_images", "eval images differ in shape from train images");
    }
  }
  auto [train, val] =
      data::StratifiedSplit(labeled, config.dataset.val_fraction, MixSeed(config.seed, "split"));
  data::SaveLabeled(train, run.data_dir() / "train.ds");
  data::SaveLabeled(val, run.data_dir() / "val.ds");
  data::SaveUnlabeled(unlabeled, run.data_dir() / "eval.ds");
  for (const char* name : {"train.ds", "val.ds", "eval.ds"}) run.Record(run.data_dir() / name);
  log << "dataset: " << train.size() << " train, " << val.size() << " val, " << unlabeled.size()
      << " eval samples, K=" << labeled.num_classes() << "\n";

  auto model = std::make_shared<const model::BaseClassifier>(
      model::Pretrain(train, val, config.model));
  model::SaveCheckpoint(*model, run.root() / kModelCheckpoint);
  run.Record(run.root() / kModelCheckpoint);
  run.SetFact("model_hash", model->checkpoint_hash());
  WriteJson(run, run.checkpoints_dir() / "M.history.json", model->history().ToJson());

  const eval::EvalReport report = eval::Evaluate(strategy::BaselinePredictor(model), unlabeled);
  json j = report.ToJson();
  j["provenance"] = Provenance(run);
  WriteJson(run, run.reports_dir() / "baseline.json", j);
  WriteText(run, run.reports_dir() / "confusion_baseline.csv", report.confusion.ToCsv());
  log << "baseline accuracy on U: " << std::fixed << std::setprecision(4) << report.accuracy
      << "\n";
  return kExitOk;
}

void SaveStrategyFacts(RunDirectory& run, const std::string& name,
                       const std::vector<std::string>& checkpoints,
                       const std::vector<std::int64_t>& ids, const json& cache_keys) {
  json digests = json::object();
  for (const auto& c : checkpoints) digests[c] = run.ArtifactDigest(c);
  run.SetFact("strategy_checkpoints", digests);
  run.SetFact("impactx_train_ids", ids);
  run.SetFact("cache_keys", cache_keys);
  run.SetFact("strategy", name);
}

int TrainImpactx(const fs::path& root, const std::string& name, std::ostream& log) {
  if (name != "ae" && name != "ed") {
    throw ConfigError("strategy", "must be 'ae' or 'ed', got '" + name + "'");
  }
  RunDirectory run = RunDirectory::Open(root);
  if (run.HasFact("strategy")) {
    const std::string existing = run.Fact("strategy").get<std::string>();
    if (existing == name) {
      log << "strategy " << name << " already trained in this run; nothing to do\n";
      return kExitOk;
    }
    throw ConfigError("strategy", "this run already holds strategy '" + existing +
                                      "'; use a separate run directory for '" + name + "'");
  }
  const auto model = LoadFrozenModel(run);
  const ExperimentConfig& c = run.config();
  RunData d = LoadRunData(run);
  std::vector<std::int64_t> ids;
  const data::LabeledDataset subset = TrainingSubset(run, d.train, &ids);
  const auto train_expl =
      ExplainCached(run, *model, subset, d.train, c.xai.target_policy, /*cache_only=*/true);
  const auto val_expl =
      ExplainCached(run, *model, d.val, d.train, c.xai.target_policy, /*cache_only=*/true);
  const json cache_keys = {{"train", KeysDigest(train_expl.cache_keys)},
                           {"val", KeysDigest(val_expl.cache_keys)}};
  log << "training strategy " << name << " on " << subset.size() << " samples\n";

  std::vector<std::string> checkpoints;
  auto save = [&](const std::string& rel, auto&& writer) {
    writer(run.root() / rel);
    run.Record(run.root() / rel);
    checkpoints.push_back(rel);
  };
  if (name == "ae") {
    strategy::AeStrategyOptions o;
    o.latent_dim = c.strategy.latent_dim;
    o.autoencoder_train = c.strategy.autoencoder_train;
    o.encoder_train = c.strategy.encoder_train;
    o.fusion_train = c.strategy.fusion_train;
    o.fusion = c.fusion;
    o.fine_tune = c.strategy.fine_tune;
    o.fine_tune_epochs = c.strategy.fine_tune_epochs;
    strategy::AeStrategyResult r = strategy::RunAutoencoderStrategy(
        *model, subset, train_expl.maps, d.val, val_expl.maps, o);
    save("checkpoints/autoencoder.ckpt",
         [&](const fs::path& p) { strategy::SaveAutoencoder(r.autoencoder, p); });
    save("checkpoints/attribution_encoder.ckpt",
         [&](const fs::path& p) { strategy::SaveAttributionEncoder(r.attribution_encoder, p); });
    save("checkpoints/fusion_classifier.ckpt",
         [&](const fs::path& p) { fusion::SaveFusion(r.classifier, p); });
    WriteJson(run, run.checkpoints_dir() / "autoencoder.history.json",
              r.autoencoder.history().ToJson());
    WriteJson(run, run.checkpoints_dir() / "attribution_encoder.history.json",
              r.encoder_history.ToJson());
    WriteJson(run, run.checkpoints_dir() / "fusion_classifier.history.json",
              {{"train", r.fusion_history.ToJson()},
               {"fine_tune", r.fine_tune_history.ToJson()}});
    WriteJson(run, run.logs_dir() / "strategy.json",
              {{"strategy", "ae"},
               {"step_order", r.step_order},
               {"distill_train_mse", r.distill_train_mse},
               {"distill_val_mse", r.distill_val_mse},
               {"fusion_input_source", r.fusion_input_source},
               {"fusion_train_inputs_digest", r.fusion_train_inputs_digest},
               {"warnings", r.warnings}});
    for (const auto& w : r.warnings) log << "warning: " << w << "\n";
  } else {
    strategy::EdStrategyOptions o;
    o.latent_dim = c.strategy.latent_dim;
    o.weights = c.strategy.weights;
    o.fusion = c.fusion;
    o.train = c.strategy.joint_train;
    strategy::JointTrainingResult r =
        strategy::TrainJoint(subset, train_expl.maps, d.val, val_expl.maps, *model, o);
    save("checkpoints/encoder_decoder.ckpt",
         [&](const fs::path& p) { strategy::SaveEncoderDecoder(r.model, p); });
    save("checkpoints/fusion_classifier.ckpt",
         [&](const fs::path& p) { fusion::SaveFusion(r.classifier, p); });
    WriteJson(run, run.checkpoints_dir() / "encoder_decoder.history.json",
              strategy::JointHistoryJson(r.history));
    WriteJson(run, run.logs_dir() / "strategy.json",
              {{"strategy", "ed"}, {"best_epoch", r.history.best_epoch}});
  }
  CheckModelUnchanged(run, *model);
  SaveStrategyFacts(run, name, checkpoints, ids, cache_keys);
  log << "strategy " << name << " trained; M hash unchanged\n";
  return kExitOk;
}

std::unique_ptr<strategy::ImpactxPredictor> LoadPredictor(
    const RunDirectory& run, std::shared_ptr<const model::BaseClassifier> model) {
  const std::string name = run.Fact("strategy").get<std::string>();
  const json checkpoints = run.Fact("strategy_checkpoints");
  for (const auto& [rel, digest] : checkpoints.items()) {
    const fs::path p = run.root() / rel;
    if (!fs::exists(p)) throw StageError(kExitMissingCheckpoint, rel + " is missing");
    if (Sha256Hex(io::ReadFile(p)) != digest.get<std::string>()) {
      throw StageError(kExitHashDrift, rel + " changed after training");
    }
  }
  fusion::FusionClassifier c = fusion::LoadFusion(run.root() / "checkpoints/fusion_classifier.ckpt");
  if (name == "ae") {
    return std::make_unique<strategy::ImpactxPredictor>(strategy::AssembleAePipeline(
        std::move(model),
        strategy::LoadAttributionEncoder(run.root() / "checkpoints/attribution_encoder.ckpt"),
        strategy::LoadAutoencoder(run.root() / "checkpoints/autoencoder.ckpt"), std::move(c)));
  }
  return std::make_unique<strategy::ImpactxPredictor>(strategy::AssembleEdPipeline(
      std::move(model),
      strategy::LoadEncoderDecoder(run.root() / "checkpoints/encoder_decoder.ckpt"),
      std::move(c)));
}

// Indices of up to `count` eval samples chosen by a seeded shuffle, sorted.
std::vector<std::size_t> SampleIndices(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(n, count));
  std::sort(idx.begin(), idx.end());
  return idx;
}

int Evaluate(const fs::path& root, std::ostream& log) {
  RunDirectory run = RunDirectory::Open(root);
  const fs::path baseline_path = run.reports_dir() / "baseline.json";
  if (!fs::exists(baseline_path)) {
    throw StageError(kExitMissingBaseline, "reports/baseline.json is missing; run pretrain");
  }
  if (!run.HasFact("strategy")) {
    throw StageError(kExitMissingCheckpoint, "no trained strategy; run train-impactx first");
  }
  const fs::path comparison_path = run.reports_dir() / "comparison.json";
  if (fs::exists(comparison_path) && run.VerifyManifest().empty()) {
    log << "evaluation already complete; nothing to do\n";
    return kExitOk;
  }
  const auto model = LoadFrozenModel(run);
  const auto predictor = LoadPredictor(run, model);
  const ExperimentConfig& c = run.config();
  RunData d = LoadRunData(run);

  const eval::EvalReport baseline = eval::EvalReport::FromJson(io::ReadJson(baseline_path));
  const eval::EvalReport impactx = eval::Evaluate(*predictor, d.eval);
  const json provenance = Provenance(run);

  json impactx_json = impactx.ToJson();
  impactx_json["provenance"] = provenance;
  WriteJson(run, run.reports_dir() / "impactx.json", impactx_json);
  WriteText(run, run.reports_dir() / "confusion_impactx.csv", impactx.confusion.ToCsv());
  const eval::FlipAnalysis flips = eval::AnalyzeFlips(baseline, impactx);
  WriteJson(run, run.reports_dir() / "flips.json", flips.ToJson());

  // Reconstructed explanations against direct true-class explanations on a
  // seeded sample of the held-out set.
  const data::LabeledDataset revealed = eval::LabelAccess::RevealAsLabeled(d.eval);
  const auto sim_idx = SampleIndices(revealed.size(), c.eval.similarity_samples,
                                     MixSeed(c.seed, "eval.similarity"));
  const data::LabeledDataset sim_set = revealed.Subset(sim_idx, data::SplitTag::kVal);
  json similarity = json::object();
  std::string sim_keys_digest;
  if (sim_set.size() > 0) {
    const auto direct = ExplainCached(run, *model, sim_set, d.train,
                                      xai::TargetPolicy::kTrueClass, /*cache_only=*/false);
    sim_keys_digest = KeysDigest(direct.cache_keys);
    std::vector<std::vector<float>> recon, reference;
    for (std::size_t i = 0; i < sim_set.size(); ++i) {
      recon.push_back(predictor->ReconstructExplanation(sim_set.sample(i)));
      reference.push_back(direct.maps[i].values);
    }
    similarity = eval::CompareExplanations(recon, reference, MixSeed(c.seed, "eval.permute"),
                                           static_cast<std::size_t>(c.eval.topk))
                     .ToJson();
  }

  // Corrected samples: reconstruction vs. true-class and vs. M's
  // predicted-class explanation.
  std::vector<std::size_t> corrected_idx;
  for (std::int64_t id : flips.corrected) corrected_idx.push_back(*revealed.IndexOf(id));
  json corrected_similarity = {{"count", corrected_idx.size()}};
  const auto grouping = MakeGrouping(c, revealed.shape());
  if (!corrected_idx.empty()) {
    const data::LabeledDataset corrected = revealed.Subset(corrected_idx, data::SplitTag::kVal);
    const auto true_expl = ExplainCached(run, *model, corrected, d.train,
                                         xai::TargetPolicy::kTrueClass, false);
    const auto pred_expl = ExplainCached(run, *model, corrected, d.train,
                                         xai::TargetPolicy::kPredictedClass, false);
    double to_true = 0.0, to_pred = 0.0;
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < corrected.size(); ++i) {
      const auto r = predictor->ReconstructExplanation(corrected.sample(i));
      to_true += eval::CosineSimilarity(r, true_expl.maps[i].values).value;
      to_pred += eval::CosineSimilarity(r, pred_expl.maps[i].values).value;
      const auto p = predictor->Predict(corrected.sample(i));
      ranked.push_back({-static_cast<double>(p.probabilities[corrected.label(i)]), i});
    }
    const double n = static_cast<double>(corrected.size());
    corrected_similarity["mean_cosine_true_class"] = to_true / n;
    corrected_similarity["mean_cosine_predicted_class"] = to_pred / n;

    // Saliency galleries for the most confidently corrected samples.
    std::sort(ranked.begin(), ranked.end());
    const fs::path dir = run.reports_dir() / "saliency";
    fs::create_directories(dir);
    const auto& shape = corrected.shape();
    const std::size_t plane = shape.height * shape.width;
    auto plane_of = [&](const std::vector<float>& v) {
      return std::vector<float>(v.begin(), v.begin() + plane);
    };
    for (std::size_t r = 0; r < std::min<std::size_t>(ranked.size(), c.eval.saliency_count);
         ++r) {
      const std::size_t i = ranked[r].second;
      const std::string stem = "sample_" + std::to_string(corrected.sample(i).id);
      const auto write = [&](const std::string& suffix, const std::vector<float>& values) {
        const fs::path p = dir / (stem + "_" + suffix + ".pgm");
        eval::WritePgm(p, plane_of(values), shape.height, shape.width);
        run.Record(p);
      };
      write("input", corrected.sample(i).features);
      write("reconstructed",
            grouping.Expand(predictor->ReconstructExplanation(corrected.sample(i))));
      write("true_class", grouping.Expand(true_expl.maps[i].values));
      write("predicted_class", grouping.Expand(pred_expl.maps[i].values));
    }
  }

  json comparison = eval::ComparisonJson(baseline, impactx);
  comparison["strategy"] = predictor->strategy();
  comparison["explanation_similarity"] = similarity;
  comparison["corrected_similarity"] = corrected_similarity;
  comparison["provenance"] = provenance;
  comparison["provenance"]["cache_keys"]["eval_similarity"] = sim_keys_digest;
  comparison["model_hash_unchanged"] = model->RecomputeHash() == provenance["model_hash"];
  CheckModelUnchanged(run, *model);
  WriteJson(run, comparison_path, comparison);
  log << std::fixed << std::setprecision(4) << "baseline accuracy " << baseline.accuracy
      << ", impactx accuracy " << impactx.accuracy << " (" << std::showpos
      << 100.0 * (impactx.accuracy - baseline.accuracy) << std::noshowpos << " pp)\n";
  return kExitOk;
}

int Explain(const fs::path& root, const std::string& split, std::ostream& log) {
  if (split != "train" && split != "val") {
    throw ConfigError("split", "must be 'train' or 'val', got '" + split + "'");
  }
  RunDirectory run = RunDirectory::Open(root);
  const auto model = LoadFrozenModel(run);
  RunData d = LoadRunData(run);
  const data::LabeledDataset target = split == "train" ? TrainingSubset(run, d.train) : d.val;
  const auto set = ExplainCached(run, *model, target, d.train, run.config().xai.target_policy,
                                 /*cache_only=*/false);
  CheckModelUnchanged(run, *model);
  const auto& s = set.stats;
  const double rate = s.samples == 0 ? 100.0 : 100.0 * s.cache_hits / s.samples;
  log << "explained " << s.samples << " " << split << " samples; cache hits " << s.cache_hits
      << "/" << s.samples << " (" << std::fixed << std::setprecision(1) << rate << "%)\n";
  for (const auto& w : s.warnings) log << "warning: " << w << "\n";
  return kExitOk;
}

std::string CsvField(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string FormatNumber(double v) {
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

int Ablate(const fs::path& config_path, const fs::path& grid_path, const fs::path& out,
           std::ostream& log) {
  const json base = io::ReadJson(config_path);
  const ExperimentConfig base_config = ExperimentConfig::FromJson(base);
  const json grid = io::ReadJson(grid_path);
  if (!grid.is_object() || grid.empty()) throw ConfigError("grid", "grid is empty");
  const std::set<std::string> allowed = {"method", "strategy", "latent_dim", "train_fraction",
                                         "seeds"};
  for (const auto& [key, value] : grid.items()) {
    if (!allowed.count(key)) throw ConfigError("grid." + key, "unknown grid axis");
    if (!value.is_array() || value.empty()) {
      throw ConfigError("grid." + key, "must be a non-empty list");
    }
  }
  auto axis = [&](const char* key, json fallback) {
    return grid.contains(key) ? grid.at(key) : json::array({fallback});
  };
  const json methods = axis("method", xai::MethodName(base_config.xai.method));
  const json strategies = axis("strategy", "ed");
  const json latents = axis("latent_dim", base_config.strategy.latent_dim);
  const json fractions = axis("train_fraction", base_config.impactx_train_fraction);
  const json seeds = axis("seeds", base_config.seed);

  if (fs::exists(out) && !(fs::is_directory(out) && fs::is_empty(out))) {
    throw ConfigError("out", out.string() + " exists and is not empty; refusing to overwrite");
  }
  fs::create_directories(out / "runs");
  // Runs of one grid share explanations unless the caller relocated the cache.
  const char* env = std::getenv(kCacheDirEnv);
  if (env == nullptr || *env == '\0') setenv(kCacheDirEnv, (out / "cache").c_str(), 1);

  std::ostringstream csv;
  csv << "method,strategy,latent_dim,train_fraction,seeds,baseline_accuracy,impactx_accuracy,"
         "improvement,status,error\n";
  json rows = json::array();
  std::ostringstream sink;
  for (const auto& method : methods) {
    for (const auto& strat : strategies) {
      for (const auto& latent : latents) {
        for (const auto& fraction : fractions) {
          double base_sum = 0.0, impactx_sum = 0.0;
          std::string error;
          for (const auto& seed : seeds) {
            json cfg = base;
            cfg["seed"] = seed;
            cfg["xai"]["method"] = method;
            cfg["strategy"]["latent_dim"] = latent;
            cfg["impactx_train_fraction"] = fraction;
            std::ostringstream tag;
            tag << method.get<std::string>() << "_" << strat.get<std::string>() << "_l"
                << latent.dump() << "_f" << fraction.dump() << "_s" << seed.dump();
            const fs::path dir = out / "runs" / tag.str();
            log << "ablation run " << tag.str() << "\n";
            int code = CmdPretrainJson(cfg, dir, sink);
            if (code == kExitOk) code = CmdExplain(dir, "train", sink);
            if (code == kExitOk) code = CmdExplain(dir, "val", sink);
            if (code == kExitOk) code = CmdTrainImpactx(dir, strat.get<std::string>(), sink);
            if (code == kExitOk) code = CmdEvaluate(dir, sink);
            if (code != kExitOk) {
              error = "run " + tag.str() + " exited with code " + std::to_string(code);
              break;
            }
            const json cmp = io::ReadJson(dir / "reports" / "comparison.json");
            base_sum += cmp.at("baseline_accuracy").get<double>();
            impactx_sum += cmp.at("impactx_accuracy").get<double>();
          }
          const double n = static_cast<double>(seeds.size());
          json row = {{"method", method},   {"strategy", strat},
                      {"latent_dim", latent}, {"train_fraction", fraction},
                      {"seeds", seeds.size()}};
          csv << method.get<std::string>() << "," << strat.get<std::string>() << ","
              << latent.dump() << "," << fraction.dump() << "," << seeds.size() << ",";
          if (error.empty()) {
            row["baseline_accuracy"] = base_sum / n;
            row["impactx_accuracy"] = impactx_sum / n;
            row["improvement"] = (impactx_sum - base_sum) / n;
            row["status"] = "ok";
            csv << FormatNumber(base_sum / n) << "," << FormatNumber(impactx_sum / n) << ","
                << FormatNumber((impactx_sum - base_sum) / n) << ",ok,\n";
          } else {
            row["status"] = "error";
            row["error"] = error;
            csv << ",,,error," << CsvField(error) << "\n";
            log << "  " << error << "\n";
          }
          rows.push_back(row);
        }
      }
    }
  }
  io::WriteFileAtomic(out / "ablation.csv", csv.str());
  io::WriteJsonAtomic(out / "ablation.json", rows);
  io::WriteFileAtomic(out / "ablation.log", sink.str());
  log << "wrote " << rows.size() << " rows to " << (out / "ablation.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int CmdPretrain(const fs::path& config_path, const fs::path& out, std::ostream& log) {
  return Guard(log, [&] {
    const json j = [&] {
      try {
        return io::ReadJson(config_path);
      } catch (const std::exception& e) {
        throw ConfigError("config", e.what());
      }
    }();
    return Pretrain(ExperimentConfig::FromJson(j), out, log);
  });
}

int CmdPretrainJson(const json& config, const fs::path& out, std::ostream& log) {
  return Guard(log, [&] { return Pretrain(ExperimentConfig::FromJson(config), out, log); });
}

int CmdExplain(const fs::path& run, const std::string& split, std::ostream& log) {
  return Guard(log, [&] { return Explain(run, split, log); });
}

int CmdTrainImpactx(const fs::path& run, const std::string& strategy, std::ostream& log) {
  return Guard(log, [&] { return TrainImpactx(run, strategy, log); });
}

int CmdEvaluate(const fs::path& run, std::ostream& log) {
  return Guard(log, [&] { return Evaluate(run, log); });
}

int CmdAblate(const fs::path& config_path, const fs::path& grid_path, const fs::path& out,
              std::ostream& log) {
  return Guard(log, [&] { return Ablate(config_path, grid_path, out, log); });
}

}  // namespace impactx::pipeline

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

// Command-line front end: pretrain, explain, train-impactx, evaluate, ablate.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "impactx/pipeline/commands.h"

int main(int argc, char** argv) {
  namespace pipeline = impactx::pipeline;
  CLI::App app{"Improve a frozen classifier with distilled attribution codes."};
  app.require_subcommand(1);

  std::string config, out, run, split, strategy, grid;

  CLI::App* pretrain = app.add_subcommand("pretrain", "Materialize data and train the frozen M");
  pretrain->add_option("--config", config, "Experiment config (JSON)")->required();
  pretrain->add_option("--out", out, "New run directory")->required();

  CLI::App* explain = app.add_subcommand("explain", "Populate the explanation cache");
  explain->add_option("--run", run, "Run directory")->required();
  explain->add_option("--split", split, "train or val")
      ->required()
      ->check(CLI::IsMember({"train", "val"}));

  CLI::App* train = app.add_subcommand("train-impactx", "Train a strategy from cached explanations");
  train->add_option("--run", run, "Run directory")->required();
  train->add_option("--strategy", strategy, "ae or ed")
      ->required()
      ->check(CLI::IsMember({"ae", "ed"}));

  CLI::App* evaluate = app.add_subcommand("evaluate", "Compare the predictor with the baseline");
  evaluate->add_option("--run", run, "Run directory")->required();

  CLI::App* ablate = app.add_subcommand("ablate", "Run an ablation grid");
  ablate->add_option("--config", config, "Base experiment config (JSON)")->required();
  ablate->add_option("--grid", grid, "Grid of values per axis (JSON)")->required();
  ablate->add_option("--out", out, "New output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pipeline::kExitConfig;
  }

  if (pretrain->parsed()) return pipeline::CmdPretrain(config, out, std::cerr);
  if (explain->parsed()) return pipeline::CmdExplain(run, split, std::cerr);
  if (train->parsed()) return pipeline::CmdTrainImpactx(run, strategy, std::cerr);
  if (evaluate->parsed()) return pipeline::CmdEvaluate(run, std::cerr);
  return pipeline::CmdAblate(config, grid, out, std::cerr);
}

// tools/vreen_main.cpp

// Copyright 2026  The vreen authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command line driver.  One subcommand per pipeline stage; all knobs live in
// the flat key=value config, with --seed and --out as overrides and
// VREEN_DATASET_ROOT taking precedence over the configured dataset root.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vreen/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vreen: time-synchronous voice reenactment"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  auto* opt_config =
      app.add_option("--config", config_path, "flat key=value config file")
          ->check(CLI::ExistingFile);
  auto* opt_seed = app.add_option("--seed", seed, "override the config seed");
  auto* opt_out =
      app.add_option("--out", out_dir, "override the output directory");

  app.add_subcommand("synth-data",
                     "write a synthetic corpus under dataset_root");
  app.add_subcommand(
      "prepare", "extract features, fit statistics and write the manifest");
  app.add_subcommand("train-f0", "pre-train the F0 encoder, then freeze it");
  app.add_subcommand("pretrain",
                     "multi-speaker dual-mode training from the F0 checkpoint");
  app.add_subcommand("finetune",
                     "fine-tune a src_speaker/tgt_speaker pair");
  app.add_subcommand("convert",
                     "convert one utterance following a request file");
  app.add_subcommand("evaluate",
                     "convert the validation split both ways, write a report");

  CLI11_PARSE(app, argc, argv);

  try {
    vreen::config::RunConfig cfg;
    if (opt_config->count() > 0) cfg = vreen::config::load_config(config_path);
    vreen::config::apply_env(cfg);
    if (opt_seed->count() > 0) cfg.seed = seed;
    if (opt_out->count() > 0) cfg.out_dir = out_dir;
    const std::string stage = app.get_subcommands().front()->get_name();
    vreen::pipeline::run_stage(cfg, stage);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}

/* Copyright 2026 The freqattn Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "freqattn/harness/commands.hpp"

namespace fh = freqattn::harness;

int main(int argc, char** argv) {
  CLI::App app{"Frequency-attention frontend toolkit"};
  app.require_subcommand(1);
  fh::CommandOptions opt;

  using Runner = std::function<int(const fh::CommandOptions&)>;
  std::map<CLI::App*, Runner> runners;
  auto add = [&](const std::string& name, const std::string& help, Runner run) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "master seed")->capture_default_str();
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    runners[sub] = std::move(run);
    return sub;
  };

  auto* features = add("features", "compute features from a WAV file", fh::cmd_features);
  features->add_option("--wav", opt.wav, "input WAV (default: one synthetic utterance)")
      ->check(CLI::ExistingFile);
  features->add_option("--kind", opt.kind, "lfbe or stft")
      ->check(CLI::IsMember({"lfbe", "stft"}))
      ->capture_default_str();
  features->add_option("--lfr", opt.lfr, "stack this many frames")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  add("audit", "parameter counts, shapes and structural invariants", fh::cmd_audit);
  add("equiv", "receptive-field and frame-rate equivalence checks", fh::cmd_equiv);
  add("gradcheck", "finite-difference gradient check", fh::cmd_gradcheck);
  add("train", "train the toy models on the synthetic task", fh::cmd_train);

  auto* sweep = add("sweep-snr", "accuracy under babble noise at several SNRs",
                    fh::cmd_sweep_snr);
  sweep->add_option("--checkpoint", opt.checkpoint, "directory with <model>.ckpt files")
      ->check(CLI::ExistingDirectory);

  auto* attribute = add("attribute", "token contributions in one attention layer",
                        fh::cmd_attribute);
  attribute->add_option("--checkpoint", opt.checkpoint, "fattention checkpoint")
      ->check(CLI::ExistingFile);
  attribute->add_option("--wav", opt.wav, "input WAV (default: one synthetic utterance)")
      ->check(CLI::ExistingFile);
  attribute->add_option("--time", opt.time, "time column t or range a:b")
      ->capture_default_str();
  attribute->add_option("--example", opt.example, "built-in example (mask-fill)")
      ->check(CLI::IsMember({"mask-fill"}));

  CLI11_PARSE(app, argc, argv);

  for (auto& [sub, run] : runners) {
    if (!sub->parsed()) continue;
    try {
      return run(opt);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 2;
}

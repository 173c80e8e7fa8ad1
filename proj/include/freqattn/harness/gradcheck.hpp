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

#pragma once

// End-to-end gradient checks of frontend + toy head.

#include <random>
#include <string>
#include <vector>

#include "freqattn/grad_check.hpp"
#include "freqattn/harness/toy.hpp"

namespace freqattn::harness {

struct GradCheckCase {
  std::string name;
  std::size_t layers = 1;
  std::size_t views = 1;
  GradCheckResult result;
  double seconds = 0.0;
};

// Small frontend with 7x7 (and 14x14) views at stride 4, E=16, H=2.
inline frontend::FrontendConfig gradcheck_config(std::size_t layers, std::size_t views,
                                                 std::size_t bins = 32) {
  frontend::FrontendConfig cfg;
  cfg.views.clear();
  const std::size_t patches[] = {7, 14};
  for (std::size_t v = 0; v < views; ++v) cfg.views.push_back({patches[v % 2], patches[v % 2], 4, 4, 16});
  cfg.num_layers = layers;
  cfg.num_heads = 2;
  cfg.lfr_placement = frontend::LfrPlacement::kPost;
  cfg.lfr_factor = 3;
  cfg.output_dim = 8;
  cfg.input_bins = bins;
  return cfg;
}

// Cross-entropy of the toy head on one random T x F input. Every parameter
// is jittered so biases and norm affines are away from their init values.
// Key biases have an exactly zero gradient (softmax ignores a per-query
// shift), and their central differences are pure round-off of about 1e-10
// at eps = 1e-5; the 1e-5 floor keeps that noise from counting as error.
inline constexpr double kToyGradFloor = 1e-5;

inline GradCheckResult gradcheck_toy(const frontend::FrontendConfig& cfg, std::size_t frames,
                                     std::uint64_t seed, double eps = 1e-5) {
  auto m = make_attention_model(cfg, 3, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (const auto& e : m.params.entries()) {
    const Tensor jitter = random_normal(e.node->value.shape(), rng, 0.1);
    for (std::size_t i = 0; i < jitter.size(); ++i) e.node->value[i] += jitter[i];
  }
  const features::Spectrogram s{random_normal({frames, cfg.input_bins}, rng, 1.0), 10.0,
                                features::FeatureKind::kLfbe};
  const std::size_t label = 1;
  const Objective f = [&m, &s, label](ParamStore&, bool with_grad) {
    Tape tape;
    Tape* t = with_grad ? &tape : nullptr;
    auto loss = cross_entropy(t, m.logits(t, s), label);
    if (with_grad) tape.backward(loss);
    return loss->value[0];
  };
  return grad_check(f, m.params, eps, kToyGradFloor);
}

}  // namespace freqattn::harness

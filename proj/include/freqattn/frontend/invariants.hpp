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

// Randomized structural checks on the F-Attention frontend: time locality
// and frequency globality.

#include <cmath>
#include <random>
#include <string>

#include "freqattn/frontend/frontend.hpp"

namespace freqattn::frontend {

struct InvariantResult {
  bool passed = true;
  std::string detail;
};

namespace detail {

inline features::Spectrogram random_spectrogram(std::size_t t, std::size_t f,
                                                std::mt19937_64& rng) {
  return {random_normal({t, f}, rng, 1.0), 10.0, features::FeatureKind::kLfbe};
}

// Merged token grid (before flattening / POST stacking) for all views.
inline TokenGrid merged_tokens(const features::Spectrogram& s, const FrontendConfig& cfg,
                               const ParamStore& params) {
  std::vector<TokenGrid> grids;
  for (std::size_t v = 0; v < cfg.views.size(); ++v) {
    grids.push_back(view_forward(nullptr, s, effective_view(cfg.views[v], cfg),
                                 params.get(view_prefix(v) + "embed/weight"),
                                 params.get(view_prefix(v) + "embed/bias"),
                                 view_layers(params, cfg, v)));
  }
  return merge_views(nullptr, grids, cfg.merge_mode);
}

}  // namespace detail

// Perturbs frames covered by exactly one time column and requires every
// other column of the merged token grid to stay bit-identical.
inline InvariantResult check_time_locality(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FrontendConfig cfg;
  cfg.views = {ViewConfig{7, 7, 4, 4, 8}, ViewConfig{5, 5, 4, 4, 8}};
  cfg.num_layers = 2;
  cfg.num_heads = 2;
  cfg.lfr_placement = LfrPlacement::kPost;
  cfg.input_bins = 20;
  cfg.output_dim = 6;
  ParamStore params;
  register_frontend(params, cfg, rng);

  const std::size_t t_frames = 28;
  auto s = detail::random_spectrogram(t_frames, cfg.input_bins, rng);
  const auto base = detail::merged_tokens(s, cfg, params);
  const std::size_t cols = base.time_cols;
  const std::size_t target = std::uniform_int_distribution<std::size_t>(1, cols - 2)(rng);
  // Frame 4t+3 lies in column t's 7-frame span but not in its neighbours'.
  const std::size_t frame = target * 4 + 3;
  for (std::size_t f = 0; f < cfg.input_bins; ++f) s.values.at(frame, f) += 1.0 + f;
  const auto moved = detail::merged_tokens(s, cfg, params);

  InvariantResult r;
  bool target_changed = false;
  for (std::size_t t = 0; t < cols; ++t) {
    for (std::size_t f = 0; f < base.freq_tokens; ++f) {
      for (std::size_t e = 0; e < base.embed_dim; ++e) {
        const bool same = base.at(t, f, e) == moved.at(t, f, e);
        if (t == target) {
          target_changed |= !same;
        } else if (!same) {
          r.passed = false;
          r.detail = "column " + std::to_string(t) + " changed after editing frame " +
                     std::to_string(frame);
          return r;
        }
      }
    }
  }
  if (!target_changed) {
    r.passed = false;
    r.detail = "edited column did not change";
  }
  return r;
}

// With uniform attention (zero query/key projections) every token in a
// column mixes the values of all frequency tokens, so perturbing a single
// frequency patch must change every output token of that column.
inline InvariantResult check_frequency_globality(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FrontendConfig cfg;
  cfg.views = {ViewConfig{4, 4, 4, 4, 8}};
  cfg.num_layers = 1;
  cfg.num_heads = 2;
  cfg.input_bins = 24;
  cfg.output_dim = 6;
  ParamStore params;
  register_frontend(params, cfg, rng);
  params.get(layer_prefix(0, 0) + "q_proj/weight")->value.fill(0.0);
  params.get(layer_prefix(0, 0) + "k_proj/weight")->value.fill(0.0);

  auto s = detail::random_spectrogram(12, cfg.input_bins, rng);
  const auto base = detail::merged_tokens(s, cfg, params);
  const std::size_t col = std::uniform_int_distribution<std::size_t>(0, base.time_cols - 1)(rng);
  const std::size_t tok = std::uniform_int_distribution<std::size_t>(0, base.freq_tokens - 1)(rng);
  // Non-overlapping 4x4 patches: patch (col, tok) covers exactly these cells.
  for (std::size_t dt = 0; dt < 4; ++dt)
    for (std::size_t df = 0; df < 4; ++df) s.values.at(col * 4 + dt, tok * 4 + df) += 2.0;
  const auto moved = detail::merged_tokens(s, cfg, params);

  InvariantResult r;
  for (std::size_t f = 0; f < base.freq_tokens; ++f) {
    double diff = 0.0;
    for (std::size_t e = 0; e < base.embed_dim; ++e) {
      diff = std::max(diff, std::abs(base.at(col, f, e) - moved.at(col, f, e)));
    }
    if (!(diff > 1e-9)) {
      r.passed = false;
      r.detail = "token " + std::to_string(f) + " in column " + std::to_string(col) +
                 " unaffected by perturbing token " + std::to_string(tok);
      return r;
    }
  }
  return r;
}

}  // namespace freqattn::frontend

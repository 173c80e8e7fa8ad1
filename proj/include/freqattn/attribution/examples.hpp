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

// Constructed inputs for the contribution analysis.

#include <random>
#include <vector>

#include "freqattn/features/spectrogram.hpp"
#include "freqattn/frontend/attention.hpp"
#include "freqattn/frontend/frontend.hpp"
#include "freqattn/param_store.hpp"

namespace freqattn::attribution {

struct MaskFillExample {
  ParamStore store;
  frontend::AttnLayerParams layer;
  Tensor tokens;                     // N x E, one time column
  std::vector<std::size_t> masked;   // tokens fully covered by the mask
  std::size_t loud = 0;              // high-energy token
};

// One time column of ten non-overlapping 4x4 patches from a normalized
// random spectrogram. Bins 8..19 (tokens 2-4) are overwritten with the
// utterance mean, as a frequency mask would; bins 32..35 (token 8) are
// amplified by `loud_gain`. Patch embedding has zero bias, so masked tokens embed to the
// (near-)zero vector.
inline MaskFillExample mask_fill_example(std::uint64_t seed, std::size_t embed_dim = 8,
                                         std::size_t heads = 2,
                                         double loud_gain = 8.0) {
  std::mt19937_64 rng(seed);
  constexpr std::size_t kPatch = 4, kTokens = 10;
  features::Spectrogram s{random_normal({kPatch, kPatch * kTokens}, rng, 1.0), 10.0,
                          features::FeatureKind::kLfbe};
  s = features::normalize_utterance(s);
  double mean = 0.0;
  for (double v : s.values.data()) mean += v;
  mean /= static_cast<double>(s.values.size());

  MaskFillExample ex;
  ex.masked = {2, 3, 4};
  ex.loud = 8;
  for (std::size_t t = 0; t < kPatch; ++t) {
    for (std::size_t f = 8; f < 20; ++f) s.values.at(t, f) = mean;
    for (std::size_t f = 32; f < 36; ++f) s.values.at(t, f) *= loud_gain;
  }
  const frontend::ViewConfig view{kPatch, kPatch, kPatch, kPatch, embed_dim};
  auto w = ex.store.add("embed/weight", xavier_uniform(view.patch_len(), embed_dim, rng));
  auto b = ex.store.add("embed/bias", Tensor({embed_dim}));
  ex.layer = frontend::AttnLayerParams::register_in(ex.store, "layer0/", embed_dim, heads, rng);
  ex.tokens =
      frontend::embed_patches(nullptr, frontend::pad_and_extract_patches(s, view), w, b)
          .tokens->value;
  return ex;
}

}  // namespace freqattn::attribution

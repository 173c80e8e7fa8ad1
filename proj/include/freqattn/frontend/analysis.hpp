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

#include <stdexcept>
#include <utility>
#include <vector>

#include "freqattn/frontend/attention.hpp"
#include "freqattn/frontend/cnn.hpp"
#include "freqattn/frontend/config.hpp"
#include "freqattn/frontend/frontend.hpp"

namespace freqattn::frontend {

struct KernelStride {
  std::size_t kernel;
  std::size_t stride;
};

struct ReceptiveField {
  std::size_t size;
  std::size_t stride;

  friend bool operator==(const ReceptiveField&, const ReceptiveField&) = default;
};

// Receptive field of a stack of strided windows along one axis:
//   size += (kernel - 1) * jump;  jump *= stride.
inline ReceptiveField receptive_field(const std::vector<KernelStride>& layers) {
  if (layers.empty()) throw std::invalid_argument("receptive_field: no layers");
  std::size_t size = 1, jump = 1;
  for (const auto& l : layers) {
    size += (l.kernel - 1) * jump;
    jump *= l.stride;
  }
  return {size, jump};
}

inline std::size_t count_linear(std::size_t in, std::size_t out, bool bias = true) {
  return in * out + (bias ? out : 0);
}

inline std::size_t count_conv(std::size_t kernel, std::size_t cin, std::size_t cout) {
  return kernel * kernel * cin * cout + cout;
}

// Closed-form parameter count: patch embeddings, attention layers and the
// final projection.
inline std::size_t count_params(const FrontendConfig& cfg) {
  cfg.validate();
  const std::size_t e = cfg.embed_dim();
  std::size_t n = 0;
  for (const auto& v : cfg.views) {
    n += count_linear(effective_view(v, cfg).patch_len(), e);
    n += cfg.num_layers * AttnLayerParams::count(e);
  }
  return n + count_linear(projection_input_dim(cfg), cfg.output_dim);
}

inline std::size_t count_params(const BaselineConfig& cfg) {
  cfg.validate();
  std::size_t n = 0, cin = 1;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    n += count_conv(cfg.kernel, cin, cfg.channels);
    cin = cfg.channels;
  }
  return n + count_linear(baseline_out_bins(cfg) * cfg.channels, cfg.output_dim);
}

// Number of distinct attention-layer parameter groups registered by `cfg`.
inline std::size_t attention_groups(const FrontendConfig& cfg) {
  return cfg.views.size() * cfg.num_layers;
}

}  // namespace freqattn::frontend

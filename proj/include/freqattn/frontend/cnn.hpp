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

#include <random>
#include <stdexcept>
#include <string>

#include "freqattn/features/spectrogram.hpp"
#include "freqattn/frontend/config.hpp"
#include "freqattn/frontend/frontend.hpp"
#include "freqattn/ops.hpp"
#include "freqattn/param_store.hpp"

namespace freqattn::frontend {

inline std::size_t conv_out_extent(std::size_t n, std::size_t kernel, std::size_t stride,
                                   std::size_t pad) {
  if (n + 2 * pad < kernel) {
    throw std::invalid_argument("input extent " + std::to_string(n) +
                                " too small for kernel " + std::to_string(kernel));
  }
  return (n + 2 * pad - kernel) / stride + 1;
}

inline std::string conv_prefix(std::size_t layer) {
  return "conv" + std::to_string(layer) + "/";
}

// Frequency extent after all baseline convolutions.
inline std::size_t baseline_out_bins(const BaselineConfig& cfg) {
  std::size_t f = cfg.input_bins * cfg.lfr_factor;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    f = conv_out_extent(f, cfg.kernel, cfg.stride, cfg.pad);
  }
  return f;
}

// Kernels are stored im2col-style: (kernel*kernel*C_in) x C_out.
inline void register_baseline(ParamStore& store, const BaselineConfig& cfg,
                              std::mt19937_64& rng) {
  cfg.validate();
  std::size_t cin = 1;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    const std::size_t fan_in = cfg.kernel * cfg.kernel * cin;
    store.add(conv_prefix(l) + "weight", xavier_uniform(fan_in, cfg.channels, rng));
    store.add(conv_prefix(l) + "bias", Tensor({cfg.channels}));
    cin = cfg.channels;
  }
  store.add("proj/weight",
            xavier_uniform(baseline_out_bins(cfg) * cfg.channels, cfg.output_dim, rng));
  store.add("proj/bias", Tensor({cfg.output_dim}));
}

// Pre-LFR stacking, then `num_layers` strided 2-D convolutions (channels
// 1 -> C -> C) each followed by max(0, .), frequency x channels flattened per
// time step, and a linear projection to D.
inline EncoderSequence cnn_frontend_forward(Tape* tape, const features::Spectrogram& input,
                                            const BaselineConfig& cfg,
                                            const ParamStore& params) {
  cfg.validate();
  if (input.bins() != cfg.input_bins) {
    throw std::invalid_argument("spectrogram has " + std::to_string(input.bins()) +
                                " bins, baseline expects " +
                                std::to_string(cfg.input_bins));
  }
  const auto s = features::lfr_stack(input, cfg.lfr_factor);
  std::size_t h = s.frames(), w = s.bins(), c = 1;
  Var x = constant(s.values.reshaped({h * w, 1}));
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    WindowGeometry g;
    g.height = h;
    g.width = w;
    g.channels = c;
    g.kernel_h = g.kernel_w = cfg.kernel;
    g.stride_h = g.stride_w = cfg.stride;
    g.pad_h = g.pad_w = cfg.pad;
    g.out_h = conv_out_extent(h, cfg.kernel, cfg.stride, cfg.pad);
    g.out_w = conv_out_extent(w, cfg.kernel, cfg.stride, cfg.pad);
    auto cols = extract_windows(tape, x, g);
    x = relu(tape, linear(tape, cols, params.get(conv_prefix(l) + "weight"),
                          params.get(conv_prefix(l) + "bias")));
    h = g.out_h;
    w = g.out_w;
    c = cfg.channels;
  }
  auto flat = reshape(tape, x, {h, w * c});
  double period = s.frame_period_ms;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) period *= static_cast<double>(cfg.stride);
  return {linear(tape, flat, params.get("proj/weight"), params.get("proj/bias")), period};
}

}  // namespace freqattn::frontend

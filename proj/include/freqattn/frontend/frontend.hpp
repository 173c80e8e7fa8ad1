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

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqattn/features/spectrogram.hpp"
#include "freqattn/frontend/attention.hpp"
#include "freqattn/frontend/config.hpp"
#include "freqattn/frontend/patches.hpp"
#include "freqattn/ops.hpp"
#include "freqattn/param_store.hpp"

namespace freqattn::frontend {

struct EncoderSequence {
  Var values;  // T_out x D
  double frame_period_ms = 0.0;

  std::size_t frames() const { return values->value.rows(); }
  std::size_t dim() const { return values->value.cols(); }
};

inline std::string view_prefix(std::size_t view) {
  return "view" + std::to_string(view) + "/";
}
inline std::string layer_prefix(std::size_t view, std::size_t layer) {
  return view_prefix(view) + "layer" + std::to_string(layer) + "/";
}

// A shared linear map from each flattened patch to an E-dim token.
inline TokenGrid embed_patches(Tape* tape, const PatchGrid& grid, const Var& weight,
                               const Var& bias) {
  if (weight->value.rank() != 2 || weight->value.rows() != grid.patches.cols()) {
    throw std::invalid_argument("patch embedding weight " +
                                shape_str(weight->value.shape()) +
                                " does not match patch length " +
                                std::to_string(grid.patches.cols()));
  }
  TokenGrid tg;
  tg.tokens = linear(tape, constant(grid.patches), weight, bias);
  tg.time_cols = grid.time_cols;
  tg.freq_tokens = grid.freq_tokens;
  tg.embed_dim = weight->value.cols();
  tg.time_map = grid.time_map;
  return tg;
}

// View actually applied to the network input: In-LFR scales the time axis of
// patch and stride by the LFR factor.
inline ViewConfig effective_view(const ViewConfig& v, const FrontendConfig& cfg) {
  ViewConfig e = v;
  if (cfg.lfr_placement == LfrPlacement::kIn) {
    e.patch_time *= cfg.lfr_factor;
    e.stride_time *= cfg.lfr_factor;
  }
  return e;
}

// Frequency bins seen by the views (Pre-LFR stacks frames along frequency).
inline std::size_t effective_input_bins(const FrontendConfig& cfg) {
  return cfg.lfr_placement == LfrPlacement::kPre ? cfg.input_bins * cfg.lfr_factor
                                                 : cfg.input_bins;
}

inline std::size_t merged_freq_tokens(const FrontendConfig& cfg) {
  std::size_t n = 0;
  for (const auto& v : cfg.views) {
    n = std::max(n, grid_extent(effective_input_bins(cfg), v.stride_freq));
  }
  return n;
}

inline std::size_t projection_input_dim(const FrontendConfig& cfg) {
  const std::size_t post = cfg.lfr_placement == LfrPlacement::kPost ? cfg.lfr_factor : 1;
  return merged_freq_tokens(cfg) * cfg.embed_dim() * post;
}

// Registers every frontend parameter under view/layer scoped names:
// view{v}/embed/{weight,bias}, view{v}/layer{l}/..., proj/{weight,bias}.
inline void register_frontend(ParamStore& store, const FrontendConfig& cfg,
                              std::mt19937_64& rng) {
  cfg.validate();
  const std::size_t e = cfg.embed_dim();
  for (std::size_t v = 0; v < cfg.views.size(); ++v) {
    const auto view = effective_view(cfg.views[v], cfg);
    store.add(view_prefix(v) + "embed/weight", xavier_uniform(view.patch_len(), e, rng));
    store.add(view_prefix(v) + "embed/bias", Tensor({e}));
    for (std::size_t l = 0; l < cfg.num_layers; ++l) {
      AttnLayerParams::register_in(store, layer_prefix(v, l), e, cfg.num_heads, rng);
    }
  }
  const std::size_t in = projection_input_dim(cfg);
  store.add("proj/weight", xavier_uniform(in, cfg.output_dim, rng));
  store.add("proj/bias", Tensor({cfg.output_dim}));
}

inline std::vector<AttnLayerParams> view_layers(const ParamStore& store,
                                                const FrontendConfig& cfg,
                                                std::size_t view) {
  std::vector<AttnLayerParams> layers;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    layers.push_back(AttnLayerParams::from_store(store, layer_prefix(view, l),
                                                 cfg.num_heads));
  }
  return layers;
}

// extract -> embed -> F-Attention layers in sequence.
inline TokenGrid view_forward(Tape* tape, const features::Spectrogram& s,
                              const ViewConfig& v, const Var& embed_weight,
                              const Var& embed_bias,
                              const std::vector<AttnLayerParams>& layers) {
  TokenGrid tg = embed_patches(tape, pad_and_extract_patches(s, v), embed_weight,
                               embed_bias);
  for (const auto& layer : layers) tg = f_attention_layer(tape, tg, layer);
  return tg;
}

// Elementwise pooling across views after zero-padding every grid along the
// frequency-token axis to the largest N_f. Output size does not depend on the
// number of views. MAX routes the gradient to the first maximal view.
inline TokenGrid merge_views(Tape* tape, const std::vector<TokenGrid>& grids,
                             MergeMode mode) {
  if (grids.empty()) throw std::invalid_argument("merge_views: no views");
  if (grids.size() == 1) return grids.front();
  const std::size_t t = grids.front().time_cols, e = grids.front().embed_dim;
  std::size_t nf = 0;
  for (const auto& g : grids) {
    if (g.time_cols != t) {
      throw std::invalid_argument("merge_views: views disagree on time columns (" +
                                  std::to_string(g.time_cols) + " vs " +
                                  std::to_string(t) + ")");
    }
    if (g.embed_dim != e) throw std::invalid_argument("merge_views: embed dim mismatch");
    nf = std::max(nf, g.freq_tokens);
  }
  const std::size_t nv = grids.size();
  Tensor y({t * nf, e});
  // Index of the view providing each output cell under MAX (nv = padding).
  std::vector<std::size_t> source(mode == MergeMode::kMax ? y.size() : 0);
  for (std::size_t ti = 0; ti < t; ++ti) {
    for (std::size_t f = 0; f < nf; ++f) {
      for (std::size_t c = 0; c < e; ++c) {
        const std::size_t o = (ti * nf + f) * e + c;
        double acc = 0.0;
        std::size_t best_view = nv;
        double best = 0.0;
        for (std::size_t vi = 0; vi < nv; ++vi) {
          const auto& g = grids[vi];
          const double val = f < g.freq_tokens ? g.at(ti, f, c) : 0.0;
          if (mode == MergeMode::kMean) {
            acc += val;
          } else if (vi == 0 || val > best) {
            best = val;
            best_view = f < g.freq_tokens ? vi : nv;
          }
        }
        if (mode == MergeMode::kMean) {
          y[o] = acc / static_cast<double>(nv);
        } else {
          y[o] = best;
          source[o] = best_view;
        }
      }
    }
  }
  TokenGrid out;
  out.tokens = constant(std::move(y));
  out.time_cols = t;
  out.freq_tokens = nf;
  out.embed_dim = e;
  out.time_map = grids.front().time_map;
  if (tape) {
    std::vector<Var> inputs;
    std::vector<std::size_t> tokens;
    for (const auto& g : grids) {
      inputs.push_back(g.tokens);
      tokens.push_back(g.freq_tokens);
    }
    tape->record([inputs, tokens, source = std::move(source), out_var = out.tokens,
                  t, nf, e, mode] {
      const Tensor& dy = out_var->grad_buffer();
      const std::size_t nv = inputs.size();
      for (std::size_t ti = 0; ti < t; ++ti) {
        for (std::size_t f = 0; f < nf; ++f) {
          for (std::size_t c = 0; c < e; ++c) {
            const std::size_t o = (ti * nf + f) * e + c;
            for (std::size_t vi = 0; vi < nv; ++vi) {
              if (f >= tokens[vi]) continue;
              if (mode == MergeMode::kMax && source[o] != vi) continue;
              const double scale = mode == MergeMode::kMean
                                       ? 1.0 / static_cast<double>(nv)
                                       : 1.0;
              inputs[vi]->grad_buffer()[(ti * tokens[vi] + f) * e + c] += scale * dy[o];
            }
          }
        }
      }
    });
  }
  return out;
}

// Concatenates each time column's tokens in ascending frequency order into a
// T x (N_f*E) matrix. Row-major token storage already has that layout.
inline Var flatten_time_columns(Tape* tape, const TokenGrid& tg) {
  return reshape(tape, tg.tokens, {tg.time_cols, tg.freq_tokens * tg.embed_dim});
}

inline EncoderSequence flatten_and_project(Tape* tape, const TokenGrid& tg,
                                           const Var& weight, const Var& bias,
                                           double frame_period_ms) {
  return {linear(tape, flatten_time_columns(tape, tg), weight, bias), frame_period_ms};
}

// Full frontend: LFR placement, every view, pooling merge, time-wise
// concatenation and final projection.
//   PRE : stack frames before the views.
//   IN  : scale each view's patch_time and stride_time by the LFR factor.
//   POST: stack lfr_factor concatenated columns before the projection.
inline EncoderSequence frontend_forward(Tape* tape, const features::Spectrogram& input,
                                        const FrontendConfig& cfg,
                                        const ParamStore& params) {
  cfg.validate();
  if (input.bins() != cfg.input_bins) {
    throw std::invalid_argument("spectrogram has " + std::to_string(input.bins()) +
                                " bins, frontend expects " +
                                std::to_string(cfg.input_bins));
  }
  const features::Spectrogram s = cfg.lfr_placement == LfrPlacement::kPre
                                      ? features::lfr_stack(input, cfg.lfr_factor)
                                      : input;
  std::vector<TokenGrid> grids;
  for (std::size_t v = 0; v < cfg.views.size(); ++v) {
    const auto view = effective_view(cfg.views[v], cfg);
    grids.push_back(view_forward(tape, s, view, params.get(view_prefix(v) + "embed/weight"),
                                 params.get(view_prefix(v) + "embed/bias"),
                                 view_layers(params, cfg, v)));
  }
  const TokenGrid merged = merge_views(tape, grids, cfg.merge_mode);
  const auto& w = params.get("proj/weight");
  if (w->value.rows() != projection_input_dim(cfg)) {
    throw std::invalid_argument("projection weight " + shape_str(w->value.shape()) +
                                " does not match frontend config");
  }
  double period = s.frame_period_ms *
                  static_cast<double>(effective_view(cfg.views.front(), cfg).stride_time);
  Var flat = flatten_time_columns(tape, merged);
  if (cfg.lfr_placement == LfrPlacement::kPost) {
    flat = stack_rows(tape, flat, cfg.lfr_factor);
    period *= static_cast<double>(cfg.lfr_factor);
  }
  return {linear(tape, flat, w, params.get("proj/bias")), period};
}

// Encoder frames produced for a T-frame input.
inline std::size_t output_frames(const FrontendConfig& cfg, std::size_t frames) {
  const auto& v = cfg.views.front();
  switch (cfg.lfr_placement) {
    case LfrPlacement::kPre:
      return grid_extent((frames + cfg.lfr_factor - 1) / cfg.lfr_factor, v.stride_time);
    case LfrPlacement::kIn:
      return grid_extent(frames, v.stride_time * cfg.lfr_factor);
    case LfrPlacement::kPost: {
      const std::size_t cols = grid_extent(frames, v.stride_time);
      return (cols + cfg.lfr_factor - 1) / cfg.lfr_factor;
    }
  }
  return 0;
}

}  // namespace freqattn::frontend

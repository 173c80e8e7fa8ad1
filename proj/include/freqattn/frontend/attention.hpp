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
#include <string>
#include <utility>
#include <vector>

#include "freqattn/ops.hpp"
#include "freqattn/param_store.hpp"

namespace freqattn::frontend {

inline constexpr double kLayerNormEps = 1e-6;

// Embedded patches of one view: time_cols x freq_tokens tokens of width E,
// stored as a (time_cols * freq_tokens) x E matrix.
struct TokenGrid {
  Var tokens;
  std::size_t time_cols = 0;
  std::size_t freq_tokens = 0;
  std::size_t embed_dim = 0;
  std::vector<std::pair<std::size_t, std::size_t>> time_map;

  double at(std::size_t t, std::size_t f, std::size_t e) const {
    return tokens->value[(t * freq_tokens + f) * embed_dim + e];
  }
};

// One F-Attention block. Q/K/V weights are E x E with head h owning columns
// [h*E/H, (h+1)*E/H), i.e. the per-head E x (E/H) projections side by side.
struct AttnLayerParams {
  Var q_weight, q_bias;
  Var k_weight, k_bias;
  Var v_weight, v_bias;
  Var out_weight, out_bias;
  Var norm_gamma, norm_beta;
  std::size_t num_heads = 1;

  std::size_t embed_dim() const { return q_weight->value.rows(); }

  static AttnLayerParams register_in(ParamStore& store, const std::string& prefix,
                                     std::size_t embed_dim, std::size_t num_heads,
                                     std::mt19937_64& rng) {
    AttnLayerParams p;
    p.num_heads = num_heads;
    auto proj = [&](const std::string& name, Var& w, Var& b) {
      w = store.add(prefix + name + "/weight", xavier_uniform(embed_dim, embed_dim, rng));
      b = store.add(prefix + name + "/bias", Tensor({embed_dim}));
    };
    proj("q_proj", p.q_weight, p.q_bias);
    proj("k_proj", p.k_weight, p.k_bias);
    proj("v_proj", p.v_weight, p.v_bias);
    proj("out_proj", p.out_weight, p.out_bias);
    p.norm_gamma = store.add(prefix + "norm/gamma", Tensor({embed_dim}, 1.0));
    p.norm_beta = store.add(prefix + "norm/beta", Tensor({embed_dim}));
    return p;
  }

  static AttnLayerParams from_store(const ParamStore& store, const std::string& prefix,
                                    std::size_t num_heads) {
    AttnLayerParams p;
    p.num_heads = num_heads;
    p.q_weight = store.get(prefix + "q_proj/weight");
    p.q_bias = store.get(prefix + "q_proj/bias");
    p.k_weight = store.get(prefix + "k_proj/weight");
    p.k_bias = store.get(prefix + "k_proj/bias");
    p.v_weight = store.get(prefix + "v_proj/weight");
    p.v_bias = store.get(prefix + "v_proj/bias");
    p.out_weight = store.get(prefix + "out_proj/weight");
    p.out_bias = store.get(prefix + "out_proj/bias");
    p.norm_gamma = store.get(prefix + "norm/gamma");
    p.norm_beta = store.get(prefix + "norm/beta");
    return p;
  }

  static std::size_t count(std::size_t embed_dim) {
    return 4 * (embed_dim * embed_dim + embed_dim) + 2 * embed_dim;
  }
};

// Intermediate values of one layer application, kept for attribution.
struct AttnTrace {
  Tensor weights;      // [time_col][head][query][key]
  Tensor pre_norm;     // x + attention output, before layer norm
};

// Multi-head self-attention across the frequency tokens of each time column,
// then residual add and layer normalization. Time columns never interact.
inline TokenGrid f_attention_layer(Tape* tape, const TokenGrid& in,
                                   const AttnLayerParams& p,
                                   AttnTrace* trace = nullptr) {
  const auto& x = in.tokens;
  auto q = linear(tape, x, p.q_weight, p.q_bias);
  auto k = linear(tape, x, p.k_weight, p.k_bias);
  auto v = linear(tape, x, p.v_weight, p.v_bias);
  auto ctx = grouped_attention(tape, q, k, v, in.time_cols, in.freq_tokens,
                               p.num_heads, trace ? &trace->weights : nullptr);
  auto attn_out = linear(tape, ctx, p.out_weight, p.out_bias);
  auto residual = add(tape, x, attn_out);
  if (trace) trace->pre_norm = residual->value;
  TokenGrid out = in;
  out.tokens = layer_norm(tape, residual, p.norm_gamma, p.norm_beta, kLayerNormEps);
  return out;
}

}  // namespace freqattn::frontend

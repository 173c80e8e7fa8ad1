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

// Token-to-token contributions inside one F-Attention layer, following the
// ALTI decomposition: each output token is split into per-input-token
// vectors (attention weights x values x output projection, plus the residual
// credited to the token itself), the layer norm is linearized at the actual
// row statistics, and contributions are scored by Manhattan distance.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "freqattn/frontend/attention.hpp"
#include "freqattn/tensor.hpp"

namespace freqattn::attribution {

struct Decomposition {
  std::size_t tokens = 0;
  std::size_t embed_dim = 0;
  // pre[i][j]: part of the pre-norm output i attributable to input j.
  Tensor pre;
  // Shared additive bias term b_v W_o + b_o (attention rows sum to one).
  Tensor pre_bias;
  // post[i][j]: the same vector after the linearized layer norm
  // gamma * (v - mean(v)) / sigma_i.
  Tensor post;
  // Per-row bias after layer norm: gamma * (b - mean(b)) / sigma_i + beta.
  Tensor post_bias;
  // Layer outputs from the regular forward pass.
  Tensor pre_norm_output;
  Tensor output;
  Tensor attention;  // [head][query][key]

  const double* pre_vec(std::size_t i, std::size_t j) const {
    return pre.data().data() + (i * tokens + j) * embed_dim;
  }
  const double* post_vec(std::size_t i, std::size_t j) const {
    return post.data().data() + (i * tokens + j) * embed_dim;
  }
};

// tokens: N x E embeddings of one time column.
inline Decomposition transformed_vectors(const Tensor& tokens,
                                         const frontend::AttnLayerParams& p) {
  const std::size_t n = tokens.rows(), e = tokens.cols();
  if (n == 0 || e != p.embed_dim()) {
    throw std::invalid_argument("transformed_vectors: token shape " +
                                shape_str(tokens.shape()) + " does not match layer");
  }
  const std::size_t heads = p.num_heads, dh = e / heads;

  frontend::TokenGrid grid{constant(tokens.reshaped({n, e})), 1, n, e, {}};
  frontend::AttnTrace trace;
  const auto out = frontend::f_attention_layer(nullptr, grid, p, &trace);

  Decomposition d;
  d.tokens = n;
  d.embed_dim = e;
  d.attention = trace.weights.reshaped({heads, n, n});
  d.pre_norm_output = trace.pre_norm;
  d.output = out.tokens->value;

  const Tensor& wv = p.v_weight->value;
  const Tensor& wo = p.out_weight->value;

  // u[j][h] = (x_j Wv)[head h] Wo[head h rows]  : N x H x E
  std::vector<double> u(n * heads * e, 0.0);
  std::vector<double> vx(e);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(vx.begin(), vx.end(), 0.0);
    for (std::size_t a = 0; a < e; ++a) {
      const double xa = tokens.at(j, a);
      for (std::size_t b = 0; b < e; ++b) vx[b] += xa * wv.at(a, b);
    }
    for (std::size_t h = 0; h < heads; ++h) {
      double* uj = u.data() + (j * heads + h) * e;
      for (std::size_t r = h * dh; r < (h + 1) * dh; ++r) {
        for (std::size_t c = 0; c < e; ++c) uj[c] += vx[r] * wo.at(r, c);
      }
    }
  }

  d.pre = Tensor({n, n, e});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double* t = d.pre.data().data() + (i * n + j) * e;
      for (std::size_t h = 0; h < heads; ++h) {
        const double a = d.attention[(h * n + i) * n + j];
        const double* uj = u.data() + (j * heads + h) * e;
        for (std::size_t c = 0; c < e; ++c) t[c] += a * uj[c];
      }
      if (i == j) {
        for (std::size_t c = 0; c < e; ++c) t[c] += tokens.at(i, c);
      }
    }
  }

  d.pre_bias = Tensor({e});
  for (std::size_t c = 0; c < e; ++c) {
    double s = p.out_bias->value[c];
    for (std::size_t r = 0; r < e; ++r) s += p.v_bias->value[r] * wo.at(r, c);
    d.pre_bias[c] = s;
  }

  const Tensor& gamma = p.norm_gamma->value;
  const Tensor& beta = p.norm_beta->value;
  d.post = Tensor({n, n, e});
  d.post_bias = Tensor({n, e});
  auto centered_scaled = [&](const double* v, double inv_sigma, double* dst) {
    double mean = 0.0;
    for (std::size_t c = 0; c < e; ++c) mean += v[c];
    mean /= static_cast<double>(e);
    for (std::size_t c = 0; c < e; ++c) dst[c] = gamma[c] * (v[c] - mean) * inv_sigma;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = d.pre_norm_output.row_ptr(i);
    double mean = 0.0;
    for (std::size_t c = 0; c < e; ++c) mean += r[c];
    mean /= static_cast<double>(e);
    double var = 0.0;
    for (std::size_t c = 0; c < e; ++c) var += (r[c] - mean) * (r[c] - mean);
    var /= static_cast<double>(e);
    const double inv_sigma = 1.0 / std::sqrt(var + frontend::kLayerNormEps);
    for (std::size_t j = 0; j < n; ++j) {
      centered_scaled(d.pre_vec(i, j), inv_sigma,
                      d.post.data().data() + (i * n + j) * e);
    }
    double* pb = d.post_bias.row_ptr(i);
    centered_scaled(d.pre_bias.data().data(), inv_sigma, pb);
    for (std::size_t c = 0; c < e; ++c) pb[c] += beta[c];
  }
  return d;
}

struct ContributionMatrix {
  Tensor values;  // N x N, rows = output tokens, columns = input tokens
  // Rows whose raw scores were all zero; they are reported as uniform.
  std::vector<bool> degenerate_rows;

  std::size_t size() const { return values.rows(); }
  double at(std::size_t i, std::size_t j) const { return values.at(i, j); }

  double column_mass(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += values.at(i, j);
    return s;
  }
};

// c_ij = max(0, |y_i|_1 - |y_i - T_i(x_j)|_1), rows normalized to sum 1,
// where T_i(x_j) are the layer-normed transformed vectors and
// y_i = sum_j T_i(x_j). Bias terms carry no token credit.
inline ContributionMatrix contributions_from(const Decomposition& d) {
  const std::size_t n = d.tokens, e = d.embed_dim;
  ContributionMatrix cm{Tensor({n, n}), std::vector<bool>(n, false)};
  std::vector<double> y(e);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double* t = d.post_vec(i, j);
      for (std::size_t c = 0; c < e; ++c) y[c] += t[c];
    }
    double norm_y = 0.0;
    for (double v : y) norm_y += std::abs(v);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double* t = d.post_vec(i, j);
      double dist = 0.0;
      for (std::size_t c = 0; c < e; ++c) dist += std::abs(y[c] - t[c]);
      const double score = std::max(0.0, norm_y - dist);
      cm.values.at(i, j) = score;
      total += score;
    }
    if (!(total > 0.0)) {
      cm.degenerate_rows[i] = true;
      for (std::size_t j = 0; j < n; ++j) cm.values.at(i, j) = 1.0 / static_cast<double>(n);
    } else {
      for (std::size_t j = 0; j < n; ++j) cm.values.at(i, j) /= total;
    }
  }
  return cm;
}

inline ContributionMatrix alti_contributions(const Tensor& tokens,
                                             const frontend::AttnLayerParams& p) {
  return contributions_from(transformed_vectors(tokens, p));
}

}  // namespace freqattn::attribution

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

// Reference computations for tests. These are written directly from the
// textbook definitions with plain loops and share no code with the library
// kernels they check.

#include <cmath>
#include <random>
#include <vector>

#include "freqattn/frontend/attention.hpp"
#include "freqattn/grad_check.hpp"
#include "freqattn/ops.hpp"
#include "freqattn/tensor.hpp"

namespace freqattn::oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix to_matrix(const Tensor& t) {
  Matrix m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m[i][j] = t.at(i, j);
  return m;
}

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b[0].size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline std::vector<double> naive_layer_norm(const std::vector<double>& x,
                                            const std::vector<double>& gamma,
                                            const std::vector<double>& beta,
                                            double eps) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v / n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean) / n;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = gamma[i] * (x[i] - mean) / std::sqrt(var + eps) + beta[i];
  return y;
}

struct NaiveAttentionParams {
  Matrix wq, wk, wv, wo;
  std::vector<double> bq, bk, bv, bo, gamma, beta;
  std::size_t heads;
};

// Flat loop implementation of one F-Attention block on N tokens:
// per-head softmax(q k^T / sqrt(E/H)) v, concat, output projection,
// residual, layer norm.
inline Matrix naive_attention_block(const Matrix& x, const NaiveAttentionParams& p,
                                    double eps) {
  const std::size_t n = x.size(), e = x[0].size(), dh = e / p.heads;
  auto project = [&](const Matrix& w, const std::vector<double>& b) {
    Matrix y(n, std::vector<double>(e));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < e; ++c) {
        double s = b[c];
        for (std::size_t a = 0; a < e; ++a) s += x[i][a] * w[a][c];
        y[i][c] = s;
      }
    return y;
  };
  const Matrix q = project(p.wq, p.bq), k = project(p.wk, p.bk), v = project(p.wv, p.bv);
  Matrix ctx(n, std::vector<double>(e, 0.0));
  for (std::size_t h = 0; h < p.heads; ++h) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> w(n);
      double z = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t d = h * dh; d < (h + 1) * dh; ++d) s += q[i][d] * k[j][d];
        w[j] = std::exp(s / std::sqrt(static_cast<double>(dh)));
        z += w[j];
      }
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t d = h * dh; d < (h + 1) * dh; ++d) ctx[i][d] += w[j] / z * v[j][d];
    }
  }
  Matrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(e);
    for (std::size_t c = 0; c < e; ++c) {
      double s = p.bo[c];
      for (std::size_t a = 0; a < e; ++a) s += ctx[i][a] * p.wo[a][c];
      r[c] = x[i][c] + s;
    }
    out[i] = naive_layer_norm(r, p.gamma, p.beta, eps);
  }
  return out;
}

inline NaiveAttentionParams to_naive(const frontend::AttnLayerParams& p) {
  auto vec = [](const Var& v) { return v->value.data(); };
  return {to_matrix(p.q_weight->value), to_matrix(p.k_weight->value),
          to_matrix(p.v_weight->value), to_matrix(p.out_weight->value),
          vec(p.q_bias), vec(p.k_bias), vec(p.v_bias), vec(p.out_bias),
          vec(p.norm_gamma), vec(p.norm_beta), p.num_heads};
}

// Objective sum(weights .* build(params)) for checking an op's adjoint.
template <typename Build>
Objective weighted_sum_objective(Build build, Tensor weights) {
  return [build, weights](ParamStore& p, bool with_grad) {
    Tape tape;
    Var out = build(with_grad ? &tape : nullptr, p);
    double s = 0.0;
    for (std::size_t i = 0; i < out->value.size(); ++i) s += weights[i] * out->value[i];
    if (with_grad) tape.backward(out, weights);
    return s;
  };
}

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  return random_normal(std::move(shape), rng, scale);
}

}  // namespace freqattn::oracle

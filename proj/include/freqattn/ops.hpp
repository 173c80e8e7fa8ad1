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

// Differentiable dense ops. Every op computes its forward value and, when a
// tape is supplied, records a closure that accumulates the exact adjoint into
// the grad slots of its inputs. Passing a null tape gives pure inference.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqattn/autograd.hpp"
#include "freqattn/tensor.hpp"

namespace freqattn {

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

// c[n x m] += a[n x k] * b[k x m]
inline void gemm_acc(const double* a, const double* b, double* c,
                     std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c + i * m;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + p * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += av * bp[j];
    }
  }
}

// c[n x k] += a[n x m] * b[k x m]^T
inline void gemm_nt_acc(const double* a, const double* b, double* c,
                        std::size_t n, std::size_t m, std::size_t k) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * m;
    for (std::size_t j = 0; j < k; ++j) {
      const double* bj = b + j * m;
      double s = 0.0;
      for (std::size_t p = 0; p < m; ++p) s += ai[p] * bj[p];
      c[i * k + j] += s;
    }
  }
}

// c[k x m] += a[n x k]^T * b[n x m]
inline void gemm_tn_acc(const double* a, const double* b, double* c,
                        std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * k;
    const double* bi = b + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      double* cp = c + p * m;
      for (std::size_t j = 0; j < m; ++j) cp[j] += av * bi[j];
    }
  }
}

inline void softmax_row(const double* x, double* y, std::size_t m) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) mx = std::max(mx, x[j]);
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    y[j] = std::exp(x[j] - mx);
    s += y[j];
  }
  for (std::size_t j = 0; j < m; ++j) y[j] /= s;
}

// dx = y * (dy - <dy, y>) for one softmax row.
inline void softmax_row_adjoint(const double* y, const double* dy, double* dx,
                                std::size_t m) {
  double dot = 0.0;
  for (std::size_t j = 0; j < m; ++j) dot += dy[j] * y[j];
  for (std::size_t j = 0; j < m; ++j) dx[j] += y[j] * (dy[j] - dot);
}

}  // namespace detail

// y = x W + b.  x: N x Din (leading axes folded), W: Din x Dout, b: Dout.
// Adjoint: dx += dy W^T, dW += x^T dy, db += column sums of dy.
inline Var linear(Tape* tape, const Var& x, const Var& w, const Var& b) {
  const Tensor& xv = x->value;
  const Tensor& wv = w->value;
  detail::require(wv.rank() == 2, "linear: weight must be rank 2, got " +
                                      shape_str(wv.shape()));
  const std::size_t n = xv.rows(), din = xv.cols(), dout = wv.cols();
  detail::require(wv.rows() == din, "linear: input " + shape_str(xv.shape()) +
                                        " does not match weight " +
                                        shape_str(wv.shape()));
  detail::require(b->value.size() == dout,
                  "linear: bias size " + std::to_string(b->value.size()) +
                      " does not match output dim " + std::to_string(dout));
  Tensor y({n, dout});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(b->value.data().begin(), b->value.data().end(), y.row_ptr(i));
  }
  detail::gemm_acc(xv.data().data(), wv.data().data(), y.data().data(), n, din,
                   dout);
  auto out = constant(std::move(y));
  if (tape) {
    tape->record([x, w, b, out, n, din, dout] {
      const Tensor& dy = out->grad_buffer();
      detail::gemm_nt_acc(dy.data().data(), w->value.data().data(),
                          x->grad_buffer().data().data(), n, dout, din);
      detail::gemm_tn_acc(x->value.data().data(), dy.data().data(),
                          w->grad_buffer().data().data(), n, din, dout);
      auto& db = b->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dout; ++j) db[j] += dy.at(i, j);
      }
    });
  }
  return out;
}

inline Var softmax_rows(Tape* tape, const Var& x) {
  const Tensor& xv = x->value;
  Tensor y(xv.shape());
  const std::size_t n = xv.rows(), m = xv.cols();
  for (std::size_t i = 0; i < n; ++i) {
    detail::softmax_row(xv.row_ptr(i), y.row_ptr(i), m);
  }
  auto out = constant(std::move(y));
  if (tape) {
    tape->record([x, out, n, m] {
      auto& dx = x->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        detail::softmax_row_adjoint(out->value.row_ptr(i),
                                    out->grad_buffer().row_ptr(i),
                                    dx.row_ptr(i), m);
      }
    });
  }
  return out;
}

// Row-wise normalization to zero mean and unit variance followed by a
// per-column affine map. Variance is the biased (1/D) estimator.
inline Var layer_norm(Tape* tape, const Var& x, const Var& gamma,
                      const Var& beta, double eps) {
  const Tensor& xv = x->value;
  const std::size_t n = xv.rows(), d = xv.cols();
  detail::require(d >= 2, "layer_norm: need at least 2 columns");
  detail::require(gamma->value.size() == d && beta->value.size() == d,
                  "layer_norm: gamma/beta size mismatch");
  Tensor y(xv.shape());
  Tensor xhat(xv.shape());
  std::vector<double> inv_std(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = xv.row_ptr(i);
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += xi[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (xi[j] - mean) * (xi[j] - mean);
    var /= static_cast<double>(d);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      xhat.at(i, j) = (xi[j] - mean) * inv_std[i];
      y.at(i, j) = gamma->value[j] * xhat.at(i, j) + beta->value[j];
    }
  }
  auto out = constant(std::move(y));
  if (tape) {
    tape->record([x, gamma, beta, out, xhat = std::move(xhat),
                  inv_std = std::move(inv_std), n, d] {
      const Tensor& dy = out->grad_buffer();
      auto& dx = x->grad_buffer();
      auto& dg = gamma->grad_buffer();
      auto& db = beta->grad_buffer();
      std::vector<double> dxhat(d);
      const double dd = static_cast<double>(d);
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0, sum_xhat = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          dg[j] += dy.at(i, j) * xhat.at(i, j);
          db[j] += dy.at(i, j);
          dxhat[j] = dy.at(i, j) * gamma->value[j];
          sum += dxhat[j];
          sum_xhat += dxhat[j] * xhat.at(i, j);
        }
        for (std::size_t j = 0; j < d; ++j) {
          dx.at(i, j) += inv_std[i] / dd *
                         (dd * dxhat[j] - sum - xhat.at(i, j) * sum_xhat);
        }
      }
    });
  }
  return out;
}

inline Var add(Tape* tape, const Var& a, const Var& b) {
  detail::require(a->value.size() == b->value.size(),
                  "add: shape mismatch " + shape_str(a->value.shape()) +
                      " vs " + shape_str(b->value.shape()));
  Tensor y = a->value;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += b->value[i];
  auto out = constant(std::move(y));
  if (tape) {
    tape->record([a, b, out] {
      const Tensor& dy = out->grad_buffer();
      auto& da = a->grad_buffer();
      auto& db = b->grad_buffer();
      for (std::size_t i = 0; i < dy.size(); ++i) {
        da[i] += dy[i];
        db[i] += dy[i];
      }
    });
  }
  return out;
}

inline Var relu(Tape* tape, const Var& x) {
  Tensor y = x->value;
  for (auto& v : y.data()) v = std::max(0.0, v);
  auto out = constant(std::move(y));
  if (tape) {
    tape->record([x, out] {
      const Tensor& dy = out->grad_buffer();
      auto& dx = x->grad_buffer();
      for (std::size_t i = 0; i < dy.size(); ++i) {
        if (x->value[i] > 0.0) dx[i] += dy[i];
      }
    });
  }
  return out;
}

// Relabels the shape; row-major data is untouched.
inline Var reshape(Tape* tape, const Var& x, Shape shape) {
  auto out = constant(x->value.reshaped(std::move(shape)));
  if (tape) {
    tape->record([x, out] {
      auto& dx = x->grad_buffer();
      const Tensor& dy = out->grad_buffer();
      for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i];
    });
  }
  return out;
}

// Groups `factor` consecutive rows into one row of width factor*cols,
// zero-padding the tail group. T x M -> ceil(T/factor) x (factor*M).
inline Var stack_rows(Tape* tape, const Var& x, std::size_t factor) {
  detail::require(factor >= 1, "stack_rows: factor must be >= 1");
  const std::size_t t = x->value.rows(), m = x->value.cols();
  const std::size_t t_out = (t + factor - 1) / factor;
  Tensor y({t_out, factor * m});
  std::copy(x->value.data().begin(), x->value.data().end(), y.data().begin());
  auto out = constant(std::move(y));
  if (tape) {
    tape->record([x, out] {
      auto& dx = x->grad_buffer();
      const Tensor& dy = out->grad_buffer();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
    });
  }
  return out;
}

// 1 x D average of the rows of an N x D input.
inline Var mean_rows(Tape* tape, const Var& x) {
  const std::size_t n = x->value.rows(), d = x->value.cols();
  detail::require(n >= 1, "mean_rows: empty input");
  Tensor y({1, d});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) y[j] += x->value.at(i, j);
  }
  for (auto& v : y.data()) v /= static_cast<double>(n);
  auto out = constant(std::move(y));
  if (tape) {
    tape->record([x, out, n, d] {
      auto& dx = x->grad_buffer();
      const Tensor& dy = out->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          dx.at(i, j) += dy[j] / static_cast<double>(n);
        }
      }
    });
  }
  return out;
}

// Softmax cross-entropy of a single 1 x C logit row against `label`.
// Adjoint: dlogits = softmax(logits) - onehot(label).
inline Var cross_entropy(Tape* tape, const Var& logits, std::size_t label) {
  const std::size_t c = logits->value.size();
  detail::require(label < c, "cross_entropy: label out of range");
  std::vector<double> p(c);
  detail::softmax_row(logits->value.data().data(), p.data(), c);
  const double loss = -std::log(std::max(p[label], 1e-300));
  auto out = constant(Tensor({1}, std::vector<double>{loss}));
  if (tape) {
    tape->record([logits, out, p = std::move(p), label] {
      const double g = out->grad_buffer()[0];
      auto& dl = logits->grad_buffer();
      for (std::size_t j = 0; j < p.size(); ++j) {
        dl[j] += g * (p[j] - (j == label ? 1.0 : 0.0));
      }
    });
  }
  return out;
}

// Multi-head scaled dot-product attention applied independently to `groups`
// blocks of `tokens` consecutive rows. Q, K, V: (groups*tokens) x E with the
// E columns split into `heads` contiguous blocks. Scores use 1/sqrt(E/H).
// Returns the concatenated per-head context; if `weights` is non-null it
// receives the attention matrices laid out [group][head][query][key].
inline Var grouped_attention(Tape* tape, const Var& q, const Var& k,
                             const Var& v, std::size_t groups,
                             std::size_t tokens, std::size_t heads,
                             Tensor* weights = nullptr) {
  const std::size_t e = q->value.cols();
  detail::require(heads >= 1 && e % heads == 0,
                  "attention: heads must divide embedding dim");
  detail::require(q->value.rows() == groups * tokens &&
                      k->value.size() == q->value.size() &&
                      v->value.size() == q->value.size(),
                  "attention: q/k/v shape mismatch");
  const std::size_t dh = e / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Tensor attn({groups, heads, tokens, tokens});
  Tensor ctx({groups * tokens, e});
  std::vector<double> scores(tokens);
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t h = 0; h < heads; ++h) {
      double* a = attn.data().data() + ((g * heads + h) * tokens) * tokens;
      for (std::size_t i = 0; i < tokens; ++i) {
        const double* qi = q->value.row_ptr(g * tokens + i) + h * dh;
        for (std::size_t j = 0; j < tokens; ++j) {
          const double* kj = k->value.row_ptr(g * tokens + j) + h * dh;
          double s = 0.0;
          for (std::size_t p = 0; p < dh; ++p) s += qi[p] * kj[p];
          scores[j] = s * scale;
        }
        detail::softmax_row(scores.data(), a + i * tokens, tokens);
        double* ci = ctx.row_ptr(g * tokens + i) + h * dh;
        for (std::size_t j = 0; j < tokens; ++j) {
          const double w = a[i * tokens + j];
          const double* vj = v->value.row_ptr(g * tokens + j) + h * dh;
          for (std::size_t p = 0; p < dh; ++p) ci[p] += w * vj[p];
        }
      }
    }
  }
  if (weights) *weights = attn;
  auto out = constant(std::move(ctx));
  if (tape) {
    tape->record([q, k, v, out, attn = std::move(attn), groups, tokens, heads,
                  dh, scale] {
      const Tensor& dctx = out->grad_buffer();
      auto& dq = q->grad_buffer();
      auto& dk = k->grad_buffer();
      auto& dv = v->grad_buffer();
      std::vector<double> da(tokens), ds(tokens);
      for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t h = 0; h < heads; ++h) {
          const double* a =
              attn.data().data() + ((g * heads + h) * tokens) * tokens;
          for (std::size_t i = 0; i < tokens; ++i) {
            const double* dci = dctx.row_ptr(g * tokens + i) + h * dh;
            for (std::size_t j = 0; j < tokens; ++j) {
              const double* vj = v->value.row_ptr(g * tokens + j) + h * dh;
              double* dvj = dv.row_ptr(g * tokens + j) + h * dh;
              const double w = a[i * tokens + j];
              double s = 0.0;
              for (std::size_t p = 0; p < dh; ++p) {
                s += dci[p] * vj[p];
                dvj[p] += w * dci[p];
              }
              da[j] = s;
              ds[j] = 0.0;
            }
            detail::softmax_row_adjoint(a + i * tokens, da.data(), ds.data(),
                                        tokens);
            const double* qi = q->value.row_ptr(g * tokens + i) + h * dh;
            double* dqi = dq.row_ptr(g * tokens + i) + h * dh;
            for (std::size_t j = 0; j < tokens; ++j) {
              const double c = ds[j] * scale;
              if (c == 0.0) continue;
              const double* kj = k->value.row_ptr(g * tokens + j) + h * dh;
              double* dkj = dk.row_ptr(g * tokens + j) + h * dh;
              for (std::size_t p = 0; p < dh; ++p) {
                dqi[p] += c * kj[p];
                dkj[p] += c * qi[p];
              }
            }
          }
        }
      }
    });
  }
  return out;
}

// Geometry of a strided 2-D window scan over an H x W grid with C channels.
// Windows start at (oy*stride_h - pad_h, ox*stride_w - pad_w); reads outside
// the grid are zero.
struct WindowGeometry {
  std::size_t height = 0, width = 0, channels = 1;
  std::size_t kernel_h = 1, kernel_w = 1;
  std::size_t stride_h = 1, stride_w = 1;
  std::size_t pad_h = 0, pad_w = 0;
  std::size_t out_h = 0, out_w = 0;

  std::size_t window_len() const { return kernel_h * kernel_w * channels; }
};

// Extracts every window of a (H*W) x C input into one row of an
// (out_h*out_w) x (kh*kw*C) matrix, flattened (dy, dx, c) row-major.
// Adjoint scatters window gradients back to their source cells.
inline Var extract_windows(Tape* tape, const Var& x, const WindowGeometry& g) {
  detail::require(x->value.size() == g.height * g.width * g.channels,
                  "extract_windows: input size does not match geometry");
  const std::size_t len = g.window_len();
  Tensor y({g.out_h * g.out_w, len});
  const auto source = [](const WindowGeometry& g, std::size_t oy,
                         std::size_t ox, std::size_t dy, std::size_t dx,
                         long long& sy, long long& sx) {
    sy = static_cast<long long>(oy * g.stride_h + dy) -
         static_cast<long long>(g.pad_h);
    sx = static_cast<long long>(ox * g.stride_w + dx) -
         static_cast<long long>(g.pad_w);
    return sy >= 0 && sx >= 0 && sy < static_cast<long long>(g.height) &&
           sx < static_cast<long long>(g.width);
  };
  for (std::size_t oy = 0; oy < g.out_h; ++oy) {
    for (std::size_t ox = 0; ox < g.out_w; ++ox) {
      double* row = y.row_ptr(oy * g.out_w + ox);
      for (std::size_t dy = 0; dy < g.kernel_h; ++dy) {
        for (std::size_t dx = 0; dx < g.kernel_w; ++dx) {
          long long sy, sx;
          if (!source(g, oy, ox, dy, dx, sy, sx)) continue;
          const double* src =
              x->value.data().data() +
              (static_cast<std::size_t>(sy) * g.width +
               static_cast<std::size_t>(sx)) *
                  g.channels;
          std::copy(src, src + g.channels,
                    row + (dy * g.kernel_w + dx) * g.channels);
        }
      }
    }
  }
  auto out = constant(std::move(y));
  if (tape) {
    tape->record([x, out, g, source] {
      const Tensor& dy_t = out->grad_buffer();
      auto& dx_t = x->grad_buffer();
      for (std::size_t oy = 0; oy < g.out_h; ++oy) {
        for (std::size_t ox = 0; ox < g.out_w; ++ox) {
          const double* row = dy_t.row_ptr(oy * g.out_w + ox);
          for (std::size_t dy = 0; dy < g.kernel_h; ++dy) {
            for (std::size_t dx = 0; dx < g.kernel_w; ++dx) {
              long long sy, sx;
              if (!source(g, oy, ox, dy, dx, sy, sx)) continue;
              double* dst = dx_t.data().data() +
                            (static_cast<std::size_t>(sy) * g.width +
                             static_cast<std::size_t>(sx)) *
                                g.channels;
              const double* src = row + (dy * g.kernel_w + dx) * g.channels;
              for (std::size_t c = 0; c < g.channels; ++c) dst[c] += src[c];
            }
          }
        }
      }
    });
  }
  return out;
}

}  // namespace freqattn

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

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "freqattn/param_store.hpp"

namespace freqattn {

// Linear warm-up to peak_lr over warmup_steps, then continuous exponential
// decay by decay_rate every decay_every steps.
struct LrSchedule {
  double peak_lr = 1e-4;
  std::size_t warmup_steps = 5000;
  double decay_rate = 0.5;
  std::size_t decay_every = 100000;

  void validate() const {
    if (!(peak_lr > 0.0)) throw std::invalid_argument("peak_lr must be > 0");
    if (warmup_steps < 1) throw std::invalid_argument("warmup_steps must be >= 1");
    if (!(decay_rate > 0.0 && decay_rate <= 1.0)) {
      throw std::invalid_argument("decay_rate must be in (0, 1]");
    }
    if (decay_every < 1) throw std::invalid_argument("decay_every must be >= 1");
  }
};

inline double lr_at(const LrSchedule& s, std::uint64_t t) {
  if (t <= s.warmup_steps) {
    return s.peak_lr * static_cast<double>(t) /
           static_cast<double>(s.warmup_steps);
  }
  const double exponent = static_cast<double>(t - s.warmup_steps) /
                          static_cast<double>(s.decay_every);
  return s.peak_lr * std::pow(s.decay_rate, exponent);
}

struct OptState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;

  static OptState for_params(const ParamStore& p, double beta1 = 0.9,
                             double beta2 = 0.999, double epsilon = 1e-8) {
    OptState s;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    for (const auto& e : p.entries()) {
      s.first_moment.push_back(zeros_like(e.node->value));
      s.second_moment.push_back(zeros_like(e.node->value));
    }
    return s;
  }
};

// One bias-corrected Adam update using lr_at(sched, t+1). Gradients are
// consumed and zeroed. Parameters are left untouched if any gradient is
// non-finite.
inline void adam_step(ParamStore& params, OptState& state,
                      const LrSchedule& sched) {
  const auto& entries = params.entries();
  if (state.first_moment.size() != entries.size()) {
    throw std::invalid_argument("optimizer state does not match parameters");
  }
  for (const auto& e : entries) {
    if (!e.node->grad_buffer().all_finite()) {
      throw std::runtime_error("non-finite gradient in " + e.name);
    }
  }
  state.step += 1;
  const double lr = lr_at(sched, state.step);
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    Tensor& value = entries[k].node->value;
    Tensor& grad = entries[k].node->grad_buffer();
    Tensor& m = state.first_moment[k];
    Tensor& v = state.second_moment[k];
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      value[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
    grad.fill(0.0);
  }
}

}  // namespace freqattn

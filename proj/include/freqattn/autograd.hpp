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

#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "freqattn/tensor.hpp"

namespace freqattn {

// A value plus its accumulated gradient. Parameters live in a ParamStore and
// are shared with the ops that read them, so their gradient slots receive
// contributions directly during backward.
struct Node {
  explicit Node(Tensor v) : value(std::move(v)) {}

  Tensor value;
  Tensor grad;

  Tensor& grad_buffer() {
    if (grad.size() != value.size()) grad = zeros_like(value);
    return grad;
  }
};

using Var = std::shared_ptr<Node>;

inline Var constant(Tensor t) { return std::make_shared<Node>(std::move(t)); }

// Linear list of adjoint closures recorded by forward ops. backward() seeds
// the loss gradient and replays the closures in reverse order. Each op is
// responsible for its own exact adjoint; there is no general graph.
class Tape {
 public:
  void record(std::function<void()> adjoint) {
    adjoints_.push_back(std::move(adjoint));
  }

  void backward(const Var& loss, double seed = 1.0) {
    auto& g = loss->grad_buffer();
    for (auto& v : g.data()) v += seed;
    replay();
  }

  // Backward from a non-scalar output with an arbitrary upstream gradient.
  void backward(const Var& output, const Tensor& upstream) {
    auto& g = output->grad_buffer();
    if (upstream.size() != g.size()) {
      throw std::invalid_argument("backward: upstream gradient shape mismatch");
    }
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += upstream[i];
    replay();
  }

  std::size_t size() const { return adjoints_.size(); }

 private:
  void replay() {
    for (auto it = adjoints_.rbegin(); it != adjoints_.rend(); ++it) (*it)();
    adjoints_.clear();
  }

  std::vector<std::function<void()>> adjoints_;
};

}  // namespace freqattn

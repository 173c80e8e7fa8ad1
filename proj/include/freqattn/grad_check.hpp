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
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqattn/param_store.hpp"

namespace freqattn {

// Evaluates the scalar objective at the current parameter values. When
// `with_grad` is true it must also accumulate analytic gradients into the
// store's grad slots.
using Objective = std::function<double(ParamStore&, bool with_grad)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

// Relative error |a - n| / max(|a|, |n|, floor). The floor keeps coordinates
// whose true gradient is ~0 from reporting round-off as relative error.
inline double relative_error(double analytic, double numeric,
                             double floor = 1e-6) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

// Compares the analytic gradient of every parameter coordinate against the
// central difference (f(p+eps) - f(p-eps)) / (2 eps).
inline GradCheckResult grad_check(const Objective& f, ParamStore& params,
                                  double eps = 1e-5, double floor = 1e-6) {
  params.zero_grad();
  const double f0 = f(params, true);
  if (!std::isfinite(f0)) throw std::runtime_error("non-finite objective");
  std::vector<Tensor> analytic;
  for (const auto& e : params.entries()) analytic.push_back(e.node->grad_buffer());
  params.zero_grad();

  GradCheckResult res;
  for (std::size_t k = 0; k < params.entries().size(); ++k) {
    const auto& entry = params.entries()[k];
    Tensor& value = entry.node->value;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double orig = value[i];
      value[i] = orig + eps;
      const double fp = f(params, false);
      value[i] = orig - eps;
      const double fm = f(params, false);
      value[i] = orig;
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        throw std::runtime_error("non-finite objective at " + entry.name);
      }
      const double numeric = (fp - fm) / (2.0 * eps);
      const double err = relative_error(analytic[k][i], numeric, floor);
      ++res.coordinates;
      if (err > res.max_rel_error || res.coordinates == 1) {
        res.max_rel_error = err;
        res.worst_param = entry.name;
        res.worst_index = i;
        res.analytic = analytic[k][i];
        res.numeric = numeric;
      }
    }
  }
  return res;
}

}  // namespace freqattn

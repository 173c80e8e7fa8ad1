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
#include <cstdint>
#include <random>
#include <vector>

#include "freqattn/features/types.hpp"

namespace freqattn::features {

// SpecAugment-style masking policy. Defaults follow the LD policy.
struct MaskPolicy {
  std::size_t num_freq_masks = 2;
  std::size_t max_freq_width = 27;
  std::size_t num_time_masks = 2;
  std::size_t max_time_width = 100;
  double max_time_fraction = 1.0;
  std::uint64_t seed = 0;
};

enum class MaskAxis { kTime, kFrequency };

// Half-open [begin, end) band along one axis.
struct Mask {
  MaskAxis axis;
  std::size_t begin;
  std::size_t end;
};

struct AugmentResult {
  Spectrogram spectrogram;
  std::vector<Mask> masks;
  double fill_value = 0.0;
};

// Draws frequency then time masks (widths uniform in [0, max_width], clipped
// to the spectrogram) and fills them with the utterance mean. Total masked
// time frames never exceed floor(max_time_fraction * T).
inline AugmentResult spec_augment_with_masks(const Spectrogram& s,
                                             const MaskPolicy& p) {
  s.validate();
  AugmentResult res{s, {}, 0.0};
  const std::size_t t = s.frames(), f = s.bins();
  double mean = 0.0;
  for (double v : s.values.data()) mean += v;
  mean /= static_cast<double>(s.values.size());
  res.fill_value = mean;

  std::mt19937_64 rng(p.seed);
  auto uniform = [&rng](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  for (std::size_t i = 0; i < p.num_freq_masks; ++i) {
    const std::size_t w = uniform(0, std::min(p.max_freq_width, f));
    const std::size_t f0 = uniform(0, f - w);
    res.masks.push_back({MaskAxis::kFrequency, f0, f0 + w});
  }
  const double fraction = std::clamp(p.max_time_fraction, 0.0, 1.0);
  std::size_t budget = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(t)));
  for (std::size_t i = 0; i < p.num_time_masks; ++i) {
    const std::size_t w = std::min(uniform(0, std::min(p.max_time_width, t)), budget);
    budget -= w;
    const std::size_t t0 = uniform(0, t - w);
    res.masks.push_back({MaskAxis::kTime, t0, t0 + w});
  }

  for (const auto& m : res.masks) {
    if (m.axis == MaskAxis::kFrequency) {
      for (std::size_t r = 0; r < t; ++r) {
        for (std::size_t c = m.begin; c < m.end; ++c) {
          res.spectrogram.values.at(r, c) = mean;
        }
      }
    } else {
      for (std::size_t r = m.begin; r < m.end; ++r) {
        for (std::size_t c = 0; c < f; ++c) res.spectrogram.values.at(r, c) = mean;
      }
    }
  }
  return res;
}

inline Spectrogram spec_augment(const Spectrogram& s, const MaskPolicy& p) {
  return spec_augment_with_masks(s, p).spectrogram;
}

}  // namespace freqattn::features

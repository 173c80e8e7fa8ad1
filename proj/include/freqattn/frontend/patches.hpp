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

#include <stdexcept>
#include <utility>
#include <vector>

#include "freqattn/features/types.hpp"
#include "freqattn/frontend/config.hpp"
#include "freqattn/ops.hpp"

namespace freqattn::frontend {

// Number of patch positions along one axis: ceil(n / stride), at least 1.
// The axis is zero-padded at the end to (count - 1) * stride + patch, so
// (padded - patch) is a multiple of the stride, every input cell is covered
// when patch >= stride, and all views sharing a stride produce the same
// count. For 3x3 kernels with stride 2 and padding 1 this count matches two
// stacked convolutions: ceil(ceil(n/2)/2) = ceil(n/4).
inline std::size_t grid_extent(std::size_t n, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be >= 1");
  return std::max<std::size_t>(1, (n + stride - 1) / stride);
}

inline std::size_t padded_extent(std::size_t n, std::size_t patch, std::size_t stride) {
  return (grid_extent(n, stride) - 1) * stride + patch;
}

struct PatchGrid {
  // (time_cols * freq_tokens) x (patch_time * patch_freq); each patch is
  // flattened row-major (time-major within the patch).
  Tensor patches;
  std::size_t time_cols = 0;
  std::size_t freq_tokens = 0;
  std::size_t padded_time = 0;
  std::size_t padded_freq = 0;
  // Input frames [first, second) covered by each time column, clipped to T.
  std::vector<std::pair<std::size_t, std::size_t>> time_map;
};

inline WindowGeometry patch_geometry(std::size_t frames, std::size_t bins,
                                     const ViewConfig& v) {
  WindowGeometry g;
  g.height = frames;
  g.width = bins;
  g.channels = 1;
  g.kernel_h = v.patch_time;
  g.kernel_w = v.patch_freq;
  g.stride_h = v.stride_time;
  g.stride_w = v.stride_freq;
  g.out_h = grid_extent(frames, v.stride_time);
  g.out_w = grid_extent(bins, v.stride_freq);
  return g;
}

inline PatchGrid pad_and_extract_patches(const features::Spectrogram& s,
                                         const ViewConfig& v) {
  if (s.values.rank() != 2 || s.frames() == 0 || s.bins() == 0) {
    throw std::invalid_argument("cannot extract patches from an empty spectrogram");
  }
  if (v.patch_time < 1 || v.patch_freq < 1 || v.stride_time < 1 || v.stride_freq < 1) {
    throw std::invalid_argument("patch and stride must be >= 1");
  }
  const auto g = patch_geometry(s.frames(), s.bins(), v);
  PatchGrid grid;
  grid.patches = extract_windows(nullptr, constant(s.values), g)->value;
  grid.time_cols = g.out_h;
  grid.freq_tokens = g.out_w;
  grid.padded_time = padded_extent(s.frames(), v.patch_time, v.stride_time);
  grid.padded_freq = padded_extent(s.bins(), v.patch_freq, v.stride_freq);
  for (std::size_t t = 0; t < grid.time_cols; ++t) {
    const std::size_t first = std::min(t * v.stride_time, s.frames());
    const std::size_t last = std::min(t * v.stride_time + v.patch_time, s.frames());
    grid.time_map.emplace_back(first, last);
  }
  return grid;
}

}  // namespace freqattn::frontend

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
#include <string>
#include <vector>

#include "freqattn/tensor.hpp"

namespace freqattn::features {

struct Waveform {
  std::vector<double> samples;
  double sample_rate = 16000.0;
};

enum class FeatureKind : std::uint8_t { kLfbe = 0, kLogStft = 1, kStacked = 2 };

inline const char* feature_kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::kLfbe: return "lfbe";
    case FeatureKind::kLogStft: return "log_stft";
    case FeatureKind::kStacked: return "stacked";
  }
  return "unknown";
}

// T x F time-major feature matrix.
struct Spectrogram {
  Tensor values;
  double frame_period_ms = 10.0;
  FeatureKind kind = FeatureKind::kLfbe;

  std::size_t frames() const { return values.rows(); }
  std::size_t bins() const { return values.cols(); }
  double at(std::size_t t, std::size_t f) const { return values.at(t, f); }

  void validate() const {
    if (values.rank() != 2 || frames() < 1 || bins() < 1) {
      throw std::invalid_argument("spectrogram must be a non-empty T x F matrix");
    }
    if (!(frame_period_ms > 0.0)) {
      throw std::invalid_argument("frame_period_ms must be positive");
    }
    if (!values.all_finite()) {
      throw std::invalid_argument("spectrogram contains non-finite values");
    }
  }
};

struct FeatureConfig {
  double window_ms = 25.0;
  double shift_ms = 10.0;
  std::size_t num_mel_bins = 64;
  std::size_t fft_size = 512;
  double sample_rate = 16000.0;
  double log_floor = 1e-10;
  double mel_low_hz = 0.0;
  double mel_high_hz = 8000.0;

  std::size_t window_samples() const {
    return static_cast<std::size_t>(std::lround(window_ms * sample_rate / 1000.0));
  }
  std::size_t shift_samples() const {
    return static_cast<std::size_t>(std::lround(shift_ms * sample_rate / 1000.0));
  }

  void validate() const {
    if (!(shift_ms > 0.0) || window_ms < shift_ms) {
      throw std::invalid_argument("need window_ms >= shift_ms > 0");
    }
    if (num_mel_bins < 1 || num_mel_bins > fft_size / 2) {
      throw std::invalid_argument("num_mel_bins must be in [1, fft_size/2]");
    }
    if (!(log_floor > 0.0)) throw std::invalid_argument("log_floor must be > 0");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be > 0");
    if (window_samples() > fft_size) {
      throw std::invalid_argument("window longer than fft_size");
    }
    if (fft_size == 0 || (fft_size & (fft_size - 1)) != 0) {
      throw std::invalid_argument("fft_size must be a power of two");
    }
  }
};

inline double signal_power(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

}  // namespace freqattn::features

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
#include <complex>
#include <stdexcept>
#include <vector>

#include "freqattn/features/fft.hpp"
#include "freqattn/features/types.hpp"

namespace freqattn::features {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Triangular filters equally spaced on the mel scale between mel_low_hz and
// mel_high_hz, evaluated on the fft_size/2+1 bin frequencies. Returns a
// num_mel_bins x (fft_size/2+1) weight matrix.
class MelFilterbank {
 public:
  explicit MelFilterbank(const FeatureConfig& cfg)
      : num_bins_(cfg.num_mel_bins), num_fft_bins_(cfg.fft_size / 2 + 1) {
    const double lo = hz_to_mel(cfg.mel_low_hz);
    const double hi = hz_to_mel(cfg.mel_high_hz);
    std::vector<double> edges(num_bins_ + 2);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) /
                                    static_cast<double>(num_bins_ + 1));
    }
    centers_hz_.assign(edges.begin() + 1, edges.end() - 1);
    weights_.assign(num_bins_ * num_fft_bins_, 0.0);
    for (std::size_t m = 0; m < num_bins_; ++m) {
      const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
      for (std::size_t k = 0; k < num_fft_bins_; ++k) {
        const double f = static_cast<double>(k) * cfg.sample_rate /
                         static_cast<double>(cfg.fft_size);
        double w = 0.0;
        if (f > left && f <= center) {
          w = (f - left) / (center - left);
        } else if (f > center && f < right) {
          w = (right - f) / (right - center);
        }
        weights_[m * num_fft_bins_ + k] = w;
      }
    }
  }

  std::size_t num_bins() const { return num_bins_; }
  const std::vector<double>& centers_hz() const { return centers_hz_; }

  // power: fft_size/2+1 bin energies.
  void apply(const std::vector<double>& power, std::vector<double>& out) const {
    out.assign(num_bins_, 0.0);
    for (std::size_t m = 0; m < num_bins_; ++m) {
      const double* w = weights_.data() + m * num_fft_bins_;
      double s = 0.0;
      for (std::size_t k = 0; k < num_fft_bins_; ++k) s += w[k] * power[k];
      out[m] = s;
    }
  }

 private:
  std::size_t num_bins_;
  std::size_t num_fft_bins_;
  std::vector<double> centers_hz_;
  std::vector<double> weights_;
};

inline std::size_t num_frames(std::size_t num_samples, const FeatureConfig& cfg) {
  const std::size_t win = cfg.window_samples(), shift = cfg.shift_samples();
  if (num_samples < win) return 0;
  return 1 + (num_samples - win) / shift;
}

namespace detail {

inline void check_input(const Waveform& w, const FeatureConfig& cfg) {
  cfg.validate();
  if (w.sample_rate != cfg.sample_rate) {
    throw std::invalid_argument("waveform sample rate does not match config");
  }
  if (num_frames(w.samples.size(), cfg) == 0) {
    throw std::invalid_argument("insufficient audio");
  }
}

// Calls fn(t, spectrum) with the full complex spectrum of each Hann-windowed
// frame.
template <typename Fn>
void for_each_frame_spectrum(const Waveform& w, const FeatureConfig& cfg, Fn fn) {
  const std::size_t win = cfg.window_samples(), shift = cfg.shift_samples();
  const std::size_t t_count = num_frames(w.samples.size(), cfg);
  const auto window = hann_window(win);
  std::vector<double> frame(win);
  for (std::size_t t = 0; t < t_count; ++t) {
    for (std::size_t i = 0; i < win; ++i) {
      frame[i] = w.samples[t * shift + i] * window[i];
    }
    fn(t, real_fft(frame, cfg.fft_size));
  }
}

}  // namespace detail

// The Hann-windowed samples of frame t (for verification).
inline std::vector<double> windowed_frame(const Waveform& w,
                                          const FeatureConfig& cfg,
                                          std::size_t t) {
  const std::size_t win = cfg.window_samples(), shift = cfg.shift_samples();
  const auto window = hann_window(win);
  std::vector<double> frame(win);
  for (std::size_t i = 0; i < win; ++i) {
    frame[i] = w.samples.at(t * shift + i) * window[i];
  }
  return frame;
}

// Log mel filterbank energies: log(max(mel_energy, log_floor)).
inline Spectrogram compute_lfbe(const Waveform& w, const FeatureConfig& cfg) {
  detail::check_input(w, cfg);
  const MelFilterbank bank(cfg);
  const std::size_t t_count = num_frames(w.samples.size(), cfg);
  const std::size_t half = cfg.fft_size / 2 + 1;
  Spectrogram s{Tensor({t_count, cfg.num_mel_bins}), cfg.shift_ms,
                FeatureKind::kLfbe};
  std::vector<double> power(half), mel;
  detail::for_each_frame_spectrum(w, cfg, [&](std::size_t t, const auto& spec) {
    for (std::size_t k = 0; k < half; ++k) power[k] = std::norm(spec[k]);
    bank.apply(power, mel);
    for (std::size_t m = 0; m < mel.size(); ++m) {
      s.values.at(t, m) = std::log(std::max(mel[m], cfg.log_floor));
    }
  });
  return s;
}

// Log-magnitude STFT keeping the lowest fft_size/2 bins (the Nyquist bin is
// dropped, so fft_size 512 gives 256 features).
inline Spectrogram compute_log_stft(const Waveform& w, const FeatureConfig& cfg) {
  detail::check_input(w, cfg);
  const std::size_t t_count = num_frames(w.samples.size(), cfg);
  const std::size_t keep = cfg.fft_size / 2;
  Spectrogram s{Tensor({t_count, keep}), cfg.shift_ms, FeatureKind::kLogStft};
  detail::for_each_frame_spectrum(w, cfg, [&](std::size_t t, const auto& spec) {
    for (std::size_t k = 0; k < keep; ++k) {
      s.values.at(t, k) = std::log(std::max(std::abs(spec[k]), cfg.log_floor));
    }
  });
  return s;
}

// Low-frame-rate stacking: row t' concatenates frames t'*factor ..
// t'*factor+factor-1; the last group is zero-padded.
inline Spectrogram lfr_stack(const Spectrogram& s, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("lfr factor must be >= 1");
  if (factor == 1) return s;
  const std::size_t t = s.frames(), f = s.bins();
  const std::size_t t_out = (t + factor - 1) / factor;
  Spectrogram out{Tensor({t_out, f * factor}), s.frame_period_ms * static_cast<double>(factor),
                  FeatureKind::kStacked};
  std::copy(s.values.data().begin(), s.values.data().end(),
            out.values.data().begin());
  return out;
}

// Utterance-level standardization to zero mean and unit variance.
inline Spectrogram normalize_utterance(const Spectrogram& s) {
  Spectrogram out = s;
  const auto& v = s.values.data();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  const double inv = 1.0 / std::sqrt(var + 1e-12);
  for (auto& x : out.values.data()) x = (x - mean) * inv;
  return out;
}

}  // namespace freqattn::features

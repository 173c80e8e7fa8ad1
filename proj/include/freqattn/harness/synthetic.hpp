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

// Synthetic band-classification corpus: each class owns a disjoint frequency
// band and every utterance is a few windowed tone bursts inside it,
// optionally over synthetic babble.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "freqattn/features/noise.hpp"
#include "freqattn/features/spectrogram.hpp"

namespace freqattn::harness {

struct SyntheticConfig {
  std::vector<std::pair<double, double>> bands_hz = {{300.0, 700.0},
                                                     {1200.0, 2000.0},
                                                     {3000.0, 4500.0}};
  std::size_t train_per_class = 40;
  std::size_t heldout_per_class = 20;
  double duration_s = 1.0;
  double sample_rate = 16000.0;
  std::size_t bursts_per_item = 3;
  double tone_amplitude = 0.3;
  double min_burst_s = 0.15;
  double max_burst_s = 0.5;
  // Constant white-noise floor, keeps silent frames off the log floor.
  double noise_floor = 1e-3;
  // Babble mixed into every item when enabled.
  bool babble = false;
  double babble_snr_db = 10.0;
  std::size_t babble_tones = 24;
  features::FeatureConfig features;

  std::size_t num_classes() const { return bands_hz.size(); }

  void validate() const {
    if (bands_hz.size() < 2) throw std::invalid_argument("need at least 2 classes");
    const double nyquist = sample_rate / 2.0;
    for (const auto& [lo, hi] : bands_hz) {
      if (!(lo > 0.0 && hi > lo && hi < nyquist)) {
        throw std::invalid_argument("band [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "] Hz is empty or out of range");
      }
    }
    auto sorted = bands_hz;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].first < sorted[i - 1].second) {
        throw std::invalid_argument("overlapping bands");
      }
    }
    if (!(tone_amplitude > 0.0)) throw std::invalid_argument("degenerate class");
    if (bursts_per_item < 1) throw std::invalid_argument("degenerate class");
    if (train_per_class + heldout_per_class == 0) throw std::invalid_argument("empty dataset");
    if (!(min_burst_s > 0.0 && max_burst_s >= min_burst_s && max_burst_s <= duration_s)) {
      throw std::invalid_argument("burst durations must satisfy 0 < min <= max <= duration");
    }
    if (babble && babble_tones < 20) {
      throw std::invalid_argument("babble needs at least 20 tones");
    }
    if (std::abs(features.sample_rate - sample_rate) > 1e-9) {
      throw std::invalid_argument("feature and synthesis sample rates differ");
    }
    features.validate();
  }
};

struct Item {
  features::Waveform wave;
  features::Spectrogram feats;  // per-utterance normalized LFBE
  std::size_t label = 0;
};

struct SyntheticDataset {
  SyntheticConfig cfg;
  std::uint64_t seed = 0;
  std::vector<Item> train;
  std::vector<Item> heldout;
  // Mel bins [first, last] whose triangular filter overlaps each class band.
  std::vector<std::pair<std::size_t, std::size_t>> class_bins;
};

// Sum of `tones` sinusoids with log-uniform carriers in 150-5000 Hz, each
// amplitude-modulated at a syllabic rate (2-8 Hz).
inline features::Waveform synth_babble(std::size_t samples, double rate, std::size_t tones,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  features::Waveform w;
  w.sample_rate = rate;
  w.samples.assign(samples, 0.0);
  for (std::size_t k = 0; k < tones; ++k) {
    const double carrier = 150.0 * std::pow(5000.0 / 150.0, unit(rng));
    const double am_rate = 2.0 + 6.0 * unit(rng);
    const double amp = 0.5 + unit(rng);
    const double ph_c = 2.0 * std::numbers::pi * unit(rng);
    const double ph_m = 2.0 * std::numbers::pi * unit(rng);
    for (std::size_t i = 0; i < samples; ++i) {
      const double t = static_cast<double>(i) / rate;
      const double env = 0.5 * (1.0 + std::sin(2.0 * std::numbers::pi * am_rate * t + ph_m));
      w.samples[i] += amp * env * std::sin(2.0 * std::numbers::pi * carrier * t + ph_c);
    }
  }
  return w;
}

// Many random tones confined to [lo, hi] Hz with no modulation.
inline features::Waveform synth_band_noise(std::size_t samples, double rate, double lo,
                                           double hi, std::uint64_t seed,
                                           std::size_t tones = 32) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  features::Waveform w;
  w.sample_rate = rate;
  w.samples.assign(samples, 0.0);
  for (std::size_t k = 0; k < tones; ++k) {
    const double f = lo + (hi - lo) * unit(rng);
    const double ph = 2.0 * std::numbers::pi * unit(rng);
    for (std::size_t i = 0; i < samples; ++i) {
      w.samples[i] += std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / rate + ph);
    }
  }
  return w;
}

inline features::Spectrogram item_features(const features::Waveform& w,
                                           const features::FeatureConfig& cfg) {
  return features::normalize_utterance(features::compute_lfbe(w, cfg));
}

inline std::vector<std::pair<std::size_t, std::size_t>> band_bins(const SyntheticConfig& cfg) {
  const features::MelFilterbank fb(cfg.features);
  const auto& c = fb.centers_hz();
  const double lo_mel = features::hz_to_mel(cfg.features.mel_low_hz);
  const double hi_mel = features::hz_to_mel(cfg.features.mel_high_hz);
  const double step = (hi_mel - lo_mel) / static_cast<double>(c.size() + 1);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [lo, hi] : cfg.bands_hz) {
    std::size_t first = c.size(), last = 0;
    for (std::size_t m = 0; m < c.size(); ++m) {
      const double left = features::mel_to_hz(features::hz_to_mel(c[m]) - step);
      const double right = features::mel_to_hz(features::hz_to_mel(c[m]) + step);
      if (right > lo && left < hi) {
        first = std::min(first, m);
        last = std::max(last, m);
      }
    }
    out.emplace_back(first, last);
  }
  return out;
}

namespace detail {

inline features::Waveform synth_item(const SyntheticConfig& cfg, std::size_t label,
                                     std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(cfg.duration_s * cfg.sample_rate);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  features::Waveform w;
  w.sample_rate = cfg.sample_rate;
  w.samples.assign(n, 0.0);
  const auto [lo, hi] = cfg.bands_hz[label];
  for (std::size_t b = 0; b < cfg.bursts_per_item; ++b) {
    const double f = lo + (hi - lo) * unit(rng);
    const double dur = cfg.min_burst_s + (cfg.max_burst_s - cfg.min_burst_s) * unit(rng);
    const auto len = static_cast<std::size_t>(dur * cfg.sample_rate);
    const auto start = static_cast<std::size_t>(unit(rng) * static_cast<double>(n - len));
    const double ph = 2.0 * std::numbers::pi * unit(rng);
    for (std::size_t i = 0; i < len; ++i) {
      const double env = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                              static_cast<double>(len));
      const double t = static_cast<double>(start + i) / cfg.sample_rate;
      w.samples[start + i] +=
          cfg.tone_amplitude * env * std::sin(2.0 * std::numbers::pi * f * t + ph);
    }
  }
  for (auto& v : w.samples) v += cfg.noise_floor * gauss(rng);
  return w;
}

}  // namespace detail

// Items alternate through the classes (label = index mod C), so both splits
// are balanced. Deterministic per (cfg, seed).
inline SyntheticDataset gen_synthetic(const SyntheticConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SyntheticDataset d;
  d.cfg = cfg;
  d.seed = seed;
  d.class_bins = band_bins(cfg);
  std::mt19937_64 rng(seed);
  const std::size_t c = cfg.num_classes();
  auto make = [&](std::size_t count, std::vector<Item>& dst) {
    for (std::size_t i = 0; i < count * c; ++i) {
      Item it;
      it.label = i % c;
      it.wave = detail::synth_item(cfg, it.label, rng);
      if (cfg.babble) {
        const auto noise = synth_babble(it.wave.samples.size(), cfg.sample_rate,
                                        cfg.babble_tones, rng());
        it.wave = features::mix_at_snr(it.wave, noise, cfg.babble_snr_db).mixed;
      }
      it.feats = item_features(it.wave, cfg.features);
      dst.push_back(std::move(it));
    }
  };
  make(cfg.train_per_class, d.train);
  make(cfg.heldout_per_class, d.heldout);
  return d;
}

}  // namespace freqattn::harness

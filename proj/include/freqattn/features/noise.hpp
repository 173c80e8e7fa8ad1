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
#include <random>
#include <stdexcept>
#include <vector>

#include "freqattn/features/types.hpp"

namespace freqattn::features {

struct MixResult {
  Waveform mixed;
  // The gain-scaled noise actually added, aligned with the clean signal.
  Waveform scaled_noise;
  double gain = 0.0;
};

// Signal-to-noise ratio 10*log10(P_clean / P_noise) in dB.
inline double measure_snr(const Waveform& clean, const Waveform& noise) {
  if (clean.samples.size() != noise.samples.size()) {
    throw std::invalid_argument("measure_snr: length mismatch");
  }
  const double pc = signal_power(clean.samples);
  const double pn = signal_power(noise.samples);
  if (!(pc > 0.0) || !(pn > 0.0)) throw std::invalid_argument("silent input");
  return 10.0 * std::log10(pc / pn);
}

// Adds noise scaled so the clean-to-noise power ratio equals snr_db. The noise
// is read circularly from a seeded random offset, which both loops short
// noise and picks a window out of long noise. Power is measured on the
// aligned segment so the realized SNR is exact.
inline MixResult mix_at_snr(const Waveform& clean, const Waveform& noise,
                            double snr_db, std::uint64_t seed = 0) {
  if (clean.sample_rate != noise.sample_rate) {
    throw std::invalid_argument("mix_at_snr: sample rate mismatch");
  }
  if (clean.samples.empty() || noise.samples.empty()) {
    throw std::invalid_argument("silent input");
  }
  const double pc = signal_power(clean.samples);
  if (!(pc > 0.0) || !(signal_power(noise.samples) > 0.0)) {
    throw std::invalid_argument("silent input");
  }
  const std::size_t n = clean.samples.size(), m = noise.samples.size();
  std::mt19937_64 rng(seed);
  const std::size_t offset =
      std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
  std::vector<double> aligned(n);
  for (std::size_t i = 0; i < n; ++i) aligned[i] = noise.samples[(offset + i) % m];
  const double pn = signal_power(aligned);
  if (!(pn > 0.0)) throw std::invalid_argument("silent input");

  MixResult res;
  res.gain = std::sqrt(pc / (pn * std::pow(10.0, snr_db / 10.0)));
  res.scaled_noise.sample_rate = clean.sample_rate;
  res.mixed.sample_rate = clean.sample_rate;
  res.scaled_noise.samples.resize(n);
  res.mixed.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.scaled_noise.samples[i] = res.gain * aligned[i];
    res.mixed.samples[i] = clean.samples[i] + res.scaled_noise.samples[i];
  }
  return res;
}

}  // namespace freqattn::features

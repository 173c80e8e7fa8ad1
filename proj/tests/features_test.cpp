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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "freqattn/features/augment.hpp"
#include "freqattn/features/io.hpp"
#include "freqattn/features/noise.hpp"
#include "freqattn/features/spectrogram.hpp"

using namespace freqattn;
using namespace freqattn::features;

namespace {

Waveform sine(double freq, double seconds, double amp = 0.5, double rate = 16000.0) {
  Waveform w;
  w.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  for (std::size_t i = 0; i < n; ++i) {
    w.samples.push_back(amp * std::sin(2.0 * std::numbers::pi * freq * i / rate));
  }
  return w;
}

Waveform white_noise(std::size_t n, std::uint64_t seed, double stddev = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, stddev);
  Waveform w;
  for (std::size_t i = 0; i < n; ++i) w.samples.push_back(d(rng));
  return w;
}

Spectrogram ramp_spectrogram(std::size_t t, std::size_t f) {
  Spectrogram s{Tensor({t, f}), 10.0, FeatureKind::kLfbe};
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = static_cast<double>(i + 1);
  return s;
}

}  // namespace

TEST(Lfbe, FrameCountForOneSecond) {
  const auto s = compute_lfbe(sine(440.0, 1.0), FeatureConfig{});
  EXPECT_EQ(s.frames(), 1 + (16000 - 400) / 160);
  EXPECT_EQ(s.frames(), 98u);
  EXPECT_EQ(s.bins(), 64u);
  EXPECT_DOUBLE_EQ(s.frame_period_ms, 10.0);
  EXPECT_EQ(s.kind, FeatureKind::kLfbe);
}

TEST(Lfbe, FrameCountFormulaOnRandomLengths) {
  std::mt19937_64 rng(4);
  const FeatureConfig cfg;
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(400, 9000)(rng);
    const auto s = compute_lfbe(white_noise(n, trial), cfg);
    EXPECT_EQ(s.frames(), 1 + (n - 400) / 160) << n;
    EXPECT_TRUE(s.values.all_finite());
  }
}

TEST(Lfbe, SilenceHitsLogFloor) {
  Waveform w;
  w.samples.assign(4000, 0.0);
  const FeatureConfig cfg;
  const auto s = compute_lfbe(w, cfg);
  for (double v : s.values.data()) EXPECT_DOUBLE_EQ(v, std::log(cfg.log_floor));
}

TEST(Lfbe, InsufficientAudio) {
  Waveform w;
  w.samples.assign(399, 0.1);
  try {
    compute_lfbe(w, FeatureConfig{});
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "insufficient audio");
  }
}

TEST(Lfbe, SampleRateMismatch) {
  auto w = sine(440.0, 0.1, 0.5, 8000.0);
  EXPECT_THROW(compute_lfbe(w, FeatureConfig{}), std::invalid_argument);
}

TEST(Lfbe, SinePeaksInNearestMelBin) {
  // Mel centres recomputed from the HTK mel formula, independent of the
  // filterbank implementation.
  auto mel = [](double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); };
  auto inv = [](double m) { return 700.0 * (std::exp(m / 1127.0) - 1.0); };
  const FeatureConfig cfg;
  std::size_t expected = 0;
  double best = 1e9;
  for (std::size_t m = 0; m < cfg.num_mel_bins; ++m) {
    const double center = inv(mel(8000.0) * (m + 1) / (cfg.num_mel_bins + 1));
    if (std::abs(center - 1000.0) < best) {
      best = std::abs(center - 1000.0);
      expected = m;
    }
  }
  const auto s = compute_lfbe(sine(1000.0, 0.5), cfg);
  std::vector<double> mean(s.bins(), 0.0);
  for (std::size_t t = 0; t < s.frames(); ++t)
    for (std::size_t f = 0; f < s.bins(); ++f) mean[f] += std::exp(s.at(t, f));
  const auto argmax = std::max_element(mean.begin(), mean.end()) - mean.begin();
  EXPECT_EQ(static_cast<std::size_t>(argmax), expected);
}

TEST(LogStft, DropsNyquistBin) {
  const auto s = compute_log_stft(sine(440.0, 0.2), FeatureConfig{});
  EXPECT_EQ(s.bins(), 256u);
  EXPECT_EQ(s.kind, FeatureKind::kLogStft);
}

TEST(LogStft, SilenceHitsLogFloor) {
  Waveform w;
  w.samples.assign(1600, 0.0);
  const FeatureConfig cfg;
  const auto s = compute_log_stft(w, cfg);
  for (double v : s.values.data()) {
    EXPECT_DOUBLE_EQ(v, std::log(cfg.log_floor));
  }
}

TEST(LogStft, FftMatchesDirectDftAndParseval) {
  const FeatureConfig cfg;
  const auto w = white_noise(2000, 17);
  const auto frame = windowed_frame(w, cfg, 3);
  const auto spec = real_fft(frame, cfg.fft_size);
  const std::size_t n = cfg.fft_size;
  for (std::size_t k = 0; k < n; k += 37) {
    std::complex<double> ref = 0.0;
    for (std::size_t i = 0; i < frame.size(); ++i) {
      ref += frame[i] * std::polar(1.0, -2.0 * std::numbers::pi * k * i / n);
    }
    EXPECT_LT(std::abs(ref - spec[k]), 1e-9 * (1.0 + std::abs(ref)));
  }
  double energy = 0.0;
  for (double v : frame) energy += v * v;
  double one_sided = std::norm(spec[0]) + std::norm(spec[n / 2]);
  for (std::size_t k = 1; k < n / 2; ++k) one_sided += 2.0 * std::norm(spec[k]);
  EXPECT_NEAR(one_sided / n, energy, 1e-6 * energy);

  // The emitted features are the log of those same magnitudes.
  const auto s = compute_log_stft(w, cfg);
  for (std::size_t k = 0; k < 256; k += 15) {
    EXPECT_NEAR(s.at(3, k), std::log(std::max(std::abs(spec[k]), cfg.log_floor)), 1e-9);
  }
}

TEST(LfrStack, ShapeAndPeriod) {
  const auto s = lfr_stack(ramp_spectrogram(9, 64), 3);
  EXPECT_EQ(s.frames(), 3u);
  EXPECT_EQ(s.bins(), 192u);
  EXPECT_DOUBLE_EQ(s.frame_period_ms, 30.0);
  EXPECT_EQ(s.kind, FeatureKind::kStacked);
}

TEST(LfrStack, FactorOneIsIdentity) {
  const auto in = ramp_spectrogram(5, 4);
  const auto out = lfr_stack(in, 1);
  EXPECT_EQ(out.values, in.values);
  EXPECT_EQ(out.frame_period_ms, in.frame_period_ms);
}

TEST(LfrStack, TailIsZeroPadded) {
  const auto in = ramp_spectrogram(10, 4);
  const auto out = lfr_stack(in, 3);
  ASSERT_EQ(out.frames(), 4u);
  ASSERT_EQ(out.bins(), 12u);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t slot = 0; slot < 3; ++slot) {
      const std::size_t frame = r * 3 + slot;
      for (std::size_t f = 0; f < 4; ++f) {
        const double expected = frame < 10 ? in.at(frame, f) : 0.0;
        EXPECT_EQ(out.at(r, slot * 4 + f), expected);
      }
    }
  }
}

TEST(LfrStack, ZeroFactorThrows) {
  EXPECT_THROW(lfr_stack(ramp_spectrogram(3, 2), 0), std::invalid_argument);
}

TEST(LfrStack, ComposesOnDivisibleLengths) {
  for (std::size_t a : {1, 2, 3}) {
    for (std::size_t b : {1, 2, 4}) {
      for (std::size_t t : {6, 12, 24, 36}) {
        if (t % a) continue;
        const auto s = ramp_spectrogram(t, 2);
        EXPECT_EQ(lfr_stack(lfr_stack(s, a), b).frames(), lfr_stack(s, a * b).frames());
      }
    }
  }
}

TEST(SpecAugment, NoMasksIsIdentity) {
  const auto s = ramp_spectrogram(20, 8);
  MaskPolicy p;
  p.num_freq_masks = p.num_time_masks = 0;
  EXPECT_EQ(spec_augment(s, p).values, s.values);
}

TEST(SpecAugment, SingleFullWidthFrequencyMask) {
  const auto s = ramp_spectrogram(20, 8);
  MaskPolicy p;
  p.num_freq_masks = 1;
  p.max_freq_width = 8;
  p.num_time_masks = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    p.seed = seed;
    const auto r = spec_augment_with_masks(s, p);
    ASSERT_EQ(r.masks.size(), 1u);
    std::vector<bool> changed(8, false);
    for (std::size_t t = 0; t < 20; ++t)
      for (std::size_t f = 0; f < 8; ++f)
        if (r.spectrogram.at(t, f) != s.at(t, f)) changed[f] = true;
    // Changed columns form one contiguous band inside the declared mask.
    for (std::size_t f = 0; f < 8; ++f) {
      if (changed[f]) {
        EXPECT_GE(f, r.masks[0].begin);
        EXPECT_LT(f, r.masks[0].end);
      }
    }
  }
}

TEST(SpecAugment, DeterministicPerSeed) {
  const auto s = ramp_spectrogram(50, 16);
  MaskPolicy p{2, 5, 2, 10, 0.4, 99};
  EXPECT_EQ(spec_augment(s, p).values, spec_augment(s, p).values);
}

TEST(SpecAugment, NeverTouchesCellsOutsideMasks) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t t = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
    const std::size_t f = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    const auto s = ramp_spectrogram(t, f);
    MaskPolicy p{3, 10, 3, 25, std::uniform_real_distribution<double>(0, 1)(rng), seed};
    const auto r = spec_augment_with_masks(s, p);
    std::size_t time_total = 0;
    for (const auto& m : r.masks) {
      EXPECT_LE(m.begin, m.end);
      EXPECT_LE(m.end, m.axis == MaskAxis::kTime ? t : f);
      if (m.axis == MaskAxis::kTime) time_total += m.end - m.begin;
    }
    EXPECT_LE(static_cast<double>(time_total), p.max_time_fraction * static_cast<double>(t));
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t j = 0; j < f; ++j) {
        bool inside = false;
        for (const auto& m : r.masks) {
          const std::size_t idx = m.axis == MaskAxis::kTime ? i : j;
          inside |= idx >= m.begin && idx < m.end;
        }
        if (inside) {
          EXPECT_EQ(r.spectrogram.at(i, j), r.fill_value);
        } else {
          EXPECT_EQ(r.spectrogram.at(i, j), s.at(i, j));
        }
      }
    }
  }
}

TEST(Snr, EqualPowerZeroDbGivesUnitGain) {
  const auto clean = sine(300.0, 0.1, 1.0);
  const auto noise = sine(700.0, 0.1, 1.0);
  const double pc = signal_power(clean.samples);
  const auto r = mix_at_snr(clean, noise, 0.0);
  const double pn = signal_power(r.scaled_noise.samples) / (r.gain * r.gain);
  EXPECT_NEAR(r.gain, std::sqrt(pc / pn), 1e-12);
  // Whole periods of both tones in 0.1 s: equal power, so gain ~ 1.
  EXPECT_NEAR(r.gain, 1.0, 1e-9);
}

TEST(Snr, TenDbGain) {
  const auto clean = sine(300.0, 0.1, 1.0);
  const auto noise = sine(700.0, 0.1, 1.0);
  EXPECT_NEAR(mix_at_snr(clean, noise, 10.0).gain, std::pow(10.0, -0.5), 1e-9);
}

TEST(Snr, SilentInputsRejected) {
  const auto clean = sine(300.0, 0.1);
  Waveform silent;
  silent.samples.assign(100, 0.0);
  try {
    mix_at_snr(clean, silent, 0.0);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "silent input");
  }
  Waveform silent_clean;
  silent_clean.samples.assign(clean.samples.size(), 0.0);
  EXPECT_THROW(measure_snr(silent_clean, clean), std::invalid_argument);
}

TEST(Snr, MeasureKnownRatios) {
  const auto clean = white_noise(5000, 1, 0.3);
  EXPECT_NEAR(measure_snr(clean, clean), 0.0, 1e-12);
  Waveform tenth = clean;
  for (auto& v : tenth.samples) v /= 10.0;
  EXPECT_NEAR(measure_snr(clean, tenth), 20.0, 1e-9);
}

TEST(Snr, RoundTripIncludingLoopedNoise) {
  const auto clean = white_noise(8000, 2, 0.2);
  const auto short_noise = white_noise(1234, 3, 0.05);
  const auto long_noise = white_noise(20000, 4, 1.5);
  for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0, 20.0}) {
    for (std::uint64_t seed : {0u, 7u}) {
      const auto a = mix_at_snr(clean, short_noise, snr, seed);
      EXPECT_NEAR(measure_snr(clean, a.scaled_noise), snr, 1e-6);
      const auto b = mix_at_snr(clean, long_noise, snr, seed);
      EXPECT_NEAR(measure_snr(clean, b.scaled_noise), snr, 1e-6);
      for (std::size_t i = 0; i < clean.samples.size(); i += 997) {
        EXPECT_DOUBLE_EQ(a.mixed.samples[i], clean.samples[i] + a.scaled_noise.samples[i]);
      }
    }
  }
}

TEST(WavIo, RoundTripAndRejection) {
  auto w = sine(440.0, 0.05, 0.8);
  std::stringstream ss;
  write_wav(ss, w);
  const auto r = read_wav(ss);
  ASSERT_EQ(r.samples.size(), w.samples.size());
  EXPECT_EQ(r.sample_rate, 16000.0);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    EXPECT_NEAR(r.samples[i], w.samples[i], 1.0 / 32768.0);
  }

  std::string bytes = ss.str();
  bytes[20] = 3;  // IEEE float format tag
  std::stringstream bad(bytes);
  EXPECT_THROW(read_wav(bad), std::runtime_error);

  std::string stereo = ss.str();
  stereo[22] = 2;
  std::stringstream bad2(stereo);
  EXPECT_THROW(read_wav(bad2), std::runtime_error);

  std::stringstream junk("RIFX....");
  EXPECT_THROW(read_wav(junk), std::runtime_error);
}

TEST(SpectrogramIo, ContainerLayout) {
  Spectrogram s{Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6.5}), 30.0, FeatureKind::kStacked};
  std::stringstream ss;
  write_spectrogram(ss, s);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u + 4 + 4 + 8 + 1 + 6 * 4);
  EXPECT_EQ(bytes.substr(0, 4), "FATN");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);
  EXPECT_EQ(static_cast<unsigned char>(bytes[20]), 2);
  const auto r = read_spectrogram(ss);
  EXPECT_EQ(r.values, s.values);
  EXPECT_EQ(r.frame_period_ms, 30.0);
  EXPECT_EQ(r.kind, FeatureKind::kStacked);

  std::stringstream bad("NOPE");
  EXPECT_THROW(read_spectrogram(bad), std::runtime_error);
}

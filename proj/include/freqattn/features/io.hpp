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
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "freqattn/features/types.hpp"
#include "freqattn/param_store.hpp"

namespace freqattn::features {

// Reads a RIFF/WAVE file holding 16-bit PCM mono audio. Samples are scaled
// to [-1, 1). Any other encoding is rejected.
inline Waveform read_wav(std::istream& is) {
  char tag[4];
  auto read_tag = [&] {
    if (!is.read(tag, 4)) throw std::runtime_error("wav: truncated header");
    return std::string(tag, 4);
  };
  if (read_tag() != "RIFF") throw std::runtime_error("wav: missing RIFF header");
  binio::read_le<std::uint32_t>(is);
  if (read_tag() != "WAVE") throw std::runtime_error("wav: missing WAVE tag");

  bool have_fmt = false;
  std::uint32_t sample_rate = 0;
  while (true) {
    const std::string id = read_tag();
    const auto size = binio::read_le<std::uint32_t>(is);
    if (id == "fmt ") {
      if (size < 16) throw std::runtime_error("wav: fmt chunk too small");
      const auto format = binio::read_le<std::uint16_t>(is);
      const auto channels = binio::read_le<std::uint16_t>(is);
      sample_rate = binio::read_le<std::uint32_t>(is);
      binio::read_le<std::uint32_t>(is);  // byte rate
      binio::read_le<std::uint16_t>(is);  // block align
      const auto bits = binio::read_le<std::uint16_t>(is);
      if (format != 1) {
        throw std::runtime_error("wav: unsupported encoding " +
                                 std::to_string(format) + " (need 16-bit PCM)");
      }
      if (channels != 1) {
        throw std::runtime_error("wav: expected mono, got " +
                                 std::to_string(channels) + " channels");
      }
      if (bits != 16) {
        throw std::runtime_error("wav: expected 16-bit samples, got " +
                                 std::to_string(bits));
      }
      if (sample_rate == 0) throw std::runtime_error("wav: zero sample rate");
      is.ignore(size - 16 + (size & 1));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw std::runtime_error("wav: data chunk before fmt");
      Waveform w;
      w.sample_rate = sample_rate;
      w.samples.resize(size / 2);
      for (auto& s : w.samples) {
        s = static_cast<double>(binio::read_le<std::int16_t>(is)) / 32768.0;
      }
      return w;
    } else {
      is.ignore(size + (size & 1));
    }
    if (!is) throw std::runtime_error("wav: no data chunk");
  }
}

inline Waveform read_wav_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_wav(is);
}

// Writes 16-bit PCM mono, clipping to [-1, 1).
inline void write_wav(std::ostream& os, const Waveform& w) {
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  const auto rate = static_cast<std::uint32_t>(std::lround(w.sample_rate));
  os.write("RIFF", 4);
  binio::write_le<std::uint32_t>(os, 36 + 2 * n);
  os.write("WAVEfmt ", 8);
  binio::write_le<std::uint32_t>(os, 16);
  binio::write_le<std::uint16_t>(os, 1);
  binio::write_le<std::uint16_t>(os, 1);
  binio::write_le<std::uint32_t>(os, rate);
  binio::write_le<std::uint32_t>(os, rate * 2);
  binio::write_le<std::uint16_t>(os, 2);
  binio::write_le<std::uint16_t>(os, 16);
  os.write("data", 4);
  binio::write_le<std::uint32_t>(os, 2 * n);
  for (double s : w.samples) {
    const double v = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    binio::write_le<std::int16_t>(os, static_cast<std::int16_t>(v));
  }
  if (!os) throw std::runtime_error("failed to write wav");
}

inline void write_wav_file(const std::string& path, const Waveform& w) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_wav(os, w);
}

// Container: "FATN", u32 T, u32 F, f64 frame_period_ms, u8 kind, then T*F
// little-endian f32 values, time-major.
inline void write_spectrogram(std::ostream& os, const Spectrogram& s) {
  os.write("FATN", 4);
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.frames()));
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.bins()));
  binio::write_le<double>(os, s.frame_period_ms);
  binio::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(s.kind));
  for (double v : s.values.data()) binio::write_le<float>(os, static_cast<float>(v));
  if (!os) throw std::runtime_error("failed to write spectrogram");
}

inline Spectrogram read_spectrogram(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "FATN", 4) != 0) {
    throw std::runtime_error("not a FATN spectrogram file");
  }
  const auto t = binio::read_le<std::uint32_t>(is);
  const auto f = binio::read_le<std::uint32_t>(is);
  Spectrogram s;
  s.frame_period_ms = binio::read_le<double>(is);
  const auto kind = binio::read_le<std::uint8_t>(is);
  if (kind > static_cast<std::uint8_t>(FeatureKind::kStacked)) {
    throw std::runtime_error("unknown feature kind " + std::to_string(kind));
  }
  s.kind = static_cast<FeatureKind>(kind);
  s.values = Tensor({t, f});
  for (auto& v : s.values.data()) v = binio::read_le<float>(is);
  return s;
}

inline void write_spectrogram_file(const std::string& path, const Spectrogram& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_spectrogram(os, s);
}

inline Spectrogram read_spectrogram_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_spectrogram(is);
}

}  // namespace freqattn::features

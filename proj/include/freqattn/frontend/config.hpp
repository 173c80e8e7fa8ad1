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
#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqattn/config_file.hpp"

namespace freqattn::frontend {

struct ViewConfig {
  std::size_t patch_time = 7;
  std::size_t patch_freq = 7;
  std::size_t stride_time = 4;
  std::size_t stride_freq = 4;
  std::size_t embed_dim = 128;

  std::size_t patch_len() const { return patch_time * patch_freq; }

  friend bool operator==(const ViewConfig&, const ViewConfig&) = default;
};

enum class LfrPlacement { kPre, kIn, kPost };
enum class MergeMode { kMax, kMean };

inline const char* placement_name(LfrPlacement p) {
  switch (p) {
    case LfrPlacement::kPre: return "pre";
    case LfrPlacement::kIn: return "in";
    case LfrPlacement::kPost: return "post";
  }
  return "?";
}

inline const char* merge_name(MergeMode m) {
  return m == MergeMode::kMax ? "max" : "mean";
}

struct FrontendConfig {
  std::vector<ViewConfig> views{ViewConfig{}};
  std::size_t num_layers = 1;
  std::size_t num_heads = 8;
  LfrPlacement lfr_placement = LfrPlacement::kPost;
  std::size_t lfr_factor = 3;
  MergeMode merge_mode = MergeMode::kMax;
  std::size_t output_dim = 512;
  // Feature bins of the unstacked input spectrogram.
  std::size_t input_bins = 64;

  std::size_t embed_dim() const { return views.front().embed_dim; }

  void validate() const {
    if (views.empty()) throw std::invalid_argument("frontend needs at least one view");
    const auto& v0 = views.front();
    for (const auto& v : views) {
      if (v.patch_time < 1 || v.patch_freq < 1 || v.stride_time < 1 ||
          v.stride_freq < 1) {
        throw std::invalid_argument("patch and stride must be >= 1");
      }
      if (v.stride_time != v0.stride_time || v.stride_freq != v0.stride_freq) {
        throw std::invalid_argument("all views must share the same stride");
      }
      if (v.embed_dim != v0.embed_dim) {
        throw std::invalid_argument("all views must share the embedding dim");
      }
    }
    if (num_heads < 1 || v0.embed_dim % num_heads != 0) {
      throw std::invalid_argument("num_heads must divide the embedding dim");
    }
    if (v0.embed_dim < 2) throw std::invalid_argument("embedding dim must be >= 2");
    if (lfr_factor < 1) throw std::invalid_argument("lfr_factor must be >= 1");
    if (output_dim < 1 || input_bins < 1) {
      throw std::invalid_argument("output_dim and input_bins must be >= 1");
    }
  }
};

// CNN baseline: `num_layers` convolutions (square kernel, stride, padding)
// with max(0, .) after each, applied after Pre-LFR stacking.
struct BaselineConfig {
  std::size_t input_bins = 64;
  std::size_t lfr_factor = 3;
  std::size_t channels = 128;
  std::size_t num_layers = 2;
  std::size_t kernel = 3;
  std::size_t stride = 2;
  std::size_t pad = 1;
  std::size_t output_dim = 512;

  void validate() const {
    if (channels < 1 || num_layers < 1 || kernel < 1 || stride < 1 ||
        output_dim < 1 || input_bins < 1 || lfr_factor < 1) {
      throw std::invalid_argument("invalid baseline configuration");
    }
  }
};

// Parses "7x7@4" (square stride) or "7x7@4x4" (time x freq).
inline ViewConfig parse_view(const std::string& text, std::size_t embed_dim) {
  auto parse_pair = [&text](const std::string& s, std::size_t& a, std::size_t& b,
                            bool allow_single) {
    const auto x = s.find_first_of("xX");
    auto to_count = [&text](const std::string& t) {
      if (t.empty() || !std::all_of(t.begin(), t.end(),
                                    [](unsigned char c) { return std::isdigit(c); })) {
        throw std::invalid_argument("bad view spec '" + text + "'");
      }
      return static_cast<std::size_t>(std::stoul(t));
    };
    if (x == std::string::npos) {
      if (!allow_single) throw std::invalid_argument("bad view spec '" + text + "'");
      a = b = to_count(trim(s));
    } else {
      a = to_count(trim(s.substr(0, x)));
      b = to_count(trim(s.substr(x + 1)));
    }
  };
  const auto at = text.find('@');
  if (at == std::string::npos) {
    throw std::invalid_argument("bad view spec '" + text + "' (expected PxQ@S)");
  }
  ViewConfig v;
  v.embed_dim = embed_dim;
  parse_pair(text.substr(0, at), v.patch_time, v.patch_freq, false);
  parse_pair(text.substr(at + 1), v.stride_time, v.stride_freq, true);
  return v;
}

inline std::string view_string(const ViewConfig& v) {
  std::string s = std::to_string(v.patch_time) + "x" + std::to_string(v.patch_freq) +
                  "@" + std::to_string(v.stride_time);
  if (v.stride_freq != v.stride_time) s += "x" + std::to_string(v.stride_freq);
  return s;
}

inline LfrPlacement parse_placement(const std::string& s) {
  if (s == "pre") return LfrPlacement::kPre;
  if (s == "in") return LfrPlacement::kIn;
  if (s == "post") return LfrPlacement::kPost;
  throw std::invalid_argument("lfr_placement must be pre, in or post");
}

inline MergeMode parse_merge(const std::string& s) {
  if (s == "max") return MergeMode::kMax;
  if (s == "mean") return MergeMode::kMean;
  throw std::invalid_argument("merge must be max or mean");
}

// Keys: views, num_layers, num_heads, embed_dim, lfr_placement, lfr_factor,
// merge, output_dim, input_bins. Missing keys take `defaults`.
inline FrontendConfig frontend_from(const KeyValueConfig& kv,
                                    const FrontendConfig& defaults = {}) {
  FrontendConfig cfg = defaults;
  const std::size_t e = kv.get_count("embed_dim", defaults.embed_dim());
  if (kv.has("views")) {
    cfg.views.clear();
    for (const auto& item : split_list(kv.get("views", ""))) {
      cfg.views.push_back(parse_view(item, e));
    }
  } else {
    for (auto& v : cfg.views) v.embed_dim = e;
  }
  cfg.num_layers = kv.get_count("num_layers", cfg.num_layers);
  cfg.num_heads = kv.get_count("num_heads", cfg.num_heads);
  cfg.lfr_placement = parse_placement(kv.get("lfr_placement", placement_name(cfg.lfr_placement)));
  cfg.lfr_factor = kv.get_count("lfr_factor", cfg.lfr_factor);
  cfg.merge_mode = parse_merge(kv.get("merge", merge_name(cfg.merge_mode)));
  cfg.output_dim = kv.get_count("output_dim", cfg.output_dim);
  cfg.input_bins = kv.get_count("input_bins", cfg.input_bins);
  cfg.validate();
  return cfg;
}

inline std::string describe(const FrontendConfig& cfg) {
  std::string views;
  for (const auto& v : cfg.views) {
    if (!views.empty()) views += ",";
    views += view_string(v);
  }
  return "views=" + views + " layers=" + std::to_string(cfg.num_layers) +
         " heads=" + std::to_string(cfg.num_heads) +
         " E=" + std::to_string(cfg.embed_dim()) +
         " lfr=" + placement_name(cfg.lfr_placement) + "x" +
         std::to_string(cfg.lfr_factor) + " merge=" + merge_name(cfg.merge_mode) +
         " D=" + std::to_string(cfg.output_dim);
}

// Full-scale settings: 64-bin LFBE, stride 4x4, E=128, 8 heads, D=512,
// Post-LFR x3, max pooling. The view sets follow the 1/2/4-view setups
// (7x7; 7x7,14x14; 3x3,7x7,14x14,28x28).
inline FrontendConfig full_preset(std::size_t layers, std::size_t num_views) {
  FrontendConfig cfg;
  std::vector<std::size_t> patches;
  switch (num_views) {
    case 1: patches = {7}; break;
    case 2: patches = {7, 14}; break;
    case 4: patches = {3, 7, 14, 28}; break;
    default: throw std::invalid_argument("presets exist for 1, 2 or 4 views");
  }
  cfg.views.clear();
  for (auto p : patches) cfg.views.push_back({p, p, 4, 4, 128});
  cfg.num_layers = layers;
  cfg.num_heads = 8;
  cfg.lfr_placement = LfrPlacement::kPost;
  cfg.lfr_factor = 3;
  cfg.merge_mode = MergeMode::kMax;
  cfg.output_dim = 512;
  cfg.input_bins = 64;
  return cfg;
}

// Layers/views combinations audited at full scale.
inline std::vector<std::pair<std::size_t, std::size_t>> full_layer_view_grid() {
  return {{1, 1}, {1, 2}, {1, 4}, {2, 1}, {4, 1}, {2, 2}};
}

inline BaselineConfig full_baseline() { return BaselineConfig{}; }

// Desk-scale defaults used by the toy harness: E=32, 4 heads, D=64.
inline FrontendConfig desk_preset() {
  FrontendConfig cfg;
  cfg.views = {ViewConfig{7, 7, 4, 4, 32}};
  cfg.num_layers = 1;
  cfg.num_heads = 4;
  cfg.lfr_placement = LfrPlacement::kPost;
  cfg.lfr_factor = 3;
  cfg.merge_mode = MergeMode::kMax;
  cfg.output_dim = 64;
  cfg.input_bins = 64;
  return cfg;
}

inline BaselineConfig desk_baseline() {
  BaselineConfig b;
  b.channels = 32;
  b.output_dim = 64;
  return b;
}

inline FrontendConfig named_preset(const std::string& name) {
  if (name == "desk") return desk_preset();
  if (name == "full-1v") return full_preset(1, 1);
  if (name == "full-2v") return full_preset(1, 2);
  if (name == "full-4v") return full_preset(1, 4);
  if (name == "full-2l2v") return full_preset(2, 2);
  throw std::invalid_argument("unknown preset " + name);
}

}  // namespace freqattn::frontend

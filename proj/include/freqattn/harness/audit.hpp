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

// Parameter counts, shapes, frame periods and structural invariants for the
// frontend presets.

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "freqattn/attribution/report.hpp"
#include "freqattn/frontend/analysis.hpp"
#include "freqattn/frontend/invariants.hpp"

namespace freqattn::harness {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

struct AuditRow {
  std::string name;
  std::string description;
  std::size_t params = 0;
  std::size_t registered = 0;
  std::size_t input_frames = 0;
  std::size_t out_frames = 0;
  std::size_t out_dim = 0;
  double frame_period_ms = 0.0;
  frontend::ReceptiveField rf_time{0, 0};
};

struct AuditReport {
  std::vector<AuditRow> rows;
  std::vector<Check> checks;
};

inline constexpr double kReferenceBaselineParams = 3.3e6;

// Attention-layer groups ("view{v}/layer{l}") present in a store.
inline std::size_t registered_layer_groups(const ParamStore& store) {
  std::set<std::string> groups;
  for (const auto& e : store.entries()) {
    const auto pos = e.name.find("/layer");
    if (pos != std::string::npos) groups.insert(e.name.substr(0, e.name.find('/', pos + 1)));
  }
  return groups.size();
}

inline AuditRow audit_attention(const std::string& name, const frontend::FrontendConfig& cfg,
                                std::size_t frames, std::uint64_t seed,
                                ParamStore* keep = nullptr) {
  std::mt19937_64 rng(seed);
  ParamStore store;
  frontend::register_frontend(store, cfg, rng);
  features::Spectrogram s{random_normal({frames, cfg.input_bins}, rng, 1.0), 10.0,
                          features::FeatureKind::kLfbe};
  const auto seq = frontend::frontend_forward(nullptr, s, cfg, store);
  AuditRow r;
  r.name = name;
  r.description = frontend::describe(cfg);
  r.params = frontend::count_params(cfg);
  r.registered = store.num_scalars();
  r.input_frames = frames;
  r.out_frames = seq.frames();
  r.out_dim = seq.dim();
  r.frame_period_ms = seq.frame_period_ms;
  const auto v = frontend::effective_view(cfg.views.front(), cfg);
  r.rf_time = frontend::receptive_field({{v.patch_time, v.stride_time}});
  if (keep) *keep = std::move(store);
  return r;
}

inline AuditRow audit_baseline(const std::string& name, const frontend::BaselineConfig& cfg,
                               std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParamStore store;
  frontend::register_baseline(store, cfg, rng);
  features::Spectrogram s{random_normal({frames, cfg.input_bins}, rng, 1.0), 10.0,
                          features::FeatureKind::kLfbe};
  const auto seq = frontend::cnn_frontend_forward(nullptr, s, cfg, store);
  AuditRow r;
  r.name = name;
  r.description = "cnn channels=" + std::to_string(cfg.channels) +
                  " layers=" + std::to_string(cfg.num_layers) +
                  " kernel=" + std::to_string(cfg.kernel) + " stride=" +
                  std::to_string(cfg.stride) + " lfr=pre" + "x" +
                  std::to_string(cfg.lfr_factor) + " D=" + std::to_string(cfg.output_dim);
  r.params = frontend::count_params(cfg);
  r.registered = store.num_scalars();
  r.input_frames = frames;
  r.out_frames = seq.frames();
  r.out_dim = seq.dim();
  r.frame_period_ms = seq.frame_period_ms;
  r.rf_time = frontend::receptive_field(
      std::vector<frontend::KernelStride>(cfg.num_layers, {cfg.kernel, cfg.stride}));
  return r;
}

// Receptive-field equivalence and LFR-placement agreement.
inline std::vector<Check> equivalence_checks(std::uint64_t seed) {
  std::vector<Check> out;
  {
    const auto rf = frontend::receptive_field({{3, 2}, {3, 2}});
    const frontend::ViewConfig v;
    out.push_back({"receptive_field_two_convs_eq_default_view",
                   rf == frontend::ReceptiveField{7, 4} && rf.size == v.patch_time &&
                       rf.stride == v.stride_time,
                   "(" + std::to_string(rf.size) + "," + std::to_string(rf.stride) + ")"});
  }
  {
    bool ok = true;
    for (std::size_t n = 1; n <= 256 && ok; ++n) {
      ok = frontend::grid_extent(n, 4) ==
           frontend::conv_out_extent(frontend::conv_out_extent(n, 3, 2, 1), 3, 2, 1);
    }
    out.push_back({"stride4_grid_eq_two_stride2_convs_n1_256", ok, ""});
  }
  {
    std::mt19937_64 rng(seed);
    auto cfg = frontend::desk_preset();
    cfg.views.front().embed_dim = 8;
    cfg.num_heads = 2;
    cfg.output_dim = 8;
    features::Spectrogram s{random_normal({96, cfg.input_bins}, rng, 1.0), 10.0,
                            features::FeatureKind::kLfbe};
    std::vector<std::size_t> frames, dims;
    std::vector<double> periods;
    std::string detail;
    for (auto place : {frontend::LfrPlacement::kPre, frontend::LfrPlacement::kIn,
                       frontend::LfrPlacement::kPost}) {
      cfg.lfr_placement = place;
      ParamStore store;
      frontend::register_frontend(store, cfg, rng);
      const auto seq = frontend::frontend_forward(nullptr, s, cfg, store);
      frames.push_back(seq.frames());
      dims.push_back(seq.dim());
      periods.push_back(seq.frame_period_ms);
      detail += std::string(detail.empty() ? "" : " ") + frontend::placement_name(place) + ":" +
                std::to_string(seq.frames()) + "x" + std::to_string(seq.dim()) + "@" +
                attribution::format_sig9(seq.frame_period_ms) + "ms";
    }
    const bool eq = std::all_of(frames.begin(), frames.end(), [](auto f) { return f == 8; }) &&
                    std::all_of(dims.begin(), dims.end(), [&](auto d) { return d == dims[0]; });
    out.push_back({"lfr_placements_T96_give_T_out_8", eq, detail});
    out.push_back({"lfr_placements_equal_frame_period",
                   std::all_of(periods.begin(), periods.end(),
                               [&](double p) { return p == periods[0]; }),
                   detail});
  }
  return out;
}

inline AuditReport run_audit(std::uint64_t seed, std::size_t frames = 98) {
  AuditReport rep;
  std::size_t lo = SIZE_MAX, hi = 0;
  bool counts_match = true, shapes_ok = true;
  std::size_t groups_2l2v = 0;
  for (const auto& [layers, views] : frontend::full_layer_view_grid()) {
    const auto cfg = frontend::full_preset(layers, views);
    const std::string name = "full-" + std::to_string(layers) + "l" + std::to_string(views) + "v";
    ParamStore store;
    auto row = audit_attention(name, cfg, frames, seed, &store);
    if (layers == 2 && views == 2) groups_2l2v = registered_layer_groups(store);
    lo = std::min(lo, row.params);
    hi = std::max(hi, row.params);
    counts_match &= row.params == row.registered;
    shapes_ok &= row.out_frames == frontend::output_frames(cfg, frames) &&
                 row.out_dim == cfg.output_dim;
    rep.rows.push_back(std::move(row));
  }
  const auto base = audit_baseline("full-baseline", frontend::full_baseline(), frames, seed);
  counts_match &= base.params == base.registered;
  rep.rows.push_back(base);
  rep.rows.push_back(audit_attention("desk", frontend::desk_preset(), frames, seed));
  rep.rows.push_back(audit_baseline("desk-baseline", frontend::desk_baseline(), frames, seed));
  for (const auto& r : rep.rows) counts_match &= r.params == r.registered;

  const double base_dev = std::abs(static_cast<double>(base.params) - kReferenceBaselineParams) /
                          kReferenceBaselineParams;
  rep.checks.push_back({"baseline_params_within_10pct_of_3.3M", base_dev <= 0.10,
                        std::to_string(base.params) + " (" +
                            attribution::format_sig9(100.0 * base_dev) + "% off)"});
  const double ratio = static_cast<double>(hi) / static_cast<double>(lo);
  rep.checks.push_back({"preset_param_max_min_ratio_le_1.15", ratio <= 1.15,
                        std::to_string(lo) + ".." + std::to_string(hi) + " ratio " +
                            attribution::format_sig9(ratio)});
  rep.checks.push_back({"2l2v_registers_4_attention_groups", groups_2l2v == 4,
                        std::to_string(groups_2l2v)});
  rep.checks.push_back({"count_params_matches_registered_scalars", counts_match, ""});
  rep.checks.push_back({"output_shapes_match_output_frames", shapes_ok, ""});
  for (auto& c : equivalence_checks(seed)) rep.checks.push_back(std::move(c));

  Check loc{"time_locality_10_instances", true, ""};
  Check glob{"frequency_globality_10_instances", true, ""};
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto a = frontend::check_time_locality(seed + s);
    const auto b = frontend::check_frequency_globality(seed + s);
    if (!a.passed && loc.passed) loc = {loc.name, false, a.detail};
    if (!b.passed && glob.passed) glob = {glob.name, false, b.detail};
  }
  rep.checks.push_back(loc);
  rep.checks.push_back(glob);
  return rep;
}

inline std::string audit_csv(const AuditReport& r) {
  std::ostringstream os;
  os << "name,params,input_frames,out_frames,out_dim,frame_period_ms,rf_time_size,"
        "rf_time_stride,description\n";
  for (const auto& row : r.rows) {
    os << row.name << ',' << row.params << ',' << row.input_frames << ',' << row.out_frames
       << ',' << row.out_dim << ',' << attribution::format_sig9(row.frame_period_ms) << ','
       << row.rf_time.size << ',' << row.rf_time.stride << ",\"" << row.description << "\"\n";
  }
  return os.str();
}

inline std::string checks_csv(const std::vector<Check>& checks) {
  std::ostringstream os;
  os << "check,passed,detail\n";
  for (const auto& c : checks) {
    os << c.name << ',' << (c.passed ? "true" : "false") << ",\"" << c.detail << "\"\n";
  }
  return os.str();
}

}  // namespace freqattn::harness

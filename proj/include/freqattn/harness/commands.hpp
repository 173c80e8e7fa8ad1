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

// Command implementations behind the freqattn CLI. Each command writes its
// reports into an output directory (CSV files plus summary.json with
// command, config_hash, seed, metrics and invariants) and returns 0 only when
// every asserted invariant holds.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "freqattn/attribution/alti.hpp"
#include "freqattn/attribution/examples.hpp"
#include "freqattn/attribution/report.hpp"
#include "freqattn/config_file.hpp"
#include "freqattn/features/io.hpp"
#include "freqattn/harness/audit.hpp"
#include "freqattn/harness/gradcheck.hpp"
#include "freqattn/harness/sweep.hpp"
#include "freqattn/harness/synthetic.hpp"
#include "freqattn/harness/toy.hpp"

namespace freqattn::harness {

using Json = nlohmann::json;

// Everything a run depends on, with desk-scale defaults.
struct RunConfig {
  frontend::FrontendConfig attention = frontend::desk_preset();
  frontend::BaselineConfig baseline = frontend::desk_baseline();
  SyntheticConfig data;
  TrainConfig train;
  SweepConfig sweep;
  std::vector<std::string> models = {"fattention", "baseline"};

  static RunConfig from_kv(const KeyValueConfig& kv) {
    RunConfig rc;
    if (kv.has("preset")) rc.attention = frontend::named_preset(kv.get("preset", ""));
    rc.attention = frontend::frontend_from(kv, rc.attention);

    auto& b = rc.baseline;
    b.channels = kv.get_count("baseline.channels", b.channels);
    b.num_layers = kv.get_count("baseline.num_layers", b.num_layers);
    b.lfr_factor = kv.get_count("baseline.lfr_factor", b.lfr_factor);
    b.output_dim = kv.get_count("baseline.output_dim", b.output_dim);
    b.input_bins = rc.attention.input_bins;
    b.validate();

    auto& d = rc.data;
    if (kv.has("data.bands_hz")) {
      d.bands_hz.clear();
      for (const auto& item : split_list(kv.get("data.bands_hz", ""))) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
          throw std::invalid_argument("data.bands_hz entries must look like 300-700");
        }
        KeyValueConfig tmp;
        tmp.set("lo", trim(item.substr(0, dash)));
        tmp.set("hi", trim(item.substr(dash + 1)));
        d.bands_hz.emplace_back(tmp.get_real("lo", 0.0), tmp.get_real("hi", 0.0));
      }
    }
    d.train_per_class = kv.get_count("data.train_per_class", d.train_per_class);
    d.heldout_per_class = kv.get_count("data.heldout_per_class", d.heldout_per_class);
    d.duration_s = kv.get_real("data.duration_s", d.duration_s);
    d.bursts_per_item = kv.get_count("data.bursts_per_item", d.bursts_per_item);
    d.tone_amplitude = kv.get_real("data.tone_amplitude", d.tone_amplitude);
    d.noise_floor = kv.get_real("data.noise_floor", d.noise_floor);
    d.babble = kv.get_count("data.babble", d.babble ? 1 : 0) != 0;
    d.babble_snr_db = kv.get_real("data.babble_snr_db", d.babble_snr_db);
    d.babble_tones = kv.get_count("data.babble_tones", d.babble_tones);
    d.features.num_mel_bins = rc.attention.input_bins;

    auto& t = rc.train;
    t.steps = kv.get_count("train.steps", t.steps);
    t.batch = kv.get_count("train.batch", t.batch);
    t.schedule.peak_lr = kv.get_real("train.peak_lr", t.schedule.peak_lr);
    t.schedule.warmup_steps = kv.get_count("train.warmup_steps", t.schedule.warmup_steps);
    t.schedule.decay_rate = kv.get_real("train.decay_rate", t.schedule.decay_rate);
    t.schedule.decay_every = kv.get_count("train.decay_every", t.schedule.decay_every);
    t.augment = kv.get_count("train.augment", t.augment ? 1 : 0) != 0;

    auto& s = rc.sweep;
    s.snrs_db = kv.get_reals("sweep.snrs_db", s.snrs_db);
    s.band_lo_hz = kv.get_real("sweep.band_lo_hz", s.band_lo_hz);
    s.band_hi_hz = kv.get_real("sweep.band_hi_hz", s.band_hi_hz);
    s.band_snr_db = kv.get_real("sweep.band_snr_db", s.band_snr_db);
    s.babble_tones = kv.get_count("sweep.babble_tones", s.babble_tones);

    if (kv.has("models")) rc.models = split_list(kv.get("models", ""));
    for (const auto& m : rc.models) {
      if (m != "fattention" && m != "baseline") {
        throw std::invalid_argument("models: unknown model " + m);
      }
    }
    rc.data.validate();
    rc.train.schedule.validate();
    return rc;
  }

  // Effective settings in canonical key order; hashed into reports.
  std::string canonical() const {
    using attribution::format_sig9;
    KeyValueConfig kv;
    kv.set("frontend", frontend::describe(attention));
    kv.set("input_bins", std::to_string(attention.input_bins));
    kv.set("baseline", "channels=" + std::to_string(baseline.channels) +
                           " layers=" + std::to_string(baseline.num_layers) +
                           " lfr=" + std::to_string(baseline.lfr_factor) +
                           " D=" + std::to_string(baseline.output_dim));
    std::string bands;
    for (const auto& [lo, hi] : data.bands_hz) {
      bands += (bands.empty() ? "" : ",") + format_sig9(lo) + "-" + format_sig9(hi);
    }
    kv.set("data", "bands=" + bands + " train=" + std::to_string(data.train_per_class) +
                       " heldout=" + std::to_string(data.heldout_per_class) +
                       " dur=" + format_sig9(data.duration_s) +
                       " bursts=" + std::to_string(data.bursts_per_item) +
                       " amp=" + format_sig9(data.tone_amplitude) +
                       " floor=" + format_sig9(data.noise_floor) +
                       " babble=" + std::to_string(data.babble) + "@" +
                       format_sig9(data.babble_snr_db) + "/" +
                       std::to_string(data.babble_tones));
    kv.set("train", "steps=" + std::to_string(train.steps) +
                        " batch=" + std::to_string(train.batch) +
                        " lr=" + format_sig9(train.schedule.peak_lr) +
                        " warmup=" + std::to_string(train.schedule.warmup_steps) +
                        " decay=" + format_sig9(train.schedule.decay_rate) + "/" +
                        std::to_string(train.schedule.decay_every) +
                        " augment=" + std::to_string(train.augment));
    std::string snrs;
    for (double s : sweep.snrs_db) snrs += (snrs.empty() ? "" : ",") + format_sig9(s);
    kv.set("sweep", "snrs=" + snrs + " band=" + format_sig9(sweep.band_lo_hz) + "-" +
                        format_sig9(sweep.band_hi_hz) + "@" + format_sig9(sweep.band_snr_db) +
                        " tones=" + std::to_string(sweep.babble_tones));
    std::string ms;
    for (const auto& m : models) ms += (ms.empty() ? "" : ",") + m;
    kv.set("models", ms);
    return kv.canonical();
  }

  std::string hash() const { return hex64(fnv1a64(canonical())); }
};

struct CommandOptions {
  std::string config_path;  // empty: defaults
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  // features / attribute
  std::string wav;
  std::string kind = "lfbe";
  std::size_t lfr = 1;
  // attribute / sweep-snr
  std::string checkpoint;
  std::string time = "0";
  std::string example;
  std::ostream* log = &std::cout;
};

namespace detail {

inline RunConfig load_run_config(const CommandOptions& o) {
  return o.config_path.empty() ? RunConfig::from_kv(KeyValueConfig{})
                               : RunConfig::from_kv(KeyValueConfig::load(o.config_path));
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("I/O failure writing " + p.string());
}

inline Json checks_json(const std::vector<Check>& checks) {
  Json j = Json::object();
  for (const auto& c : checks) j[c.name] = c.passed;
  return j;
}

// summary.json plus checks.csv; returns the exit code.
inline int finish(const std::filesystem::path& dir, const std::string& command,
                  const std::string& config_hash, std::uint64_t seed, Json metrics,
                  const std::vector<Check>& checks, std::ostream& log) {
  Json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["metrics"] = std::move(metrics);
  j["invariants"] = checks_json(checks);
  j["passed"] = all_passed(checks);
  write_text(dir / "summary.json", j.dump(2) + "\n");
  write_text(dir / "checks.csv", checks_csv(checks));
  for (const auto& c : checks) {
    log << (c.passed ? "[PASS] " : "[FAIL] ") << c.name
        << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
  }
  return all_passed(checks) ? 0 : 1;
}

inline std::filesystem::path prepare_dir(const std::string& out) {
  std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<ToyModel> build_models(const RunConfig& rc, std::uint64_t seed) {
  std::vector<ToyModel> models;
  const std::size_t classes = rc.data.num_classes();
  for (const auto& name : rc.models) {
    if (name == "fattention") {
      models.push_back(make_attention_model(rc.attention, classes, seed + 1, name));
    } else {
      models.push_back(make_baseline_model(rc.baseline, classes, seed + 2, name));
    }
  }
  return models;
}

inline double trailing_mean(const std::vector<double>& v, std::size_t n) {
  n = std::min(n, v.size());
  double s = 0.0;
  for (std::size_t i = v.size() - n; i < v.size(); ++i) s += v[i];
  return n ? s / static_cast<double>(n) : 0.0;
}

struct TrainedModels {
  std::vector<ToyModel> models;
  std::vector<TrainResult> results;
};

inline TrainedModels train_all(const RunConfig& rc, const SyntheticDataset& d,
                               std::uint64_t seed, std::ostream& log) {
  TrainedModels out;
  out.models = build_models(rc, seed);
  TrainConfig tc = rc.train;
  tc.seed = seed + 3;
  for (auto& m : out.models) {
    log << "training " << m.name << " (" << m.params.num_scalars() << " params, "
        << tc.steps << " steps)\n";
    out.results.push_back(train_toy(m, d, tc));
  }
  return out;
}

inline std::pair<std::size_t, std::size_t> parse_time_range(const std::string& s) {
  const auto colon = s.find(':');
  KeyValueConfig kv;
  if (colon == std::string::npos) {
    kv.set("t", s);
    const auto t = kv.get_count("t", 0);
    return {t, t + 1};
  }
  kv.set("a", s.substr(0, colon));
  kv.set("b", s.substr(colon + 1));
  const auto a = kv.get_count("a", 0), b = kv.get_count("b", 0);
  if (b <= a) throw std::invalid_argument("--time range must be a:b with b > a");
  return {a, b};
}

}  // namespace detail

// WAV (or one synthetic utterance) -> feature file.
inline int cmd_features(const CommandOptions& o) {
  const auto rc = detail::load_run_config(o);
  const auto dir = detail::prepare_dir(o.out_dir);
  features::Waveform w;
  if (!o.wav.empty()) {
    w = features::read_wav_file(o.wav);
  } else {
    auto cfg = rc.data;
    cfg.train_per_class = 1;
    cfg.heldout_per_class = 0;
    w = gen_synthetic(cfg, o.seed).train.front().wave;
    features::write_wav_file((dir / "input.wav").string(), w);
  }
  features::FeatureConfig fc = rc.data.features;
  features::Spectrogram s;
  if (o.kind == "lfbe") {
    s = features::compute_lfbe(w, fc);
  } else if (o.kind == "stft") {
    s = features::compute_log_stft(w, fc);
  } else {
    throw std::invalid_argument("--kind must be lfbe or stft");
  }
  const std::size_t frames = s.frames();
  if (o.lfr > 1) s = features::lfr_stack(s, o.lfr);
  features::write_spectrogram_file((dir / "features.fatn").string(), s);

  std::ostringstream csv;
  for (std::size_t t = 0; t < s.frames(); ++t) {
    for (std::size_t f = 0; f < s.bins(); ++f) {
      csv << (f ? "," : "") << attribution::format_sig9(s.at(t, f));
    }
    csv << '\n';
  }
  detail::write_text(dir / "features.csv", csv.str());

  const std::size_t expected =
      1 + (w.samples.size() - fc.window_samples()) / fc.shift_samples();
  std::vector<Check> checks = {
      {"features_finite", s.values.all_finite(), ""},
      {"frame_count_formula", frames == expected,
       std::to_string(frames) + " vs " + std::to_string(expected)},
  };
  Json m;
  m["frames"] = s.frames();
  m["bins"] = s.bins();
  m["frame_period_ms"] = s.frame_period_ms;
  m["kind"] = features::feature_kind_name(s.kind);
  m["samples"] = w.samples.size();
  return detail::finish(dir, "features", rc.hash(), o.seed, m, checks, *o.log);
}

inline int cmd_audit(const CommandOptions& o) {
  const auto rc = detail::load_run_config(o);
  const auto dir = detail::prepare_dir(o.out_dir);
  const auto rep = run_audit(o.seed);
  detail::write_text(dir / "audit.csv", audit_csv(rep));
  Json m = Json::object();
  for (const auto& r : rep.rows) {
    m[r.name] = {{"params", r.params},
                 {"out_frames", r.out_frames},
                 {"out_dim", r.out_dim},
                 {"frame_period_ms", r.frame_period_ms},
                 {"rf_time", {r.rf_time.size, r.rf_time.stride}}};
  }
  return detail::finish(dir, "audit", rc.hash(), o.seed, m, rep.checks, *o.log);
}

inline int cmd_equiv(const CommandOptions& o) {
  const auto rc = detail::load_run_config(o);
  const auto dir = detail::prepare_dir(o.out_dir);
  const auto checks = equivalence_checks(o.seed);
  detail::write_text(dir / "equiv.csv", checks_csv(checks));
  const auto rf = frontend::receptive_field({{3, 2}, {3, 2}});
  Json m;
  m["receptive_field_two_convs"] = {rf.size, rf.stride};
  return detail::finish(dir, "equiv", rc.hash(), o.seed, m, checks, *o.log);
}

inline int cmd_gradcheck(const CommandOptions& o) {
  const auto rc = detail::load_run_config(o);
  const auto dir = detail::prepare_dir(o.out_dir);
  std::ostringstream csv;
  csv << "config,coordinates,max_rel_error,worst_param,worst_index\n";
  std::vector<Check> checks;
  Json m = Json::object();
  for (const auto& [layers, views] :
       std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}}) {
    const std::string name = std::to_string(layers) + "l" + std::to_string(views) + "v";
    const auto r = gradcheck_toy(gradcheck_config(layers, views), 24, o.seed);
    csv << name << ',' << r.coordinates << ',' << attribution::format_sig9(r.max_rel_error)
        << ',' << r.worst_param << ',' << r.worst_index << '\n';
    m[name] = {{"max_rel_error", r.max_rel_error}, {"coordinates", r.coordinates}};
    checks.push_back({"gradcheck_" + name + "_lt_1e-4", r.max_rel_error < 1e-4,
                      attribution::format_sig9(r.max_rel_error) + " at " + r.worst_param});
  }
  detail::write_text(dir / "gradcheck.csv", csv.str());
  return detail::finish(dir, "gradcheck", rc.hash(), o.seed, m, checks, *o.log);
}

inline int cmd_train(const CommandOptions& o) {
  const auto rc = detail::load_run_config(o);
  const auto dir = detail::prepare_dir(o.out_dir);
  const auto data = gen_synthetic(rc.data, o.seed);
  auto trained = detail::train_all(rc, data, o.seed, *o.log);

  std::ostringstream csv;
  csv << "model,step,loss\n";
  Json m = Json::object();
  std::vector<Check> checks;
  for (std::size_t k = 0; k < trained.models.size(); ++k) {
    const auto& model = trained.models[k];
    const auto& r = trained.results[k];
    for (std::size_t s = 0; s < r.losses.size(); ++s) {
      csv << model.name << ',' << s << ',' << attribution::format_sig9(r.losses[s]) << '\n';
    }
    model.params.save_file((dir / (model.name + ".ckpt")).string());
    const double tail = detail::trailing_mean(r.losses, 50);
    m[model.name] = {{"params", model.params.num_scalars()},
                     {"initial_accuracy", r.initial_accuracy},
                     {"heldout_accuracy", r.heldout_accuracy},
                     {"initial_loss", r.losses.empty() ? 0.0 : r.losses.front()},
                     {"trailing50_loss", tail}};
    if (!r.losses.empty()) {
      checks.push_back({model.name + "_trailing50_loss_below_initial", tail < r.losses.front(),
                        attribution::format_sig9(tail) + " vs " +
                            attribution::format_sig9(r.losses.front())});
    }
    *o.log << model.name << ": held-out accuracy "
           << attribution::format_sig9(r.heldout_accuracy) << "\n";
  }
  detail::write_text(dir / "train_loss.csv", csv.str());
  detail::write_text(dir / "config.effective", rc.canonical());
  return detail::finish(dir, "train", rc.hash(), o.seed, m, checks, *o.log);
}

// Trains (or loads from --checkpoint <dir>) every model, then sweeps.
inline int cmd_sweep_snr(const CommandOptions& o) {
  auto rc = detail::load_run_config(o);
  const auto dir = detail::prepare_dir(o.out_dir);
  if (std::find(rc.models.begin(), rc.models.end(), "baseline") == rc.models.end()) {
    throw std::invalid_argument("sweep-snr needs the baseline among the models");
  }
  const auto data = gen_synthetic(rc.data, o.seed);
  std::vector<ToyModel> models;
  if (o.checkpoint.empty()) {
    models = detail::train_all(rc, data, o.seed, *o.log).models;
  } else {
    models = detail::build_models(rc, o.seed);
    for (auto& m : models) {
      restore_params(m, ParamStore::load_file(
                            (std::filesystem::path(o.checkpoint) / (m.name + ".ckpt")).string()));
    }
  }
  std::vector<const ToyModel*> ptrs;
  for (const auto& m : models) ptrs.push_back(&m);
  SweepConfig sc = rc.sweep;
  sc.noise_seed = o.seed + 4;
  const auto rep = snr_sweep(ptrs, "baseline", data, sc);
  detail::write_text(dir / "sweep.csv", sweep_csv(rep));

  const auto sw = check_sweep(rep, sc);
  std::vector<Check> checks = {
      {"baseline_row_every_snr", sw.baseline_every_snr, ""},
      {"baseline_vs_itself_delta_zero", sw.baseline_delta_zero, ""},
      {"accuracy_minus10_le_plus20", sw.monotone, ""},
      {"band_condition_reported", rep.find("baseline", "band", sc.band_snr_db) != nullptr, ""},
  };
  Json m = Json::object();
  for (const auto& row : rep.rows) {
    const std::string key = row.condition == "clean"
                                ? "clean"
                                : row.condition + "@" + attribution::format_sig9(row.snr_db);
    m[row.model][key] = row.accuracy;
  }
  return detail::finish(dir, "sweep-snr", rc.hash(), o.seed, m, checks, *o.log);
}

// Contributions of one F-Attention layer (view 0, layer 0) for the time
// columns in --time (t or a:b), or of a constructed example.
inline int cmd_attribute(const CommandOptions& o) {
  const auto rc = detail::load_run_config(o);
  const auto dir = detail::prepare_dir(o.out_dir);
  std::vector<Check> checks;
  Json m = Json::object();

  auto analyse = [&](const std::string& tag, const Tensor& tokens,
                     const frontend::AttnLayerParams& layer) {
    const auto d = attribution::transformed_vectors(tokens, layer);
    const auto c = attribution::contributions_from(d);
    attribution::emit_contribution_report(c, (dir / ("contributions_" + tag + ".csv")).string());
    bool stochastic = true;
    for (std::size_t i = 0; i < c.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) {
        stochastic &= c.at(i, j) >= 0.0;
        s += c.at(i, j);
      }
      stochastic &= std::abs(s - 1.0) <= 1e-6;
    }
    double err = 0.0, scale = 0.0;
    const std::size_t n = d.tokens, e = d.embed_dim;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < e; ++k) {
        double s = d.pre_bias[k];
        for (std::size_t j = 0; j < n; ++j) s += d.pre_vec(i, j)[k];
        err = std::max(err, std::abs(s - d.pre_norm_output.at(i, k)));
        scale = std::max(scale, std::abs(d.pre_norm_output.at(i, k)));
      }
    }
    const double rel = err / std::max(scale, 1e-300);
    checks.push_back({tag + "_row_stochastic", stochastic, ""});
    checks.push_back({tag + "_reconstruction_lt_1e-10", rel < 1e-10, attribution::format_sig9(rel)});
    std::vector<double> mass;
    std::size_t degenerate = 0;
    for (std::size_t j = 0; j < c.size(); ++j) mass.push_back(c.column_mass(j));
    for (bool b : c.degenerate_rows) degenerate += b;
    m[tag] = {{"column_mass", mass}, {"degenerate_rows", degenerate}, {"reconstruction_rel", rel}};
    return c;
  };

  if (o.example == "mask-fill") {
    const auto ex = attribution::mask_fill_example(o.seed);
    const auto c = analyse("mask_fill", ex.tokens, ex.layer);
    double mx = 0.0, masked = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) mx = std::max(mx, c.column_mass(j));
    for (std::size_t j : ex.masked) masked = std::max(masked, c.column_mass(j));
    checks.push_back({"masked_column_mass_lt_5pct_of_max", masked < 0.05 * mx,
                      attribution::format_sig9(masked) + " vs max " +
                          attribution::format_sig9(mx)});
    return detail::finish(dir, "attribute", rc.hash(), o.seed, m, checks, *o.log);
  }
  if (!o.example.empty()) throw std::invalid_argument("unknown --example " + o.example);
  if (rc.attention.num_layers == 0) throw std::invalid_argument("attribute needs >= 1 layer");

  auto model = make_attention_model(rc.attention, rc.data.num_classes(), o.seed + 1);
  if (!o.checkpoint.empty()) restore_params(model, ParamStore::load_file(o.checkpoint));

  features::Spectrogram s;
  if (!o.wav.empty()) {
    s = item_features(features::read_wav_file(o.wav), rc.data.features);
  } else {
    auto cfg = rc.data;
    cfg.train_per_class = 1;
    cfg.heldout_per_class = 0;
    s = gen_synthetic(cfg, o.seed).train.front().feats;
  }
  const auto& cfg = model.attention;
  if (cfg.lfr_placement == frontend::LfrPlacement::kPre) s = features::lfr_stack(s, cfg.lfr_factor);
  const auto view = frontend::effective_view(cfg.views.front(), cfg);
  const auto grid = frontend::embed_patches(
      nullptr, frontend::pad_and_extract_patches(s, view),
      model.params.get(frontend::view_prefix(0) + "embed/weight"),
      model.params.get(frontend::view_prefix(0) + "embed/bias"));
  const auto layer = frontend::AttnLayerParams::from_store(
      model.params, frontend::layer_prefix(0, 0), cfg.num_heads);
  const auto [a, b] = detail::parse_time_range(o.time);
  if (b > grid.time_cols) {
    throw std::invalid_argument("--time exceeds the " + std::to_string(grid.time_cols) +
                                " available time columns");
  }
  for (std::size_t t = a; t < b; ++t) {
    Tensor tokens({grid.freq_tokens, grid.embed_dim});
    for (std::size_t f = 0; f < grid.freq_tokens; ++f)
      for (std::size_t e = 0; e < grid.embed_dim; ++e) tokens.at(f, e) = grid.at(t, f, e);
    analyse("t" + std::to_string(t), tokens, layer);
    m["t" + std::to_string(t)]["frames"] = {grid.time_map[t].first, grid.time_map[t].second};
  }
  return detail::finish(dir, "attribute", rc.hash(), o.seed, m, checks, *o.log);
}

}  // namespace freqattn::harness

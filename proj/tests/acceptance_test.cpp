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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Each criterion also has a time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "freqattn/attribution/alti.hpp"
#include "freqattn/attribution/examples.hpp"
#include "freqattn/features/noise.hpp"
#include "freqattn/frontend/analysis.hpp"
#include "freqattn/frontend/invariants.hpp"
#include "freqattn/harness/audit.hpp"
#include "freqattn/harness/commands.hpp"
#include "freqattn/harness/gradcheck.hpp"
#include "freqattn/harness/toy.hpp"
#include "oracles.hpp"

using namespace freqattn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) { return attribution::format_sig9(v); }

Outcome c1_receptive_field() {
  const auto rf = frontend::receptive_field({{3, 2}, {3, 2}});
  return {rf == frontend::ReceptiveField{7, 4},
          "(" + std::to_string(rf.size) + "," + std::to_string(rf.stride) + ")"};
}

Outcome c2_gradients() {
  double worst = 0.0;
  std::string where;
  for (const auto& [layers, views] :
       std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}}) {
    const auto r = harness::gradcheck_toy(harness::gradcheck_config(layers, views, 32), 24, 0);
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      where = std::to_string(layers) + "/" + std::to_string(views) + " " + r.worst_param;
    }
  }
  return {worst < 1e-4, "max rel error " + fmt(worst) + " (" + where + ")"};
}

Outcome c3_lfr_shapes() {
  std::mt19937_64 rng(3);
  auto cfg = frontend::desk_preset();
  features::Spectrogram s{random_normal({96, cfg.input_bins}, rng, 1.0), 10.0,
                          features::FeatureKind::kLfbe};
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  std::string detail;
  for (auto place :
       {frontend::LfrPlacement::kPre, frontend::LfrPlacement::kIn, frontend::LfrPlacement::kPost}) {
    cfg.lfr_placement = place;
    ParamStore store;
    frontend::register_frontend(store, cfg, rng);
    const auto seq = frontend::frontend_forward(nullptr, s, cfg, store);
    shapes.emplace_back(seq.frames(), seq.dim());
    detail += std::string(frontend::placement_name(place)) + ":" + std::to_string(seq.frames()) +
              "x" + std::to_string(seq.dim()) + " ";
  }
  bool ok = true;
  for (const auto& sh : shapes) ok &= sh.first == 8 && sh == shapes.front();
  return {ok, detail};
}

Outcome c4_attention_oracle() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t heads = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
    const std::size_t e =
        heads * std::uniform_int_distribution<std::size_t>(heads == 1 ? 2 : 1, 8 / heads)(rng);
    const std::size_t nf = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    ParamStore store;
    auto p = frontend::AttnLayerParams::register_in(store, "l/", e, heads, rng);
    for (const auto& en : store.entries()) {
      en.node->value = random_normal(en.node->value.shape(), rng, 0.8);
    }
    const Tensor x = random_normal({nf, e}, rng);
    frontend::TokenGrid g;
    g.tokens = constant(x);
    g.time_cols = 1;
    g.freq_tokens = nf;
    g.embed_dim = e;
    g.time_map = {{0, 1}};
    const auto out = frontend::f_attention_layer(nullptr, g, p);
    const auto ref = oracle::naive_attention_block(oracle::to_matrix(x), oracle::to_naive(p),
                                                   frontend::kLayerNormEps);
    for (std::size_t i = 0; i < nf; ++i)
      for (std::size_t c = 0; c < e; ++c)
        worst = std::max(worst, std::abs(out.tokens->value.at(i, c) - ref[i][c]));
  }
  return {worst <= 1e-10, "max abs diff " + fmt(worst)};
}

Outcome c5_alti() {
  std::mt19937_64 rng(5);
  double worst_row = 0.0, worst_recon = 0.0;
  bool nonneg = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t heads = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    const std::size_t e =
        heads * std::uniform_int_distribution<std::size_t>(heads == 1 ? 2 : 1, 4)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 9)(rng);
    ParamStore store;
    auto p = frontend::AttnLayerParams::register_in(store, "l/", e, heads, rng);
    const double scale = std::uniform_real_distribution<double>(0.1, 1.5)(rng);
    for (const auto& en : store.entries()) {
      en.node->value = random_normal(en.node->value.shape(), rng, scale);
    }
    const Tensor x = random_normal({n, e}, rng, 2.0);
    const auto d = attribution::transformed_vectors(x, p);
    const auto c = attribution::contributions_from(d);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        nonneg &= c.at(i, j) >= 0.0;
        s += c.at(i, j);
      }
      worst_row = std::max(worst_row, std::abs(s - 1.0));
    }
    // sum_j T_i(x_j) + bias reproduces the pre-norm layer output.
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < e; ++k) {
        double s = d.pre_bias[k];
        for (std::size_t j = 0; j < n; ++j) s += d.pre_vec(i, j)[k];
        err += std::pow(s - d.pre_norm_output.at(i, k), 2);
        ref += std::pow(d.pre_norm_output.at(i, k), 2);
      }
    }
    worst_recon = std::max(worst_recon, std::sqrt(err / std::max(ref, 1e-300)));
  }
  const auto ex = attribution::mask_fill_example(0);
  const auto c = attribution::alti_contributions(ex.tokens, ex.layer);
  double mx = 0.0, masked = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) mx = std::max(mx, c.column_mass(j));
  for (std::size_t j : ex.masked) masked = std::max(masked, c.column_mass(j));
  const bool ok = nonneg && worst_row <= 1e-6 && worst_recon <= 1e-10 && masked < 0.05 * mx;
  return {ok, "row dev " + fmt(worst_row) + ", recon " + fmt(worst_recon) +
                  ", masked/max " + fmt(masked / mx)};
}

Outcome c6_snr() {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  features::Waveform clean, noise;
  clean.sample_rate = noise.sample_rate = 16000.0;
  for (int i = 0; i < 16000; ++i) clean.samples.push_back(0.3 * g(rng));
  for (int i = 0; i < 7000; ++i) noise.samples.push_back(g(rng));
  double worst = 0.0;
  for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0, 20.0}) {
    const auto m = features::mix_at_snr(clean, noise, snr, 1);
    worst = std::max(worst, std::abs(features::measure_snr(clean, m.scaled_noise) - snr));
  }
  return {worst <= 1e-6, "max |measured - requested| " + fmt(worst) + " dB"};
}

Outcome c7_params() {
  const double base = static_cast<double>(frontend::count_params(frontend::full_baseline()));
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& [l, v] : frontend::full_layer_view_grid()) {
    const auto n = frontend::count_params(frontend::full_preset(l, v));
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  const double dev = std::abs(base - 3.3e6) / 3.3e6;
  const double ratio = static_cast<double>(hi) / static_cast<double>(lo);
  return {dev <= 0.10 && ratio <= 1.15,
          "baseline " + fmt(base) + " (" + fmt(100 * dev) + "% off 3.3M), presets " +
              std::to_string(lo) + ".." + std::to_string(hi) + " ratio " + fmt(ratio)};
}

Outcome c8_toy_learning() {
  const harness::SyntheticConfig data_cfg;  // 3 bands, desk defaults
  const auto data = harness::gen_synthetic(data_cfg, 0);
  harness::TrainConfig tc;  // 500 steps
  tc.seed = 3;
  auto attn = harness::make_attention_model(frontend::desk_preset(), 3, 1);
  auto base = harness::make_baseline_model(frontend::desk_baseline(), 3, 2);
  const auto ra = harness::train_toy(attn, data, tc);
  const auto rb = harness::train_toy(base, data, tc);
  return {ra.heldout_accuracy >= 0.9 && rb.heldout_accuracy >= 0.9,
          "fattention " + fmt(ra.heldout_accuracy) + ", baseline " + fmt(rb.heldout_accuracy)};
}

Outcome c9_locality() {
  std::size_t loc = 0, glob = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    loc += frontend::check_time_locality(s).passed;
    glob += frontend::check_frequency_globality(s).passed;
  }
  return {loc == 10 && glob == 10,
          "locality " + std::to_string(loc) + "/10, globality " + std::to_string(glob) + "/10"};
}

std::vector<std::pair<std::string, std::string>> read_tree(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream is(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    out.emplace_back(fs::relative(e.path(), dir).string(), ss.str());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome c10_determinism() {
  const fs::path root = fs::temp_directory_path() / "freqattn_acceptance_det";
  fs::remove_all(root);
  std::ostringstream log;
  std::vector<std::vector<std::pair<std::string, std::string>>> runs;
  for (int run = 0; run < 2; ++run) {
    harness::CommandOptions o;
    o.config_path = std::string(FREQATTN_CONFIG_DIR) + "/smoke.cfg";
    o.seed = 7;
    o.log = &log;
    const fs::path dir = root / ("run" + std::to_string(run));
    o.out_dir = (dir / "train").string();
    harness::cmd_train(o);
    o.out_dir = (dir / "sweep").string();
    harness::cmd_sweep_snr(o);
    runs.push_back(read_tree(dir));
  }
  fs::remove_all(root);
  std::size_t reports = 0;
  for (const auto& [name, _] : runs[0]) {
    reports += name.ends_with(".csv") || name.ends_with(".json");
  }
  const bool ok = runs[0] == runs[1] && reports >= 5;
  return {ok, std::to_string(runs[0].size()) + " files (" + std::to_string(reports) +
                  " CSV/JSON) " + (runs[0] == runs[1] ? "identical" : "differ")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "receptive-field equivalence", 0.001, c1_receptive_field},
      {2, "gradient integrity", 60, c2_gradients},
      {3, "LFR-placement shape equality", 1, c3_lfr_shapes},
      {4, "attention oracle equivalence", 5, c4_attention_oracle},
      {5, "ALTI validity", 10, c5_alti},
      {6, "SNR fidelity", 1, c6_snr},
      {7, "parameter audit", 1, c7_params},
      {8, "toy learning", 300, c8_toy_learning},
      {9, "locality/globality", 10, c9_locality},
      {10, "determinism", 600, c10_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool passed = o.passed && in_time;
    failures += !passed;
    std::printf("%s C%d %s: %s [%.3gs, budget %gs%s]\n", passed ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

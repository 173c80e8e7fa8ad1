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

// Held-out accuracy under additive noise at a list of SNRs, reported per
// model with the relative change against the baseline model.

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqattn/attribution/report.hpp"
#include "freqattn/features/noise.hpp"
#include "freqattn/harness/synthetic.hpp"
#include "freqattn/harness/toy.hpp"

namespace freqattn::harness {

struct SweepConfig {
  std::vector<double> snrs_db = {-10.0, -5.0, 0.0, 5.0, 10.0, 20.0};
  std::uint64_t noise_seed = 0;
  std::size_t babble_tones = 24;
  // Out-of-band condition: stationary tones confined to this band.
  double band_lo_hz = 5000.0;
  double band_hi_hz = 7000.0;
  double band_snr_db = 0.0;
};

struct SweepRow {
  std::string model;
  std::string condition;  // "clean", "babble" or "band"
  double snr_db = 0.0;    // +inf for clean
  double accuracy = 0.0;
  // 100 * (acc - acc_baseline) / acc_baseline; NaN when the baseline is 0.
  double rel_delta_pct = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::string baseline;

  const SweepRow* find(const std::string& model, const std::string& condition,
                       double snr) const {
    for (const auto& r : rows) {
      if (r.model == model && r.condition == condition &&
          (r.snr_db == snr || (std::isinf(r.snr_db) && std::isinf(snr)))) {
        return &r;
      }
    }
    return nullptr;
  }
};

inline double relative_delta_pct(double acc, double base) {
  if (!(base > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 100.0 * (acc - base) / base;
}

namespace detail {

inline std::uint64_t item_noise_seed(std::uint64_t base, std::size_t item, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(item), static_cast<std::uint32_t>(salt)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace detail

// Noisy copies of the held-out features for one condition.
inline std::vector<features::Spectrogram> noisy_heldout(const SyntheticDataset& d,
                                                        const SweepConfig& cfg,
                                                        const std::string& condition,
                                                        double snr_db) {
  std::vector<features::Spectrogram> out;
  for (std::size_t i = 0; i < d.heldout.size(); ++i) {
    const auto& wave = d.heldout[i].wave;
    if (condition == "clean") {
      out.push_back(d.heldout[i].feats);
      continue;
    }
    features::Waveform noise;
    if (condition == "babble") {
      noise = synth_babble(wave.samples.size(), wave.sample_rate, cfg.babble_tones,
                           detail::item_noise_seed(cfg.noise_seed, i, 1));
    } else if (condition == "band") {
      noise = synth_band_noise(wave.samples.size(), wave.sample_rate, cfg.band_lo_hz,
                               cfg.band_hi_hz, detail::item_noise_seed(cfg.noise_seed, i, 2));
    } else {
      throw std::invalid_argument("unknown noise condition " + condition);
    }
    const auto mixed = features::mix_at_snr(wave, noise, snr_db, cfg.noise_seed + i);
    out.push_back(item_features(mixed.mixed, d.cfg.features));
  }
  return out;
}

// Evaluates every model on identical noisy inputs. `baseline` names the
// reference model and must be among `models`.
inline SweepReport snr_sweep(const std::vector<const ToyModel*>& models,
                             const std::string& baseline, const SyntheticDataset& d,
                             const SweepConfig& cfg) {
  if (d.heldout.empty()) throw std::invalid_argument("snr_sweep: empty held-out split");
  bool has_baseline = false;
  for (const auto* m : models) has_baseline |= m->name == baseline;
  if (!has_baseline) throw std::invalid_argument("snr_sweep: baseline model missing");

  std::vector<std::pair<std::string, double>> conditions = {
      {"clean", std::numeric_limits<double>::infinity()}};
  for (double s : cfg.snrs_db) conditions.emplace_back("babble", s);
  conditions.emplace_back("band", cfg.band_snr_db);

  std::vector<std::size_t> labels;
  for (const auto& it : d.heldout) labels.push_back(it.label);

  SweepReport rep;
  rep.baseline = baseline;
  for (const auto& [cond, snr] : conditions) {
    const auto feats = noisy_heldout(d, cfg, cond, snr);
    std::vector<const features::Spectrogram*> ptrs;
    for (const auto& f : feats) ptrs.push_back(&f);
    std::map<std::string, double> acc;
    for (const auto* m : models) acc[m->name] = accuracy(*m, ptrs, labels);
    for (const auto* m : models) {
      rep.rows.push_back({m->name, cond, snr, acc[m->name],
                          relative_delta_pct(acc[m->name], acc[baseline])});
    }
  }
  return rep;
}

inline std::string sweep_csv(const SweepReport& r) {
  using attribution::format_sig9;
  std::ostringstream os;
  os << "model,condition,snr_db,accuracy,rel_delta_pct\n";
  for (const auto& row : r.rows) {
    os << row.model << ',' << row.condition << ','
       << (std::isinf(row.snr_db) ? std::string("inf") : format_sig9(row.snr_db)) << ','
       << format_sig9(row.accuracy) << ','
       << (std::isnan(row.rel_delta_pct) ? std::string("nan") : format_sig9(row.rel_delta_pct))
       << '\n';
  }
  return os.str();
}

struct SweepChecks {
  bool baseline_every_snr = true;
  bool baseline_delta_zero = true;
  bool monotone = true;  // acc(-10 dB) <= acc(+20 dB) per model, when both present
};

inline SweepChecks check_sweep(const SweepReport& r, const SweepConfig& cfg) {
  SweepChecks c;
  std::vector<std::string> models;
  for (const auto& row : r.rows) {
    if (std::find(models.begin(), models.end(), row.model) == models.end()) {
      models.push_back(row.model);
    }
  }
  for (double s : cfg.snrs_db) c.baseline_every_snr &= r.find(r.baseline, "babble", s) != nullptr;
  for (const auto& row : r.rows) {
    if (row.model == r.baseline) c.baseline_delta_zero &= row.rel_delta_pct == 0.0;
  }
  for (const auto& m : models) {
    const auto* lo = r.find(m, "babble", -10.0);
    const auto* hi = r.find(m, "babble", 20.0);
    if (lo && hi) c.monotone &= lo->accuracy <= hi->accuracy;
  }
  return c;
}

}  // namespace freqattn::harness

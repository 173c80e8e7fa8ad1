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

// Frontend + linear classification head trained on the synthetic task.

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqattn/features/augment.hpp"
#include "freqattn/frontend/cnn.hpp"
#include "freqattn/frontend/frontend.hpp"
#include "freqattn/harness/synthetic.hpp"
#include "freqattn/optim.hpp"
#include "freqattn/param_store.hpp"

namespace freqattn::harness {

enum class ModelKind { kFAttention, kBaseline };

inline const char* model_kind_name(ModelKind k) {
  return k == ModelKind::kFAttention ? "fattention" : "baseline";
}

// Head: one linear map D -> num_classes over the time-averaged encoder
// sequence, registered as head/{weight,bias}.
struct ToyModel {
  std::string name;
  ModelKind kind = ModelKind::kFAttention;
  frontend::FrontendConfig attention;
  frontend::BaselineConfig baseline;
  std::size_t num_classes = 0;
  ParamStore params;

  std::size_t encoder_dim() const {
    return kind == ModelKind::kFAttention ? attention.output_dim : baseline.output_dim;
  }

  frontend::EncoderSequence encode(Tape* tape, const features::Spectrogram& s) const {
    return kind == ModelKind::kFAttention
               ? frontend::frontend_forward(tape, s, attention, params)
               : frontend::cnn_frontend_forward(tape, s, baseline, params);
  }

  Var logits(Tape* tape, const features::Spectrogram& s) const {
    const auto seq = encode(tape, s);
    return linear(tape, mean_rows(tape, seq.values), params.get("head/weight"),
                  params.get("head/bias"));
  }

  std::size_t predict(const features::Spectrogram& s) const {
    const auto l = logits(nullptr, s)->value;
    std::size_t best = 0;
    for (std::size_t c = 1; c < l.size(); ++c) {
      if (l[c] > l[best]) best = c;
    }
    return best;
  }
};

inline void register_head(ToyModel& m, std::mt19937_64& rng) {
  if (m.num_classes < 2) throw std::invalid_argument("toy head needs >= 2 classes");
  m.params.add("head/weight", xavier_uniform(m.encoder_dim(), m.num_classes, rng));
  m.params.add("head/bias", Tensor({m.num_classes}));
}

inline ToyModel make_attention_model(const frontend::FrontendConfig& cfg,
                                     std::size_t num_classes, std::uint64_t seed,
                                     std::string name = "fattention") {
  ToyModel m;
  m.name = std::move(name);
  m.kind = ModelKind::kFAttention;
  m.attention = cfg;
  m.num_classes = num_classes;
  std::mt19937_64 rng(seed);
  frontend::register_frontend(m.params, cfg, rng);
  register_head(m, rng);
  return m;
}

inline ToyModel make_baseline_model(const frontend::BaselineConfig& cfg,
                                    std::size_t num_classes, std::uint64_t seed,
                                    std::string name = "baseline") {
  ToyModel m;
  m.name = std::move(name);
  m.kind = ModelKind::kBaseline;
  m.baseline = cfg;
  m.num_classes = num_classes;
  std::mt19937_64 rng(seed);
  frontend::register_baseline(m.params, cfg, rng);
  register_head(m, rng);
  return m;
}

// Copies checkpoint values into a model built from the same configuration.
// Names, shapes and entry count must match exactly.
inline void restore_params(ToyModel& m, const ParamStore& loaded) {
  if (loaded.size() != m.params.size()) {
    throw std::invalid_argument("checkpoint has " + std::to_string(loaded.size()) +
                                " tensors, model expects " + std::to_string(m.params.size()));
  }
  for (const auto& e : m.params.entries()) {
    if (!loaded.contains(e.name)) throw std::invalid_argument("checkpoint lacks " + e.name);
    const Tensor& v = loaded.get(e.name)->value;
    if (v.shape() != e.node->value.shape()) {
      throw std::invalid_argument("checkpoint shape mismatch for " + e.name + ": " +
                                  shape_str(v.shape()) + " vs " +
                                  shape_str(e.node->value.shape()));
    }
    e.node->value = v;
  }
}

struct TrainConfig {
  std::size_t steps = 500;
  std::size_t batch = 8;
  LrSchedule schedule{1e-3, 100, 0.5, 1000};
  bool augment = false;
  features::MaskPolicy mask{1, 8, 1, 10, 0.2, 0};
  std::uint64_t seed = 0;
};

struct TrainResult {
  std::vector<double> losses;  // mean batch loss per step
  double initial_accuracy = 0.0;
  double heldout_accuracy = 0.0;
};

inline double accuracy(const ToyModel& m, const std::vector<const features::Spectrogram*>& feats,
                       const std::vector<std::size_t>& labels) {
  if (feats.empty()) throw std::invalid_argument("accuracy: no items");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < feats.size(); ++i) hits += m.predict(*feats[i]) == labels[i];
  return static_cast<double>(hits) / static_cast<double>(feats.size());
}

inline double accuracy(const ToyModel& m, const std::vector<Item>& items) {
  std::vector<const features::Spectrogram*> f;
  std::vector<std::size_t> l;
  for (const auto& it : items) {
    f.push_back(&it.feats);
    l.push_back(it.label);
  }
  return accuracy(m, f, l);
}

// Mini-batch Adam on softmax cross-entropy. Batches are sampled with
// replacement from the training split by a generator seeded with cfg.seed.
inline TrainResult train_toy(ToyModel& m, const SyntheticDataset& d, const TrainConfig& cfg) {
  if (d.train.empty()) throw std::invalid_argument("train_toy: empty training split");
  if (cfg.batch < 1) throw std::invalid_argument("train_toy: batch must be >= 1");
  cfg.schedule.validate();
  TrainResult r;
  const auto& eval_items = d.heldout.empty() ? d.train : d.heldout;
  r.initial_accuracy = accuracy(m, eval_items);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, d.train.size() - 1);
  OptState opt = OptState::for_params(m.params);
  m.params.zero_grad();
  const double inv_batch = 1.0 / static_cast<double>(cfg.batch);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    double loss = 0.0;
    for (std::size_t b = 0; b < cfg.batch; ++b) {
      const Item& it = d.train[pick(rng)];
      features::Spectrogram input = it.feats;
      if (cfg.augment) {
        auto policy = cfg.mask;
        policy.seed = rng();
        input = features::spec_augment(input, policy);
      }
      Tape tape;
      auto l = cross_entropy(&tape, m.logits(&tape, input), it.label);
      loss += l->value[0] * inv_batch;
      tape.backward(l, inv_batch);
    }
    if (!std::isfinite(loss)) {
      throw std::runtime_error("non-finite loss at step " + std::to_string(step));
    }
    r.losses.push_back(loss);
    adam_step(m.params, opt, cfg.schedule);
  }
  r.heldout_accuracy = accuracy(m, eval_items);
  return r;
}

}  // namespace freqattn::harness

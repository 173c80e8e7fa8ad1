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
#include <random>
#include <sstream>

#include "freqattn/grad_check.hpp"
#include "freqattn/ops.hpp"
#include "freqattn/optim.hpp"
#include "freqattn/param_store.hpp"
#include "oracles.hpp"

using namespace freqattn;
using freqattn::oracle::weighted_sum_objective;

namespace {

Var c(Tensor t) { return constant(std::move(t)); }

}  // namespace

TEST(Linear, IdentityWeights) {
  auto y = linear(nullptr, c(Tensor::matrix(1, 2, {1, 2})),
                  c(Tensor::matrix(2, 2, {1, 0, 0, 1})), c(Tensor::vector({0, 0})));
  EXPECT_EQ(y->value, Tensor::matrix(1, 2, {1, 2}));
}

TEST(Linear, HandArithmetic) {
  auto y = linear(nullptr, c(Tensor::matrix(1, 2, {1, 1})), c(Tensor::matrix(2, 1, {2, 3})),
                  c(Tensor::vector({1})));
  EXPECT_DOUBLE_EQ(y->value[0], 6.0);
}

TEST(Linear, MatchesTripleLoop) {
  std::mt19937_64 rng(7);
  const Tensor x = random_normal({3, 4}, rng), w = random_normal({4, 2}, rng),
               b = random_normal({2}, rng);
  const auto y = linear(nullptr, c(x), c(w), c(b))->value;
  const auto ref = oracle::naive_matmul(oracle::to_matrix(x), oracle::to_matrix(w));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(y.at(i, j), ref[i][j] + b[j], 1e-12);
}

TEST(Linear, ShapeMismatchThrows) {
  EXPECT_THROW(linear(nullptr, c(Tensor({2, 3})), c(Tensor({2, 2})), c(Tensor({2}))),
               std::invalid_argument);
  EXPECT_THROW(linear(nullptr, c(Tensor({2, 2})), c(Tensor({2, 2})), c(Tensor({3}))),
               std::invalid_argument);
}

TEST(Softmax, Symmetric) {
  auto y = softmax_rows(nullptr, c(Tensor::matrix(1, 2, {0, 0})));
  EXPECT_DOUBLE_EQ(y->value[0], 0.5);
  EXPECT_DOUBLE_EQ(y->value[1], 0.5);
}

TEST(Softmax, ClosedForm) {
  auto y = softmax_rows(nullptr, c(Tensor::matrix(1, 2, {std::log(2.0), 0})));
  EXPECT_NEAR(y->value[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(y->value[1], 1.0 / 3.0, 1e-15);
}

TEST(Softmax, ShiftInvarianceAndStochasticRows) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor x = random_normal({4, 6}, rng, 5.0);
    Tensor shifted = x;
    const double shift = std::uniform_real_distribution<double>(-50, 50)(rng);
    for (auto& v : shifted.data()) v += shift;
    const auto a = softmax_rows(nullptr, c(x))->value;
    const auto b = softmax_rows(nullptr, c(shifted))->value;
    EXPECT_LT(max_abs_diff(a, b), 1e-12);
    for (std::size_t i = 0; i < 4; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_GE(a.at(i, j), 0.0);
        EXPECT_LE(a.at(i, j), 1.0);
        s += a.at(i, j);
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(Softmax, LargeInputsStayFinite) {
  auto y = softmax_rows(nullptr, c(Tensor::matrix(1, 3, {1000, 999, -1000})));
  EXPECT_TRUE(y->value.all_finite());
}

TEST(LayerNorm, UnitRowUnchanged) {
  auto y = layer_norm(nullptr, c(Tensor::matrix(1, 2, {1, -1})), c(Tensor({2}, 1.0)),
                      c(Tensor({2})), 1e-12);
  EXPECT_NEAR(y->value[0], 1.0, 1e-9);
  EXPECT_NEAR(y->value[1], -1.0, 1e-9);
}

TEST(LayerNorm, ConstantRowGoesToBeta) {
  auto y = layer_norm(nullptr, c(Tensor::matrix(1, 3, {5, 5, 5})), c(Tensor({3}, 1.0)),
                      c(Tensor({3})), 1e-6);
  for (double v : y->value.data()) EXPECT_EQ(v, 0.0);
}

TEST(LayerNorm, MatchesScalarOracleAndMoments) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor x = random_normal({1, 9}, rng, 4.0);
    const Tensor g = random_normal({9}, rng), b = random_normal({9}, rng);
    const auto y = layer_norm(nullptr, c(x), c(g), c(b), 1e-6)->value;
    const auto ref = oracle::naive_layer_norm(x.data(), g.data(), b.data(), 1e-6);
    for (std::size_t j = 0; j < 9; ++j) EXPECT_NEAR(y[j], ref[j], 1e-10);

    const auto z = layer_norm(nullptr, c(x), c(Tensor({9}, 1.0)), c(Tensor({9})), 1e-6)->value;
    double mean = 0.0, var = 0.0;
    for (double v : z.data()) mean += v / 9.0;
    for (double v : z.data()) var += (v - mean) * (v - mean) / 9.0;
    EXPECT_LT(std::abs(mean), 1e-10);
    EXPECT_NEAR(var, 1.0, 1e-6);
  }
}

// Every op's adjoint against central differences on random small shapes.
class OpGradient : public ::testing::Test {
 protected:
  std::mt19937_64 rng{2024};

  void expect_gradient_ok(ParamStore& p, const Objective& f) {
    const auto r = grad_check(f, p, 1e-5);
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << "[" << r.worst_index
                                     << "] analytic " << r.analytic << " numeric "
                                     << r.numeric;
  }
};

TEST_F(OpGradient, Linear) {
  ParamStore p;
  p.add("x", random_normal({3, 4}, rng));
  p.add("w", random_normal({4, 5}, rng));
  p.add("b", random_normal({5}, rng));
  expect_gradient_ok(p, weighted_sum_objective(
                            [](Tape* t, ParamStore& s) {
                              return linear(t, s.get("x"), s.get("w"), s.get("b"));
                            },
                            random_normal({3, 5}, rng)));
}

TEST_F(OpGradient, SoftmaxAndLayerNorm) {
  ParamStore p;
  p.add("x", random_normal({3, 5}, rng, 2.0));
  p.add("g", random_normal({5}, rng));
  p.add("b", random_normal({5}, rng));
  expect_gradient_ok(p, weighted_sum_objective(
                            [](Tape* t, ParamStore& s) {
                              auto y = softmax_rows(t, s.get("x"));
                              return layer_norm(t, y, s.get("g"), s.get("b"), 1e-6);
                            },
                            random_normal({3, 5}, rng)));
}

TEST_F(OpGradient, GroupedAttention) {
  ParamStore p;
  p.add("q", random_normal({6, 4}, rng));
  p.add("k", random_normal({6, 4}, rng));
  p.add("v", random_normal({6, 4}, rng));
  expect_gradient_ok(p, weighted_sum_objective(
                            [](Tape* t, ParamStore& s) {
                              return grouped_attention(t, s.get("q"), s.get("k"),
                                                       s.get("v"), 2, 3, 2);
                            },
                            random_normal({6, 4}, rng)));
}

TEST_F(OpGradient, WindowsStackMeanCrossEntropy) {
  ParamStore p;
  p.add("x", random_normal({5 * 4, 2}, rng));
  p.add("w", random_normal({3 * 3 * 2, 3}, rng));
  p.add("b", random_normal({3}, rng));
  WindowGeometry g;
  g.height = 5;
  g.width = 4;
  g.channels = 2;
  g.kernel_h = g.kernel_w = 3;
  g.stride_h = g.stride_w = 2;
  g.pad_h = g.pad_w = 1;
  g.out_h = 3;
  g.out_w = 2;
  const Objective f = [g](ParamStore& s, bool with_grad) {
    Tape tape;
    Tape* t = with_grad ? &tape : nullptr;
    auto cols = extract_windows(t, s.get("x"), g);
    auto y = linear(t, cols, s.get("w"), s.get("b"));
    auto stacked = stack_rows(t, reshape(t, y, {3, 6}), 2);
    auto pooled = mean_rows(t, stacked);
    auto loss = cross_entropy(t, pooled, 4);
    if (with_grad) tape.backward(loss);
    return loss->value[0];
  };
  expect_gradient_ok(p, f);
}

TEST(GradCheck, QuadraticIsExact) {
  std::mt19937_64 rng(5);
  ParamStore p;
  p.add("theta", random_normal({4}, rng));
  const Objective f = [](ParamStore& s, bool with_grad) {
    const auto& n = s.get("theta");
    double v = 0.0;
    for (std::size_t i = 0; i < n->value.size(); ++i) {
      v += n->value[i] * n->value[i];
      if (with_grad) n->grad_buffer()[i] += 2.0 * n->value[i];
    }
    return v;
  };
  EXPECT_LT(grad_check(f, p, 1e-5).max_rel_error, 1e-9);
}

TEST(GradCheck, ConstantObjective) {
  ParamStore p;
  p.add("theta", Tensor({3}, 1.0));
  const auto r = grad_check([](ParamStore&, bool) { return 4.0; }, p, 1e-5);
  EXPECT_EQ(r.analytic, 0.0);
  EXPECT_EQ(r.numeric, 0.0);
  EXPECT_EQ(r.max_rel_error, 0.0);
}

TEST(GradCheck, NonFiniteObjectiveThrows) {
  ParamStore p;
  p.add("theta", Tensor({1}, 1.0));
  EXPECT_THROW(grad_check([](ParamStore&, bool) { return std::nan(""); }, p),
               std::runtime_error);
}

TEST(ParamStore, DuplicateNameFails) {
  ParamStore p;
  p.add("view0/layer0/q_proj/weight", Tensor({2, 2}));
  EXPECT_THROW(p.add("view0/layer0/q_proj/weight", Tensor({2, 2})), std::invalid_argument);
}

TEST(ParamStore, CheckpointRoundTripIsBitExact) {
  std::mt19937_64 rng(9);
  ParamStore p;
  p.add("a/weight", random_normal({3, 2}, rng));
  p.add("a/bias", random_normal({2}, rng));
  p.add("scalar", Tensor({1}, std::vector<double>{-0.0}));
  std::stringstream ss;
  p.save(ss);
  const std::string bytes = ss.str();
  const ParamStore q = ParamStore::load(ss);
  ASSERT_EQ(q.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(q.entries()[i].name, p.entries()[i].name);
    EXPECT_EQ(q.entries()[i].node->value.shape(), p.entries()[i].node->value.shape());
    EXPECT_EQ(std::memcmp(q.entries()[i].node->value.data().data(),
                          p.entries()[i].node->value.data().data(),
                          p.entries()[i].node->value.size() * sizeof(double)),
              0);
  }
  std::stringstream again;
  q.save(again);
  EXPECT_EQ(again.str(), bytes);
}

TEST(ParamStore, TruncatedCheckpointThrows) {
  ParamStore p;
  p.add("w", Tensor({4}, 1.0));
  std::stringstream ss;
  p.save(ss);
  std::string s = ss.str();
  s.resize(s.size() - 3);
  std::stringstream cut(s);
  EXPECT_THROW(ParamStore::load(cut), std::runtime_error);
}

TEST(LrSchedule, WarmupAndDecay) {
  LrSchedule s{1e-4, 5000, 0.5, 1000};
  EXPECT_DOUBLE_EQ(lr_at(s, 0), 0.0);
  EXPECT_DOUBLE_EQ(lr_at(s, 5000), 1e-4);
  EXPECT_DOUBLE_EQ(lr_at(s, 2500), 0.5e-4);
  EXPECT_NEAR(lr_at(s, 6000), 0.5e-4, 1e-20);
  EXPECT_NEAR(lr_at(s, 7000), 0.25e-4, 1e-20);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  ParamStore p;
  p.add("w", Tensor({3}, 2.0));
  auto st = OptState::for_params(p);
  adam_step(p, st, LrSchedule{1e-2, 1, 1.0, 1});
  for (double v : p.get("w")->value.data()) EXPECT_EQ(v, 2.0);
  EXPECT_EQ(st.step, 1u);
}

TEST(Adam, FirstStepIsSignTimesLr) {
  ParamStore p;
  p.add("w", Tensor::vector({1.0, 1.0}));
  p.get("w")->grad_buffer()[0] = 3.0;
  p.get("w")->grad_buffer()[1] = -0.5;
  auto st = OptState::for_params(p);
  const LrSchedule s{1e-3, 1, 1.0, 1};
  adam_step(p, st, s);
  EXPECT_NEAR(p.get("w")->value[0], 1.0 - 1e-3, 1e-10);
  EXPECT_NEAR(p.get("w")->value[1], 1.0 + 1e-3, 1e-10);
  EXPECT_EQ(p.get("w")->grad_buffer()[0], 0.0);
}

TEST(Adam, TwoStepsMatchHandRecursion) {
  ParamStore p;
  p.add("w", Tensor::vector({0.3}));
  auto st = OptState::for_params(p);
  const LrSchedule s{0.1, 2, 0.5, 10};
  const double g1 = 0.7, g2 = -1.3;
  p.get("w")->grad_buffer()[0] = g1;
  adam_step(p, st, s);
  p.get("w")->grad_buffer()[0] = g2;
  adam_step(p, st, s);

  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double w = 0.3;
  double m = (1 - b1) * g1, v = (1 - b2) * g1 * g1;
  w -= 0.05 * (m / (1 - b1)) / (std::sqrt(v / (1 - b2)) + eps);
  m = b1 * m + (1 - b1) * g2;
  v = b2 * v + (1 - b2) * g2 * g2;
  w -= 0.1 * (m / (1 - b1 * b1)) / (std::sqrt(v / (1 - b2 * b2)) + eps);
  EXPECT_NEAR(p.get("w")->value[0], w, 1e-12);
}

TEST(Adam, NonFiniteGradientThrows) {
  ParamStore p;
  p.add("w", Tensor({2}, 1.0));
  p.get("w")->grad_buffer()[1] = std::nan("");
  auto st = OptState::for_params(p);
  EXPECT_THROW(adam_step(p, st, LrSchedule{}), std::runtime_error);
  EXPECT_EQ(p.get("w")->value[0], 1.0);
}

TEST(Adam, BitReproducible) {
  auto run = [] {
    std::mt19937_64 rng(1);
    ParamStore p;
    p.add("w", random_normal({5}, rng));
    auto st = OptState::for_params(p);
    for (int i = 0; i < 10; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        p.get("w")->grad_buffer()[j] = std::sin(p.get("w")->value[j] * (i + 1));
      }
      adam_step(p, st, LrSchedule{1e-2, 3, 0.9, 2});
    }
    return p.get("w")->value;
  };
  EXPECT_EQ(run(), run());
}

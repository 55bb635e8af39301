// Copyright (c) 2026 The WPT Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.h"
#include "wpt/ppo.h"

namespace wpt {
namespace {

TEST(Reward, Substitution) {
  EXPECT_DOUBLE_EQ(compute_reward(10.0, 8.0), 2.0);
  EXPECT_DOUBLE_EQ(compute_reward(10.0, 10.0), 0.0);
}

TEST(Reward, ClampAtTwiceAlpha) {
  EXPECT_DOUBLE_EQ(compute_reward(10.0, 25.0), -10.0);
  EXPECT_DOUBLE_EQ(compute_reward(10.0, 1e9), -10.0);
}

TEST(Gae, SingleStep) {
  const auto a = compute_gae({2.0}, {0.5, 1.0}, 0.9, 0.7);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_DOUBLE_EQ(a[0], 2.0 + 0.9 * 1.0 - 0.5);
}

TEST(Gae, UndiscountedTwoSteps) {
  const std::vector<double> r{1.0, -2.0}, v{0.3, 0.1, 0.4};
  const auto a = compute_gae(r, v, 1.0, 1.0);
  const double d0 = 1.0 + 0.1 - 0.3, d1 = -2.0 + 0.4 - 0.1;
  EXPECT_DOUBLE_EQ(a[0], d0 + d1);
  EXPECT_DOUBLE_EQ(a[1], d1);
}

TEST(Gae, WorkedExample) {
  const auto a = compute_gae({1.0, 1.0}, {0.5, 0.2, 0.0}, 0.99, 0.95);
  EXPECT_NEAR(a[0], 1.4504, 1e-12);
  EXPECT_NEAR(a[1], 0.8, 1e-12);
  const auto oracle = testing::gae_double_sum({1.0, 1.0}, {0.5, 0.2, 0.0}, 0.99, 0.95);
  EXPECT_NEAR(a[0], oracle[0], 1e-12);
}

TEST(Gae, RandomEpisodesMatchDoubleSum) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0), unit(0.0, 1.0);
  for (int e = 0; e < 200; ++e) {
    const std::size_t T = 1 + rng() % 16;
    std::vector<double> r(T), v(T + 1);
    for (auto& x : r) x = u(rng);
    for (auto& x : v) x = u(rng);
    const double gamma = 0.01 + 0.99 * unit(rng), mu = unit(rng);
    const auto got = compute_gae(r, v, gamma, mu);
    const auto want = testing::gae_double_sum(r, v, gamma, mu);
    for (std::size_t t = 0; t < T; ++t) EXPECT_NEAR(got[t], want[t], 1e-10);
  }
}

TEST(Gae, LengthMismatch) {
  try {
    compute_gae({1.0, 2.0}, {0.0, 0.0}, 0.9, 0.9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(Entropy, DegenerateAndUniform) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(categorical_entropy({0.0, -inf, -inf}), 0.0);
  const Eigen::VectorXd flat = Eigen::VectorXd::Zero(34);
  EXPECT_NEAR(categorical_entropy(log_softmax<double>(flat)), std::log(34.0), 1e-12);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd l(6);
    for (int k = 0; k < 6; ++k) l[k] = n(rng);
    EXPECT_GE(categorical_entropy(log_softmax<double>(l)), 0.0);
  }
}

TEST(Sampling, FrequenciesMatchSoftmax) {
  Eigen::VectorXd logits(5);
  logits << 0.5, -1.0, 2.0, 0.0, 1.0;
  const auto lp = log_softmax<double>(logits);
  std::mt19937_64 rng(12345);
  constexpr int kDraws = 100000;
  std::vector<int> counts(5, 0);
  for (int i = 0; i < kDraws; ++i) ++counts[sample_action(lp, rng)];
  for (int k = 0; k < 5; ++k) {
    const double p = std::exp(lp[k]);
    const double sigma = std::sqrt(kDraws * p * (1.0 - p));
    EXPECT_LE(std::abs(counts[k] - kDraws * p), 3.0 * sigma) << "action " << k;
  }
}

PolicyBatch<double> random_batch(const Mlp<double>& net, int n, std::mt19937_64& rng, bool on_policy) {
  std::normal_distribution<double> g(0.0, 1.0);
  PolicyBatch<double> b;
  b.obs.resize(net.dims().front(), n);
  for (Eigen::Index i = 0; i < b.obs.size(); ++i) b.obs.data()[i] = g(rng);
  const Eigen::MatrixXd out = net.forward(b.obs);
  const int actions = net.dims().back() - 1;
  for (int j = 0; j < n; ++j) {
    const auto lp = log_softmax<double>(Eigen::VectorXd(out.col(j).head(actions)));
    const int a = static_cast<int>(rng() % actions);
    b.actions.push_back(a);
    b.old_log_probs.push_back(on_policy ? lp[a] : lp[a] + 0.3 * g(rng));
    b.advantages.push_back(g(rng));
    b.value_targets.push_back(g(rng));
  }
  return b;
}

TEST(Loss, UnitRatioSurrogateIsMeanAdvantage) {
  PPOParams p;
  p.hidden = {8};
  std::mt19937_64 rng(2);
  const auto net = make_policy_network<double>(4, 3, p, rng);
  auto b = random_batch(net, 10, rng, true);
  normalize(b.advantages);
  const auto r = ppo_loss(net, b, p);
  double mean = 0.0;
  for (double a : b.advantages) mean += a / 10.0;
  EXPECT_NEAR(r.surrogate, mean, 1e-12);
  EXPECT_NEAR(r.loss, -(r.surrogate - p.c1 * r.value_error + p.c2 * r.entropy), 1e-12);
}

TEST(Loss, GradientMatchesFiniteDifferences) {
  PPOParams p;
  p.hidden = {8};
  p.keep_prob = 1.0;
  std::mt19937_64 rng(3);
  auto net = make_policy_network<double>(4, 3, p, rng);
  net.init(rng);
  const auto b = random_batch(net, 6, rng, false);
  const auto analytic = ppo_loss(net, b, p).grad;
  const Eigen::VectorXd base = net.params();
  auto f = [&](const std::vector<double>& theta) {
    net.params() = Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    return ppo_loss(net, b, p).loss;
  };
  const std::vector<double> theta(base.data(), base.data() + base.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double fd = testing::central_difference(f, theta, i, 1e-4);
    EXPECT_NEAR(analytic[static_cast<Eigen::Index>(i)], fd, 1e-6 + 1e-4 * std::abs(fd)) << "param " << i;
  }
}

TEST(Loss, NonFinite) {
  PPOParams p;
  p.hidden = {4};
  std::mt19937_64 rng(4);
  const auto net = make_policy_network<double>(4, 3, p, rng);
  auto b = random_batch(net, 2, rng, true);
  b.value_targets[0] = std::numeric_limits<double>::infinity();
  try {
    ppo_loss(net, b, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteLoss);
  }
}

Rollout random_rollout(int n, std::mt19937_64& rng, int actions) {
  std::normal_distribution<double> g(0.0, 1.0);
  Rollout r;
  for (int i = 0; i < n; ++i) {
    r.obs.push_back({g(rng), g(rng), g(rng), g(rng)});
    r.actions.push_back(static_cast<int>(rng() % actions));
    r.log_probs.push_back(-std::log(static_cast<double>(actions)));
    r.rewards.push_back(g(rng));
    r.values.push_back(g(rng));
  }
  r.bootstrap_value = g(rng);
  return r;
}

TEST(Update, ZeroLearningRateLeavesParameters) {
  for (auto opt : {Optimizer::kSgd, Optimizer::kAdam}) {
    PPOParams p;
    p.hidden = {16, 16};
    p.optimizer = opt;
    std::mt19937_64 rng(5);
    auto net = make_policy_network<double>(4, 3, p, rng);
    const Eigen::VectorXd before = net.params();
    OptimizerState<double> state;
    ppo_update(net, random_rollout(32, rng, 3), p, 0.0, rng, state);
    EXPECT_EQ(net.params(), before);
  }
}

TEST(Update, MovesParametersAndStaysFinite) {
  PPOParams p;
  p.hidden = {16, 16};
  std::mt19937_64 rng(6);
  auto net = make_policy_network<float>(4, 3, p, rng);
  const Eigen::VectorXf before = net.params();
  OptimizerState<float> state;
  const auto stats = ppo_update(net, random_rollout(64, rng, 3), p, 1e-3, rng, state);
  EXPECT_NE(net.params(), before);
  EXPECT_TRUE(net.params().allFinite());
  EXPECT_TRUE(std::isfinite(stats.loss));
}

TEST(Network, ArchitectureFollowsParams) {
  PPOParams p;
  std::mt19937_64 rng(7);
  const auto net = make_policy_network<float>(17, 34, p, rng);
  EXPECT_EQ(net.dims(), (std::vector<int>{17, 512, 1024, 1024, 512, 35}));
  EXPECT_EQ(net.activations(), (std::vector<Activation>{Activation::kTanh, Activation::kTanh, Activation::kSelu,
                                                        Activation::kSelu, Activation::kLinear}));
  EXPECT_EQ(net.dropout_layer(), 3);
  EXPECT_FLOAT_EQ(static_cast<float>(net.keep_prob()), 0.15f);
  Eigen::VectorXf x = Eigen::VectorXf::Constant(17, 3.0f);
  EXPECT_TRUE(net.forward(x).allFinite());
}

TEST(Network, DropoutOnlyWhenRngGiven) {
  PPOParams p;
  p.hidden = {32, 32};
  std::mt19937_64 rng(8);
  const auto net = make_policy_network<double>(4, 3, p, rng);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
  EXPECT_EQ(net.forward(x), net.forward(x));
  std::mt19937_64 d1(1), d2(2);
  EXPECT_NE(net.forward(x, nullptr, &d1), net.forward(x, nullptr, &d2));
}

TEST(Params, Defaults) {
  const PPOParams p;
  EXPECT_EQ(p.c1, 0.15);
  EXPECT_EQ(p.c2, 20.0);
  EXPECT_EQ(p.keep_prob, 0.15);
  PPOParams bad;
  bad.gamma = 0.0;
  EXPECT_THROW(check_params(bad), Error);
}

}  // namespace
}  // namespace wpt

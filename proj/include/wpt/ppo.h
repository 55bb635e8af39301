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

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wpt/mlp.h"

namespace wpt {

enum class Optimizer { kSgd, kAdam };

struct PPOParams {
  double gamma = 0.99;
  double mu = 0.95;  // GAE decay
  double clip = 0.2;
  double c1 = 0.15;  // value-loss weight
  double c2 = 20.0;  // entropy weight
  int horizon = 64;  // T
  int epochs = 4;
  int minibatch = 16;
  double learning_rate = 1e-3;
  double lr_decay = 0.98;  // applied after every update round
  double keep_prob = 0.15;
  bool normalize_advantages = true;
  double max_grad_norm = 0.5;  // 0 disables clipping
  Optimizer optimizer = Optimizer::kSgd;
  std::vector<int> hidden{512, 1024, 1024, 512};
};

// InvalidConfig when a field is out of range.
void check_params(const PPOParams& p);

// Shared trunk (tanh for the first half of the hidden layers, selu for the
// rest, dropout after the last) and one linear output layer: `actions` logits
// followed by the state value.
template <typename Scalar>
Mlp<Scalar> make_policy_network(int inputs, int actions, const PPOParams& p, std::mt19937_64& rng);

// r = alpha_prev - min(beta, 2 alpha_prev).
double compute_reward(double alpha_prev, double beta);

// A_t = delta_t + gamma mu A_{t+1}, delta_t = r_t + gamma V_{t+1} - V_t.
// `values` carries the bootstrap value last. LengthMismatch otherwise.
std::vector<double> compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                                double gamma, double mu);

// Scales advantages to zero mean, unit variance (no-op for fewer than 2).
void normalize(std::vector<double>& advantages);

template <typename Scalar>
std::vector<double> log_softmax(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& logits);
double categorical_entropy(const std::vector<double>& log_probs);
// Multinomial draw from softmax(logits).
int sample_action(const std::vector<double>& log_probs, std::mt19937_64& rng);

template <typename Scalar>
struct PolicyBatch {
  typename Mlp<Scalar>::Matrix obs;  // features x batch
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> value_targets;  // A_t + V_old(s_t)
};

template <typename Scalar>
struct LossResult {
  double loss = 0.0;  // -L, the minimized quantity
  double surrogate = 0.0;
  double value_error = 0.0;
  double entropy = 0.0;
  typename Mlp<Scalar>::Vector grad;  // d(loss)/d(params)
};

// Batch mean of L = L_clip - c1 L_VF + c2 S; returns -L and its gradient.
// Dropout is sampled from `dropout_rng` when given. NonFiniteLoss.
template <typename Scalar>
LossResult<Scalar> ppo_loss(const Mlp<Scalar>& net, const PolicyBatch<Scalar>& batch,
                            const PPOParams& p, std::mt19937_64* dropout_rng = nullptr);

// One rollout of T transitions plus the bootstrap value of the state after.
struct Rollout {
  std::vector<std::vector<double>> obs;
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  double bootstrap_value = 0.0;

  std::size_t size() const { return actions.size(); }
  void clear();
};

struct UpdateStats {
  double loss = 0.0;
  double entropy = 0.0;
};

// First-order optimizer state for one network.
template <typename Scalar>
struct OptimizerState {
  typename Mlp<Scalar>::Vector m, v;
  std::uint64_t t = 0;
};

// GAE, optional normalization, then `epochs` passes of shuffled minibatch
// steps of size `lr`.
template <typename Scalar>
UpdateStats ppo_update(Mlp<Scalar>& net, const Rollout& rollout, const PPOParams& p, double lr,
                       std::mt19937_64& rng, OptimizerState<Scalar>& state);

}  // namespace wpt

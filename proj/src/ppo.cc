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

#include "wpt/ppo.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wpt {

void check_params(const PPOParams& p) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (!(p.gamma > 0.0 && p.gamma <= 1.0)) fail("gamma must be in (0, 1]");
  if (!(p.mu >= 0.0 && p.mu <= 1.0)) fail("mu must be in [0, 1]");
  if (!(p.clip > 0.0)) fail("clip must be > 0");
  if (!(p.c1 >= 0.0) || !(p.c2 >= 0.0)) fail("c1 and c2 must be >= 0");
  if (p.horizon < 1 || p.epochs < 1 || p.minibatch < 1) fail("horizon, epochs and minibatch must be >= 1");
  if (!(p.learning_rate >= 0.0) || !(p.lr_decay > 0.0)) fail("learning rate must be >= 0, decay > 0");
  if (!(p.keep_prob > 0.0 && p.keep_prob <= 1.0)) fail("keep_prob must be in (0, 1]");
  if (!(p.max_grad_norm >= 0.0)) fail("max_grad_norm must be >= 0");
  for (int h : p.hidden)
    if (h < 1) fail("hidden widths must be >= 1");
}

template <typename Scalar>
Mlp<Scalar> make_policy_network(int inputs, int actions, const PPOParams& p, std::mt19937_64& rng) {
  std::vector<int> dims{inputs};
  std::vector<Activation> acts;
  for (std::size_t i = 0; i < p.hidden.size(); ++i) {
    dims.push_back(p.hidden[i]);
    acts.push_back(i < p.hidden.size() / 2 ? Activation::kTanh : Activation::kSelu);
  }
  dims.push_back(actions + 1);
  acts.push_back(Activation::kLinear);
  const int dropout = p.hidden.empty() ? -1 : static_cast<int>(p.hidden.size()) - 1;
  Mlp<Scalar> net(dims, acts, p.keep_prob, dropout);
  net.init(rng);
  // Near-uniform initial policy and near-zero initial value.
  net.weight(net.layers() - 1) *= Scalar(0.01);
  return net;
}

double compute_reward(double alpha_prev, double beta) {
  return alpha_prev - std::min(beta, 2.0 * alpha_prev);
}

std::vector<double> compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                                double gamma, double mu) {
  if (values.size() != rewards.size() + 1) {
    throw Error(ErrorCode::kLengthMismatch, "gae needs " + std::to_string(rewards.size() + 1) +
                                                " values, got " + std::to_string(values.size()));
  }
  std::vector<double> adv(rewards.size());
  double running = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    const double delta = rewards[t] + gamma * values[t + 1] - values[t];
    running = delta + gamma * mu * running;
    adv[t] = running;
  }
  return adv;
}

void normalize(std::vector<double>& a) {
  if (a.size() < 2) return;
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
  double var = 0.0;
  for (double v : a) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(a.size()));
  for (double& v : a) v = (v - mean) / (sd + 1e-8);
}

template <typename Scalar>
std::vector<double> log_softmax(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& logits) {
  const double hi = static_cast<double>(logits.maxCoeff());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) sum += std::exp(static_cast<double>(logits[i]) - hi);
  const double lse = hi + std::log(sum);
  std::vector<double> out(static_cast<std::size_t>(logits.size()));
  for (Eigen::Index i = 0; i < logits.size(); ++i) out[i] = static_cast<double>(logits[i]) - lse;
  return out;
}

double categorical_entropy(const std::vector<double>& log_probs) {
  double s = 0.0;
  for (double lp : log_probs) {
    if (std::isfinite(lp)) s -= std::exp(lp) * lp;
  }
  return std::max(s, 0.0);
}

int sample_action(const std::vector<double>& log_probs, std::mt19937_64& rng) {
  std::vector<double> w(log_probs.size());
  std::transform(log_probs.begin(), log_probs.end(), w.begin(), [](double lp) { return std::exp(lp); });
  std::discrete_distribution<int> pick(w.begin(), w.end());
  return pick(rng);
}

template <typename Scalar>
LossResult<Scalar> ppo_loss(const Mlp<Scalar>& net, const PolicyBatch<Scalar>& batch,
                            const PPOParams& p, std::mt19937_64* dropout_rng) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  const Eigen::Index n = batch.obs.cols();
  if (n == 0 || batch.actions.size() != static_cast<std::size_t>(n) ||
      batch.old_log_probs.size() != batch.actions.size() ||
      batch.advantages.size() != batch.actions.size() ||
      batch.value_targets.size() != batch.actions.size()) {
    throw Error(ErrorCode::kLengthMismatch, "ppo batch fields differ in length");
  }
  typename Mlp<Scalar>::Tape tape;
  const Matrix out = net.forward(batch.obs, &tape, dropout_rng);
  const Eigen::Index actions = out.rows() - 1;

  LossResult<Scalar> r;
  Matrix g(out.rows(), n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const int a = batch.actions[j];
    if (a < 0 || a >= actions) throw Error(ErrorCode::kIndexOutOfRange, "action " + std::to_string(a));
    const auto lp = log_softmax<Scalar>(out.col(j).head(actions));
    const double entropy = categorical_entropy(lp);
    const double adv = batch.advantages[j];
    const double ratio = std::exp(lp[a] - batch.old_log_probs[j]);
    const double unclipped = ratio * adv;
    const double clipped = std::clamp(ratio, 1.0 - p.clip, 1.0 + p.clip) * adv;
    const double surrogate = std::min(unclipped, clipped);
    const double d_logp = unclipped <= clipped ? ratio * adv : 0.0;
    const double v = static_cast<double>(out(actions, j));
    const double verr = v - batch.value_targets[j];

    r.surrogate += surrogate * inv_n;
    r.value_error += verr * verr * inv_n;
    r.entropy += entropy * inv_n;

    // g = d(-L_j / n)/d(output).
    for (Eigen::Index k = 0; k < actions; ++k) {
      const double pk = std::exp(lp[k]);
      const double d_surr = d_logp * ((k == a ? 1.0 : 0.0) - pk);
      const double d_ent = -pk * (lp[k] + entropy);
      g(k, j) = static_cast<Scalar>(-(d_surr + p.c2 * d_ent) * inv_n);
    }
    g(actions, j) = static_cast<Scalar>(2.0 * p.c1 * verr * inv_n);
  }
  r.loss = -(r.surrogate - p.c1 * r.value_error + p.c2 * r.entropy);
  if (!std::isfinite(r.loss)) throw Error(ErrorCode::kNonFiniteLoss, "ppo loss is " + std::to_string(r.loss));
  r.grad = net.backward(tape, g);
  return r;
}

void Rollout::clear() {
  obs.clear();
  actions.clear();
  log_probs.clear();
  rewards.clear();
  values.clear();
  bootstrap_value = 0.0;
}

namespace {

template <typename Scalar>
void step(Mlp<Scalar>& net, const typename Mlp<Scalar>::Vector& grad, const PPOParams& p, double lr,
          OptimizerState<Scalar>& state) {
  if (p.optimizer == Optimizer::kSgd) {
    net.params() -= static_cast<Scalar>(lr) * grad;
    return;
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  if (state.m.size() != grad.size()) {
    state.m = Mlp<Scalar>::Vector::Zero(grad.size());
    state.v = Mlp<Scalar>::Vector::Zero(grad.size());
    state.t = 0;
  }
  ++state.t;
  state.m = Scalar(kBeta1) * state.m + Scalar(1 - kBeta1) * grad;
  state.v = Scalar(kBeta2) * state.v + Scalar(1 - kBeta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.t));
  const Scalar step_size = static_cast<Scalar>(lr / c1);
  const Scalar root_c2 = static_cast<Scalar>(std::sqrt(c2));
  net.params().array() -=
      step_size * state.m.array() / ((state.v.array().sqrt() / root_c2) + Scalar(kEps));
}

}  // namespace

template <typename Scalar>
UpdateStats ppo_update(Mlp<Scalar>& net, const Rollout& rollout, const PPOParams& p, double lr,
                       std::mt19937_64& rng, OptimizerState<Scalar>& state) {
  const std::size_t n = rollout.size();
  if (n == 0) return {};
  std::vector<double> values = rollout.values;
  values.push_back(rollout.bootstrap_value);
  std::vector<double> adv = compute_gae(rollout.rewards, values, p.gamma, p.mu);
  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i) targets[i] = adv[i] + rollout.values[i];
  if (p.normalize_advantages) normalize(adv);

  const Eigen::Index features = static_cast<Eigen::Index>(rollout.obs.front().size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64* dropout = p.keep_prob < 1.0 ? &rng : nullptr;

  UpdateStats stats;
  int steps = 0;
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t lo = 0; lo < n; lo += static_cast<std::size_t>(p.minibatch)) {
      const std::size_t hi = std::min(n, lo + static_cast<std::size_t>(p.minibatch));
      PolicyBatch<Scalar> b;
      b.obs.resize(features, static_cast<Eigen::Index>(hi - lo));
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t s = order[i];
        for (Eigen::Index f = 0; f < features; ++f) {
          b.obs(f, static_cast<Eigen::Index>(i - lo)) = static_cast<Scalar>(rollout.obs[s][f]);
        }
        b.actions.push_back(rollout.actions[s]);
        b.old_log_probs.push_back(rollout.log_probs[s]);
        b.advantages.push_back(adv[s]);
        b.value_targets.push_back(targets[s]);
      }
      auto r = ppo_loss(net, b, p, dropout);
      if (p.max_grad_norm > 0.0) {
        const double norm = static_cast<double>(r.grad.norm());
        if (norm > p.max_grad_norm) r.grad *= static_cast<Scalar>(p.max_grad_norm / norm);
      }
      step(net, r.grad, p, lr, state);
      stats.loss += r.loss;
      stats.entropy += r.entropy;
      ++steps;
    }
  }
  stats.loss /= steps;
  stats.entropy /= steps;
  return stats;
}

template Mlp<float> make_policy_network<float>(int, int, const PPOParams&, std::mt19937_64&);
template Mlp<double> make_policy_network<double>(int, int, const PPOParams&, std::mt19937_64&);
template std::vector<double> log_softmax<float>(const Eigen::VectorXf&);
template std::vector<double> log_softmax<double>(const Eigen::VectorXd&);
template LossResult<float> ppo_loss<float>(const Mlp<float>&, const PolicyBatch<float>&,
                                           const PPOParams&, std::mt19937_64*);
template LossResult<double> ppo_loss<double>(const Mlp<double>&, const PolicyBatch<double>&,
                                             const PPOParams&, std::mt19937_64*);
template UpdateStats ppo_update<float>(Mlp<float>&, const Rollout&, const PPOParams&, double,
                                       std::mt19937_64&, OptimizerState<float>&);
template UpdateStats ppo_update<double>(Mlp<double>&, const Rollout&, const PPOParams&, double,
                                        std::mt19937_64&, OptimizerState<double>&);

}  // namespace wpt

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

#include "wpt/rl_search.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "wpt/hash.h"

namespace wpt {

Observation make_observation(const OperatorSpec& op, const ScheduleConfig& cfg, double alpha_ms) {
  if (cfg.values.size() != conv_param::kCount) {
    throw Error(ErrorCode::kLengthMismatch, "observation needs a 7-value conv config, got " +
                                                std::to_string(cfg.values.size()));
  }
  Observation o{};
  const std::int64_t head[] = {op.n, op.c_in, op.c_out, op.k_h, op.k_w, op.h, op.w, op.stride};
  for (std::size_t i = 0; i < 8; ++i) o[i] = static_cast<double>(head[i]);
  o[8] = op.padding == Padding::kSame ? 1.0 : 0.0;
  for (std::size_t i = 0; i < conv_param::kCount; ++i) o[9 + i] = static_cast<double>(cfg.values[i]);
  o[16] = alpha_ms;
  return o;
}

std::vector<double> scale_observation(const Observation& obs) {
  std::vector<double> f(obs.begin(), obs.end());
  for (std::size_t i = 0; i < 16; ++i) {
    if (i != 8) f[i] = std::log2(std::max(obs[i], 1.0));
  }
  return f;
}

Action decode_action(std::size_t a, const ScheduleTemplate& t) {
  std::size_t rest = a;
  for (std::size_t p = 0; p < t.size(); ++p) {
    const auto& values = t.params()[p].values;
    if (rest < values.size()) return {p, rest, values[rest]};
    rest -= values.size();
  }
  throw Error(ErrorCode::kIndexOutOfRange,
              "action " + std::to_string(a) + " >= " + std::to_string(t.action_count()));
}

ScheduleConfig apply_action(const ScheduleConfig& cfg, const Action& action, const ScheduleTemplate& t) {
  ScheduleConfig next = cfg;
  next.values.at(action.param) = action.value;
  return is_valid(next, t) ? next : cfg;
}

nlohmann::json to_json(const RLStep& s) {
  return {{"step", s.step},       {"beta_ms", s.beta_ms}, {"alpha_ms", s.alpha_ms},
          {"reward", s.reward},   {"loss", s.loss},       {"entropy", s.entropy},
          {"best_ms", s.best_ms}};
}

RLResult run_rl_search(ConfigOracle& oracle, const RLParams& params, std::uint64_t seed) {
  check_params(params.ppo);
  const auto& t = oracle.schedule_template();
  const auto& op = oracle.op();
  std::uint64_t max_steps = params.max_steps;
  if (max_steps == 0) {
    if (oracle.budget() == 0) throw Error(ErrorCode::kInvalidConfig, "rl search needs a budget or max_steps");
    max_steps = 16 * oracle.budget();
  }
  const std::uint64_t used_before = oracle.used();

  std::mt19937_64 init_rng(derive_seed(seed, 1));
  std::mt19937_64 act_rng(derive_seed(seed, 2));
  std::mt19937_64 update_rng(derive_seed(seed, 3));
  const int actions = static_cast<int>(t.action_count());
  Mlp<float> net = make_policy_network<float>(kObservationSize, actions, params.ppo, init_rng);

  ScheduleConfig cfg = random_config(t, act_rng);
  const auto first = oracle.evaluate(cfg);
  if (!first) throw Error(ErrorCode::kInvalidConfig, "evaluation budget admits no config");
  RuntimeTracker tracker{0.0, 0, params.average};
  tracker = update_moving_average(tracker, first->runtime_ms);

  RLResult result;
  result.curve.push_back({0, first->runtime_ms, tracker.alpha, 0.0, 0.0, 0.0,
                          oracle.best_result().runtime_ms});

  auto features = [&](const ScheduleConfig& c, double alpha) {
    const auto f = scale_observation(make_observation(op, c, alpha));
    Eigen::VectorXf x(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) x[static_cast<Eigen::Index>(i)] = static_cast<float>(f[i]);
    return std::make_pair(f, x);
  };

  Rollout rollout;
  OptimizerState<float> opt_state;
  UpdateStats last;
  double lr = params.ppo.learning_rate;
  for (std::uint64_t step = 1; step <= max_steps; ++step) {
    auto [f, x] = features(cfg, tracker.alpha);
    const Eigen::MatrixXf out = net.forward(x);
    const auto lp = log_softmax<float>(out.col(0).head(actions));
    const int a = sample_action(lp, act_rng);
    const ScheduleConfig next = apply_action(cfg, decode_action(static_cast<std::size_t>(a), t), t);

    const auto res = oracle.evaluate(next);
    if (!res) break;
    const double beta = res->runtime_ms;
    const double reward = compute_reward(tracker.alpha, beta) * params.reward_scale;
    tracker = update_moving_average(tracker, beta);
    cfg = next;

    rollout.obs.push_back(std::move(f));
    rollout.actions.push_back(a);
    rollout.log_probs.push_back(lp[static_cast<std::size_t>(a)]);
    rollout.rewards.push_back(reward);
    rollout.values.push_back(static_cast<double>(out(actions, 0)));

    if (rollout.size() == static_cast<std::size_t>(params.ppo.horizon)) {
      rollout.bootstrap_value = static_cast<double>(net.forward(features(cfg, tracker.alpha).second)(actions, 0));
      last = ppo_update(net, rollout, params.ppo, lr, update_rng, opt_state);
      lr *= params.ppo.lr_decay;
      ++result.updates;
      rollout.clear();
    }
    result.curve.push_back({step, beta, tracker.alpha, reward, last.loss, last.entropy,
                            oracle.best_result().runtime_ms});
  }

  result.best = oracle.best_config();
  result.best_result = oracle.best_result();
  result.evaluations = oracle.used() - used_before;
  return result;
}

RLResult run_rl_search(const OperatorSpec& op, const ScheduleTemplate& t, const RLParams& params,
                       Evaluator& evaluator, std::uint64_t seed, std::uint64_t budget) {
  ConfigOracle oracle(evaluator, op, t, budget);
  return run_rl_search(oracle, params, seed);
}

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes little-endian");
constexpr char kMagic[8] = {'W', 'P', 'T', 'N', 'E', 'T', '0', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error(ErrorCode::kParseError, "truncated checkpoint");
  return v;
}

}  // namespace

void save_checkpoint(const Mlp<float>& net, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(net.layers()));
  for (int d : net.dims()) put<std::uint32_t>(os, static_cast<std::uint32_t>(d));
  for (auto a : net.activations()) put<std::uint8_t>(os, static_cast<std::uint8_t>(a));
  put<float>(os, static_cast<float>(net.keep_prob()));
  put<std::int32_t>(os, net.dropout_layer());
  put<std::uint64_t>(os, static_cast<std::uint64_t>(net.num_params()));
  os.write(reinterpret_cast<const char*>(net.params().data()),
           static_cast<std::streamsize>(net.num_params() * sizeof(float)));
  if (!os) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

Mlp<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kParseError, path.string() + " is not a network checkpoint");
  }
  const auto layers = get<std::uint32_t>(is);
  if (layers == 0 || layers > 64) throw Error(ErrorCode::kParseError, "bad layer count");
  std::vector<int> dims;
  for (std::uint32_t i = 0; i <= layers; ++i) dims.push_back(static_cast<int>(get<std::uint32_t>(is)));
  std::vector<Activation> acts;
  for (std::uint32_t i = 0; i < layers; ++i) {
    const auto a = get<std::uint8_t>(is);
    if (a > static_cast<std::uint8_t>(Activation::kSelu)) throw Error(ErrorCode::kParseError, "bad activation");
    acts.push_back(static_cast<Activation>(a));
  }
  const auto keep = get<float>(is);
  const auto dropout = get<std::int32_t>(is);
  Mlp<float> net(dims, acts, keep, dropout);
  if (get<std::uint64_t>(is) != static_cast<std::uint64_t>(net.num_params())) {
    throw Error(ErrorCode::kParseError, "checkpoint parameter count does not match its dims");
  }
  if (!is.read(reinterpret_cast<char*>(net.params().data()),
               static_cast<std::streamsize>(net.num_params() * sizeof(float)))) {
    throw Error(ErrorCode::kParseError, "truncated checkpoint");
  }
  return net;
}

}  // namespace wpt

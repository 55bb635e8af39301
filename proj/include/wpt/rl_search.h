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

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"
#include "wpt/ppo.h"
#include "wpt/search.h"

namespace wpt {

inline constexpr std::size_t kObservationSize = 17;

// N, C_in, C_out, K_h, K_w, H, W, Stride, Padding (0 VALID, 1 SAME),
// T_x, T_y, T_z, Tile_x, Tile_y, Tile_z, Tile_rz, alpha.
using Observation = std::array<double, kObservationSize>;

// LengthMismatch unless `cfg` has the 7 canonical conv values.
Observation make_observation(const OperatorSpec& op, const ScheduleConfig& cfg, double alpha_ms);
// Network features: log2 of sizes and config values, padding as 0/1, alpha in ms.
std::vector<double> scale_observation(const Observation& obs);

struct Action {
  std::size_t param = 0;
  std::size_t value_index = 0;
  std::int64_t value = 0;
};

// Action a selects the domain block containing it; IndexOutOfRange unless
// 0 <= a < t.action_count().
Action decode_action(std::size_t a, const ScheduleTemplate& t);
// Config with the action applied, or `cfg` itself when the result is invalid.
ScheduleConfig apply_action(const ScheduleConfig& cfg, const Action& action, const ScheduleTemplate& t);

struct RLParams {
  PPOParams ppo;
  AverageMode average = AverageMode::kStepNormalized;
  double reward_scale = 1.0;
  // Environment steps before giving up; 0 means 16 x the oracle budget.
  std::uint64_t max_steps = 0;
};

struct RLStep {
  std::uint64_t step = 0;
  double beta_ms = 0.0;
  double alpha_ms = 0.0;
  double reward = 0.0;
  double loss = 0.0;
  double entropy = 0.0;
  double best_ms = 0.0;
};

nlohmann::json to_json(const RLStep& s);

struct RLResult {
  ScheduleConfig best;
  EvalResult best_result;
  std::vector<RLStep> curve;
  std::uint64_t evaluations = 0;
  std::uint64_t updates = 0;
};

// PPO search from a random initial config. Stops when the oracle budget is
// spent (an unseen config is requested) or after max_steps.
RLResult run_rl_search(ConfigOracle& oracle, const RLParams& params, std::uint64_t seed);
RLResult run_rl_search(const OperatorSpec& op, const ScheduleTemplate& t, const RLParams& params,
                       Evaluator& evaluator, std::uint64_t seed, std::uint64_t budget);

// Checkpoint layout, little-endian:
//   char[8] "WPTNET01", u32 L, u32 dims[L + 1], u8 activation[L],
//   f32 keep_prob, i32 dropout_layer, u64 P, f32 params[P]
void save_checkpoint(const Mlp<float>& net, const std::filesystem::path& path);
Mlp<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace wpt

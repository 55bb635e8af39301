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
#include <filesystem>
#include <fstream>

#include "wpt/rl_search.h"

namespace wpt {
namespace {

const OperatorSpec kConv = conv2d_spec(1, 3, 64, 3, 3, 112, 96, 1, Padding::kSame);

RLParams small_params() {
  RLParams p;
  p.ppo.hidden = {32, 32};
  p.ppo.horizon = 16;
  p.ppo.minibatch = 8;
  return p;
}

TEST(Action, DecodesByParameterBlocks) {
  std::vector<ParamDomain> d;
  for (int i = 0; i < 7; ++i) d.push_back({"p" + std::to_string(i), {1, 2, 3, 4, 5, 6, 7, 8}});
  const ScheduleTemplate t("wide", OpKind::kConv2D, d);
  ASSERT_EQ(t.action_count(), 56u);
  const auto a = decode_action(19, t);
  EXPECT_EQ(a.param, 2u);
  EXPECT_EQ(a.value_index, 3u);
  EXPECT_EQ(a.value, 4);
  EXPECT_EQ(decode_action(0, t).param, 0u);
  EXPECT_EQ(decode_action(55, t).param, 6u);
  EXPECT_EQ(decode_action(55, t).value_index, 7u);
  try {
    decode_action(56, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfRange);
  }
}

TEST(Action, EveryActionDecodesToItsDomain) {
  const auto t = conv_template();
  for (std::size_t a = 0; a < t.action_count(); ++a) {
    const auto act = decode_action(a, t);
    EXPECT_EQ(t.params()[act.param].values[act.value_index], act.value);
  }
}

TEST(Action, InvalidTransitionKeepsConfig) {
  const auto t = conv_template();
  const ScheduleConfig cfg{"conv2d", {32, 32, 1, 1, 1, 1, 1}};
  const auto a = decode_action(17, t);  // T_z = 32 exceeds the thread limit
  ASSERT_EQ(a.param, 2u);
  EXPECT_EQ(apply_action(cfg, a, t), cfg);
  EXPECT_EQ(apply_action(cfg, decode_action(0, t), t).values[0], 1);
}

TEST(Observation, SizeAndFiniteness) {
  const auto o = make_observation(kConv, unit_config(conv_template()), 3.5);
  EXPECT_EQ(o.size(), 17u);
  EXPECT_EQ(o[16], 3.5);
  for (double v : scale_observation(o)) EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(scale_observation(o).size(), 17u);
}

TEST(RlSearch, BudgetOneReturnsInitialConfig) {
  SyntheticEvaluator ev;
  const auto r = run_rl_search(kConv, conv_template(), small_params(), ev, 5, 1);
  EXPECT_EQ(r.evaluations, 1u);
  EXPECT_EQ(r.best.values.size(), 7u);
  EXPECT_EQ(r.best_result.runtime_ms, r.curve.front().beta_ms);
}

TEST(RlSearch, RespectsBudgetAndTracksBest) {
  SyntheticEvaluator ev;
  const auto r = run_rl_search(kConv, conv_template(), small_params(), ev, 7, 64);
  EXPECT_LE(r.evaluations, 64u);
  EXPECT_EQ(ev.evaluations(), r.evaluations);
  EXPECT_TRUE(is_valid(r.best, conv_template()));
  for (std::size_t i = 1; i < r.curve.size(); ++i) EXPECT_LE(r.curve[i].best_ms, r.curve[i - 1].best_ms);
  EXPECT_EQ(r.curve.back().best_ms, r.best_result.runtime_ms);
  EXPECT_GT(r.updates, 0u);
}

TEST(RlSearch, DeterministicCurve) {
  SyntheticEvaluator a, b;
  const auto ra = run_rl_search(kConv, conv_template(), small_params(), a, 9, 48);
  const auto rb = run_rl_search(kConv, conv_template(), small_params(), b, 9, 48);
  ASSERT_EQ(ra.curve.size(), rb.curve.size());
  for (std::size_t i = 0; i < ra.curve.size(); ++i) EXPECT_EQ(to_json(ra.curve[i]).dump(), to_json(rb.curve[i]).dump());
}

TEST(RlSearch, NeedsBudgetOrStepLimit) {
  SyntheticEvaluator ev;
  const auto t = conv_template();
  ConfigOracle oracle(ev, kConv, t);
  EXPECT_THROW(run_rl_search(oracle, small_params(), 1), Error);
}

TEST(Checkpoint, RoundTrip) {
  PPOParams p;
  p.hidden = {8, 8};
  std::mt19937_64 rng(3);
  const auto net = make_policy_network<float>(17, 34, p, rng);
  const auto path = std::filesystem::temp_directory_path() / "wpt_rl_checkpoint.bin";
  save_checkpoint(net, path);
  const auto back = load_checkpoint(path);
  EXPECT_EQ(back.dims(), net.dims());
  EXPECT_EQ(back.activations(), net.activations());
  EXPECT_EQ(back.dropout_layer(), net.dropout_layer());
  EXPECT_EQ(back.params(), net.params());
}

TEST(Checkpoint, RejectsForeignFile) {
  const auto path = std::filesystem::temp_directory_path() / "wpt_rl_not_a_checkpoint.bin";
  std::ofstream(path) << "hello world";
  try {
    load_checkpoint(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
}

}  // namespace
}  // namespace wpt

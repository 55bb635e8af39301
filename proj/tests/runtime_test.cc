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

#include <filesystem>
#include <fstream>

#include "test_util.h"
#include "wpt/interpreter.h"
#include "wpt/runtime.h"
#include "wpt/tuner.h"

namespace wpt {
namespace {

Selections reference_selections(const Graph& g) {
  Selections s;
  for (const auto& n : g.nodes()) {
    if (!is_compute(n.op.kind)) continue;
    ImplementationCandidate c;
    c.measured = EvalResult{1.0, EvalSource::kSynthetic};
    s[n.id] = c;
  }
  return s;
}

TEST(Execute, ToyGraphMatchesInterpreter) {
  const auto raw = testing::toy_graph(3, 12);
  const auto g = optimize_graph(raw);
  auto s = reference_selections(g);
  std::mt19937_64 rng(1);
  for (const auto& n : g.nodes()) {
    if (!n.op.is_conv()) continue;
    s[n.id].source = ImplSource::kGeneratedRL;
    s[n.id].kernel = TunedKernel{n.op, random_config(conv_template(), rng)};
  }
  const auto plan = build_plan(g, s);
  const TensorMap in{{"x", testing::random_tensor(testing::nchw(1, 3, 12, 12), 5)}};
  const auto got = execute(plan, in);
  const auto want = interpret(raw, in);
  ASSERT_EQ(got.outputs.size(), 1u);
  EXPECT_LT(max_abs_diff(got.outputs[0], want[0]), 1e-4f);
  EXPECT_EQ(got.ledger.size(), plan.steps.size());
}

TEST(Execute, FusedPlanMatchesUnfusedGraph) {
  const auto raw = testing::toy_graph();
  const auto g = optimize_graph(raw);
  const auto plan = build_plan(g, reference_selections(g));
  const TensorMap in{{"x", testing::random_tensor(testing::nchw(1, 3, 8, 8), 6)}};
  EXPECT_LT(max_abs_diff(execute(plan, in).outputs[0], interpret(raw, in)[0]), 1e-5f);
}

TEST(Execute, IdentityGraphReturnsInput) {
  Graph g;
  g.add(input_node("x", testing::nchw(1, 2, 3, 3)));
  g.add(simple_node("id", OpKind::kIdentity, {"x"}));
  g.set_outputs({"id"});
  const auto x = testing::random_tensor(testing::nchw(1, 2, 3, 3), 2);
  const auto out = execute(build_plan(g, reference_selections(g)), {{"x", x}}).outputs;
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].data, x.data);
}

TEST(Execute, MissingInput) {
  const auto g = optimize_graph(testing::toy_graph());
  const auto plan = build_plan(g, reference_selections(g));
  try {
    execute(plan, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(Execute, WrongInputShape) {
  const auto g = optimize_graph(testing::toy_graph());
  const auto plan = build_plan(g, reference_selections(g));
  EXPECT_THROW(execute(plan, {{"x", testing::random_tensor(testing::nchw(1, 3, 9, 9), 1)}}), Error);
}

TEST(Execute, DeterministicOutputs) {
  const auto g = optimize_graph(testing::toy_graph());
  const auto plan = build_plan(g, reference_selections(g));
  const TensorMap in{{"x", testing::random_tensor(testing::nchw(1, 3, 8, 8), 7)}};
  EXPECT_EQ(execute(plan, in).outputs[0].data, execute(plan, in).outputs[0].data);
}

TEST(Ledger, PositiveEntriesAndTotal) {
  const auto g = optimize_graph(testing::toy_graph());
  const auto plan = build_plan(g, reference_selections(g));
  const auto r = execute(plan, {{"x", testing::random_tensor(testing::nchw(1, 3, 8, 8), 8)}});
  double total = 0.0, peak = 0.0;
  for (const auto& e : r.ledger) {
    EXPECT_GT(e.runtime_ms, 0.0);
    total += e.runtime_ms;
    peak = std::max(peak, e.runtime_ms);
  }
  EXPECT_GE(total, peak);
}

TEST(Ledger, CsvColumns) {
  const auto path = std::filesystem::temp_directory_path() / "wpt_ledger.csv";
  write_ledger_csv({{"conv1", OpKind::kConv2D, ImplSource::kGeneratedGenetic, 0.25}}, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "node_id,op_kind,source,runtime_ms");
  EXPECT_EQ(row.substr(0, row.rfind(',')), "conv1,Conv2D,GeneratedGenetic");
  EXPECT_DOUBLE_EQ(std::stod(row.substr(row.rfind(',') + 1)), 0.25);
}

TEST(Compare, AllReferencePlanIsExact) {
  const auto g = optimize_graph(testing::toy_graph());
  const auto plan = build_plan(g, reference_selections(g));
  EXPECT_EQ(compare_with_reference(g, plan, {{"x", testing::random_tensor(testing::nchw(1, 3, 8, 8), 9)}}), 0.0f);
}

}  // namespace
}  // namespace wpt

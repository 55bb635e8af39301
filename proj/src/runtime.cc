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

#include "wpt/runtime.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <unordered_map>

namespace wpt {

namespace {

Tensor run_step(const Node& node, const PlanStep& step, const std::vector<const Tensor*>& args) {
  if (step.choice.source == ImplSource::kReferenceLibrary) return evaluate_reference(node, args);
  const TunedKernel& k = *step.choice.kernel;
  if (args.size() < 2 || (node.op.kind == OpKind::kFusedConvBiasReLU && args.size() < 3)) {
    throw Error(ErrorCode::kShapeMismatch, node.id + ": missing operands");
  }
  if (node.op.kind == OpKind::kFusedConvBiasReLU) return fused_conv_bias_relu_tuned(*args[0], *args[1], *args[2], k);
  return conv2d_tuned(*args[0], *args[1], k);
}

}  // namespace

ExecutionResult execute(const InferencePlan& plan, const TensorMap& inputs) {
  const Graph& g = plan.graph;
  std::unordered_map<NodeId, const PlanStep*> step_of;
  for (const auto& s : plan.steps) step_of.emplace(s.id, &s);
  auto remaining = g.use_counts();
  for (const auto& o : g.outputs()) ++remaining[o];  // outputs are never freed

  TensorMap live;
  ExecutionResult result;
  std::vector<const Tensor*> args;
  for (const auto& node : g.nodes()) {
    if (node.op.kind == OpKind::kInput) {
      check_input(node, inputs);
      live.emplace(node.id, inputs.at(node.id));
      continue;
    }
    if (node.op.kind == OpKind::kConstant) {
      live.emplace(node.id, constant_value(node));
      continue;
    }
    auto it = step_of.find(node.id);
    if (it == step_of.end()) throw Error(ErrorCode::kUnboundNode, "node '" + node.id + "' is not in the plan");

    args.clear();
    for (const auto& in : node.inputs) args.push_back(&live.at(in));
    const auto t0 = std::chrono::steady_clock::now();
    Tensor out;
    try {
      out = run_step(node, *it->second, args);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kShapeMismatch || e.code() == ErrorCode::kKernelFailure) throw;
      throw Error(ErrorCode::kKernelFailure, node.id + ": " + e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    result.ledger.push_back({node.id, node.op.kind, it->second->choice.source, std::max(ms, 1e-6)});
    live.emplace(node.id, std::move(out));

    for (const auto& in : node.inputs) {
      if (--remaining[in] == 0) live.erase(in);
    }
  }
  for (const auto& o : g.outputs()) result.outputs.push_back(live.at(o));
  return result;
}

float compare_with_reference(const Graph& g, const InferencePlan& plan, const TensorMap& inputs) {
  const auto expected = interpret(g, inputs);
  const auto got = execute(plan, inputs).outputs;
  if (expected.size() != got.size()) {
    throw Error(ErrorCode::kShapeMismatch, "plan yields " + std::to_string(got.size()) + " outputs, reference " +
                                               std::to_string(expected.size()));
  }
  float worst = 0.0f;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const float d = max_abs_diff(expected[i], got[i]);
    if (std::isnan(d)) return d;
    worst = std::max(worst, d);
  }
  return worst;
}

void write_ledger_csv(const std::vector<LedgerEntry>& ledger, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "node_id,op_kind,source,runtime_ms\n" << std::setprecision(9);
  for (const auto& e : ledger) {
    out << e.node_id << ',' << to_string(e.kind) << ',' << to_string(e.source) << ',' << e.runtime_ms << '\n';
  }
}

}  // namespace wpt

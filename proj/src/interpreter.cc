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

#include "wpt/interpreter.h"

#include "wpt/kernels.h"

namespace wpt {

Tensor evaluate_reference(const Node& node, const std::vector<const Tensor*>& in) {
  const auto& op = node.op;
  auto arg = [&](std::size_t i) -> const Tensor& {
    if (i >= in.size() || in[i] == nullptr) {
      throw Error(ErrorCode::kShapeMismatch, node.id + ": missing operand " + std::to_string(i));
    }
    return *in[i];
  };
  switch (op.kind) {
    case OpKind::kConstant: return constant_value(node);
    case OpKind::kConv2D: return conv2d_reference(arg(0), arg(1), op);
    case OpKind::kFusedConvBiasReLU: return fused_conv_bias_relu(arg(0), arg(1), arg(2), op);
    case OpKind::kBiasAdd: return bias_add(arg(0), arg(1));
    case OpKind::kReLU: return relu(arg(0));
    case OpKind::kAdd: return add(arg(0), arg(1));
    case OpKind::kMaxPool: return max_pool(arg(0), op);
    case OpKind::kMatMul: return matmul(arg(0), arg(1));
    case OpKind::kFlatten: return flatten(arg(0));
    case OpKind::kIdentity:
    case OpKind::kDropout: return arg(0);
    case OpKind::kTranspose: {
      if (arg(0).spec.rank() != 4) throw Error(ErrorCode::kUnsupportedRank, node.id + ": transpose of non-rank-4");
      return to_layout(arg(0), op.target_layout);
    }
    case OpKind::kInput: break;
  }
  throw Error(ErrorCode::kInvalidGraph, node.id + ": not a compute node");
}

void check_input(const Node& input, const TensorMap& inputs) {
  auto it = inputs.find(input.id);
  if (it == inputs.end()) throw Error(ErrorCode::kShapeMismatch, "missing input '" + input.id + "'");
  const auto& t = it->second;
  if (t.spec.dims != input.op.tensor.dims || t.spec.layout != input.op.tensor.layout ||
      static_cast<std::int64_t>(t.data.size()) != input.op.tensor.num_elements()) {
    throw Error(ErrorCode::kShapeMismatch, "input '" + input.id + "' does not match its declared spec");
  }
}

std::vector<Tensor> interpret(const Graph& g, const TensorMap& inputs) {
  infer_shapes(g);
  TensorMap values;
  std::vector<const Tensor*> args;
  for (const auto& node : g.nodes()) {
    if (node.op.kind == OpKind::kInput) {
      check_input(node, inputs);
      values.emplace(node.id, inputs.at(node.id));
      continue;
    }
    args.clear();
    for (const auto& id : node.inputs) args.push_back(&values.at(id));
    values.emplace(node.id, evaluate_reference(node, args));
  }
  std::vector<Tensor> outs;
  for (const auto& id : g.outputs()) outs.push_back(values.at(id));
  return outs;
}

}  // namespace wpt

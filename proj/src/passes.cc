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

#include "wpt/passes.h"

#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "wpt/interpreter.h"

namespace wpt {

Graph constant_fold(const Graph& g) {
  infer_shapes(g);
  std::vector<Node> staged;
  std::unordered_map<NodeId, std::size_t> where;
  for (const auto& node : g.nodes()) {
    bool foldable = is_compute(node.op.kind) && !node.inputs.empty();
    for (const auto& in : node.inputs) {
      foldable = foldable && staged[where.at(in)].op.kind == OpKind::kConstant;
    }
    if (foldable) {
      std::vector<Tensor> values;
      values.reserve(node.inputs.size());
      for (const auto& in : node.inputs) values.push_back(constant_value(staged[where.at(in)]));
      std::vector<const Tensor*> args;
      for (const auto& v : values) args.push_back(&v);
      where[node.id] = staged.size();
      staged.push_back(constant_node(node.id, evaluate_reference(node, args)));
    } else {
      where[node.id] = staged.size();
      staged.push_back(node);
    }
  }

  std::unordered_map<NodeId, int> uses;
  for (const auto& n : staged)
    for (const auto& in : n.inputs) ++uses[in];
  for (const auto& o : g.outputs()) ++uses[o];

  Graph out;
  for (auto& n : staged) {
    if (n.op.kind == OpKind::kConstant && uses[n.id] == 0) continue;
    out.add(std::move(n));
  }
  out.set_outputs(g.outputs());
  return out;
}

Graph fuse_operators(const Graph& g) {
  infer_shapes(g);

  // Identity / Dropout removal.
  std::unordered_map<NodeId, NodeId> alias;
  auto resolve = [&](const NodeId& id) {
    auto it = alias.find(id);
    return it == alias.end() ? id : it->second;
  };
  Graph spliced;
  for (const auto& node : g.nodes()) {
    if (node.op.kind == OpKind::kIdentity || node.op.kind == OpKind::kDropout) {
      alias[node.id] = resolve(node.inputs.at(0));
      continue;
    }
    Node copy = node;
    for (auto& in : copy.inputs) in = resolve(in);
    spliced.add(std::move(copy));
  }
  std::vector<NodeId> outputs;
  for (const auto& o : g.outputs()) outputs.push_back(resolve(o));
  spliced.set_outputs(outputs);

  // Conv -> BiasAdd -> ReLU with single-consumer intermediates.
  const auto uses = spliced.use_counts();
  std::unordered_set<NodeId> absorbed;
  std::unordered_map<NodeId, Node> replacement;
  for (const auto& r : spliced.nodes()) {
    if (r.op.kind != OpKind::kReLU) continue;
    const Node& b = spliced.node(r.inputs[0]);
    if (b.op.kind != OpKind::kBiasAdd || uses.at(b.id) != 1) continue;
    const Node& c = spliced.node(b.inputs[0]);
    if (c.op.kind != OpKind::kConv2D || uses.at(c.id) != 1) continue;
    OperatorSpec op = c.op;
    op.kind = OpKind::kFusedConvBiasReLU;
    replacement.emplace(r.id, op_node(r.id, op, {c.inputs[0], c.inputs[1], b.inputs[1]}));
    absorbed.insert(b.id);
    absorbed.insert(c.id);
  }

  Graph out;
  for (const auto& node : spliced.nodes()) {
    if (absorbed.count(node.id)) continue;
    auto it = replacement.find(node.id);
    out.add(it == replacement.end() ? node : it->second);
  }
  out.set_outputs(spliced.outputs());
  return out;
}

namespace {

std::string layout_suffix(Layout l) {
  std::string s(to_string(l));
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return "/to_" + s;
}

}  // namespace

Graph transform_layout(const Graph& g, Layout target) {
  const auto shapes = infer_shapes(g);
  Graph out;
  std::unordered_map<NodeId, NodeId> value_of;  // old id -> id holding the value in `out`

  for (const auto& node : g.nodes()) {
    const TensorSpec& spec = shapes.at(node.id);
    switch (node.op.kind) {
      case OpKind::kTranspose:
        value_of[node.id] = value_of.at(node.inputs[0]);
        break;
      case OpKind::kInput:
        out.add(node);
        value_of[node.id] = node.id;
        if (spec.rank() == 4 && spec.layout != target) {
          NodeId t = node.id + layout_suffix(target);
          out.add(transpose_node(t, node.id, target));
          value_of[node.id] = t;
        }
        break;
      case OpKind::kConstant:
        if (spec.rank() == 4 && spec.layout != target) {
          out.add(constant_node(node.id, to_layout(constant_value(node), target)));
        } else {
          out.add(node);
        }
        value_of[node.id] = node.id;
        break;
      default: {
        Node copy = node;
        for (auto& in : copy.inputs) in = value_of.at(in);
        out.add(std::move(copy));
        value_of[node.id] = node.id;
        break;
      }
    }
  }

  const auto new_shapes = infer_shapes(out);
  std::vector<NodeId> outputs;
  for (const auto& o : g.outputs()) {
    const NodeId& v = value_of.at(o);
    const TensorSpec& want = shapes.at(o);
    if (want.rank() == 4 && new_shapes.at(v).layout != want.layout) {
      NodeId t = v + layout_suffix(want.layout);
      if (!out.contains(t)) out.add(transpose_node(t, v, want.layout));
      outputs.push_back(t);
    } else {
      outputs.push_back(v);
    }
  }
  out.set_outputs(outputs);
  return out;
}

}  // namespace wpt

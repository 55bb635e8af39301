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

#include "wpt/graph.h"

#include <algorithm>
#include <sstream>

namespace wpt {

namespace {

struct KindName {
  OpKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {OpKind::kInput, "Input"},
    {OpKind::kConstant, "Constant"},
    {OpKind::kConv2D, "Conv2D"},
    {OpKind::kMatMul, "MatMul"},
    {OpKind::kBiasAdd, "BiasAdd"},
    {OpKind::kReLU, "ReLU"},
    {OpKind::kMaxPool, "MaxPool"},
    {OpKind::kAdd, "Add"},
    {OpKind::kIdentity, "Identity"},
    {OpKind::kDropout, "Dropout"},
    {OpKind::kFusedConvBiasReLU, "FusedConvBiasReLU"},
    {OpKind::kTranspose, "Transpose"},
    {OpKind::kFlatten, "Flatten"},
};

void expect_arity(const Node& node, const std::vector<TensorSpec>& inputs, std::size_t n) {
  if (inputs.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, node.id + " (" + std::string(to_string(node.op.kind)) +
                                               ") expects " + std::to_string(n) + " inputs, got " +
                                               std::to_string(inputs.size()));
  }
}

[[noreturn]] void mismatch(const Node& node, const std::string& why) {
  throw Error(ErrorCode::kShapeMismatch, node.id + ": " + why);
}

TensorSpec nchw_to_spec(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w,
                        Layout layout) {
  TensorSpec s;
  s.layout = layout;
  if (layout == Layout::kNCHW) {
    s.dims = {n, c, h, w};
  } else {
    s.dims = {n, h, w, c};
  }
  return s;
}

TensorSpec conv_output(const Node& node, const TensorSpec& x, const TensorSpec& filter) {
  const auto& op = node.op;
  if (x.rank() != 4) mismatch(node, "conv input must be rank 4");
  if (filter.rank() != 4) mismatch(node, "conv filter must be rank 4");
  if (filter.layout != x.layout) mismatch(node, "filter layout differs from input layout");
  auto [n, c, h, w] = x.nchw();
  if (n != op.n || c != op.c_in || h != op.h || w != op.w) {
    mismatch(node, "input dims do not match operator attributes");
  }
  auto [o, i, kh, kw] = filter.nchw();
  if (o != op.c_out || i != op.c_in || kh != op.k_h || kw != op.k_w) {
    mismatch(node, "filter dims do not match operator attributes");
  }
  if (op.stride < 1) mismatch(node, "stride must be positive");
  if (op.padding == Padding::kValid && (op.k_h > op.h || op.k_w > op.w)) {
    mismatch(node, "kernel larger than input under VALID padding");
  }
  auto oh = window_output_extent(op.h, op.k_h, op.stride, op.padding);
  auto ow = window_output_extent(op.w, op.k_w, op.stride, op.padding);
  if (oh < 1 || ow < 1) mismatch(node, "empty convolution output");
  return nchw_to_spec(op.n, op.c_out, oh, ow, x.layout);
}

void check_bias(const Node& node, const TensorSpec& x, const TensorSpec& bias) {
  std::int64_t channels = 0;
  if (x.rank() == 4) {
    channels = x.nchw()[1];
  } else if (x.rank() == 2) {
    channels = x.dims[1];
  } else {
    mismatch(node, "bias add expects rank-2 or rank-4 input");
  }
  if (bias.rank() != 1 || bias.dims[0] != channels) mismatch(node, "bias length != channels");
}

}  // namespace

std::string_view to_string(OpKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "Unknown";
}

OpKind parse_op_kind(std::string_view s) {
  for (const auto& kn : kKindNames)
    if (kn.name == s) return kn.kind;
  throw Error(ErrorCode::kParseError, "unknown op '" + std::string(s) + "'");
}

std::string_view to_string(Padding p) { return p == Padding::kSame ? "SAME" : "VALID"; }

Padding parse_padding(std::string_view s) {
  if (s == "SAME") return Padding::kSame;
  if (s == "VALID") return Padding::kValid;
  throw Error(ErrorCode::kParseError, "unknown padding '" + std::string(s) + "'");
}

std::string OperatorSpec::signature() const {
  std::ostringstream os;
  os << to_string(kind);
  if (is_conv()) {
    os << ":n=" << n << ",c_in=" << c_in << ",c_out=" << c_out << ",k_h=" << k_h
       << ",k_w=" << k_w << ",h=" << h << ",w=" << w << ",stride=" << stride
       << ",padding=" << to_string(padding);
  } else if (kind == OpKind::kMaxPool) {
    os << ":k_h=" << k_h << ",k_w=" << k_w << ",stride=" << stride
       << ",padding=" << to_string(padding);
  } else if (kind == OpKind::kTranspose) {
    os << ":layout=" << to_string(target_layout);
  }
  if (kind == OpKind::kInput || kind == OpKind::kConstant) {
    os << ":dims=";
    for (std::size_t i = 0; i < tensor.dims.size(); ++i) os << (i ? "x" : "") << tensor.dims[i];
    os << ",layout=" << to_string(tensor.layout);
  }
  return os.str();
}

OperatorSpec conv2d_spec(std::int64_t n, std::int64_t c_in, std::int64_t c_out, std::int64_t k_h,
                         std::int64_t k_w, std::int64_t h, std::int64_t w, std::int64_t stride,
                         Padding padding) {
  OperatorSpec op;
  op.kind = OpKind::kConv2D;
  op.n = n;
  op.c_in = c_in;
  op.c_out = c_out;
  op.k_h = k_h;
  op.k_w = k_w;
  op.h = h;
  op.w = w;
  op.stride = stride;
  op.padding = padding;
  return op;
}

std::int64_t window_output_extent(std::int64_t in, std::int64_t k, std::int64_t stride,
                                  Padding padding) {
  if (padding == Padding::kSame) return (in + stride - 1) / stride;
  if (in < k) return 0;
  return (in - k) / stride + 1;
}

std::int64_t window_pad_before(std::int64_t in, std::int64_t k, std::int64_t stride,
                               Padding padding) {
  if (padding == Padding::kValid) return 0;
  std::int64_t out = window_output_extent(in, k, stride, padding);
  std::int64_t total = std::max<std::int64_t>((out - 1) * stride + k - in, 0);
  return total / 2;
}

void Graph::add(Node node) {
  if (node.id.empty()) throw Error(ErrorCode::kInvalidGraph, "node with empty id");
  if (contains(node.id)) throw Error(ErrorCode::kInvalidGraph, "duplicate node id '" + node.id + "'");
  for (const auto& in : node.inputs) {
    if (!contains(in)) {
      throw Error(ErrorCode::kInvalidGraph,
                  "node '" + node.id + "' references unknown or later node '" + in + "'");
    }
  }
  index_.emplace(node.id, nodes_.size());
  nodes_.push_back(std::move(node));
}

void Graph::set_outputs(std::vector<NodeId> outputs) {
  for (const auto& o : outputs) {
    if (!contains(o)) throw Error(ErrorCode::kInvalidGraph, "unknown output '" + o + "'");
  }
  outputs_ = std::move(outputs);
}

const Node& Graph::node(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::kInvalidGraph, "no node '" + id + "'");
  return nodes_[it->second];
}

std::unordered_map<NodeId, int> Graph::use_counts() const {
  std::unordered_map<NodeId, int> uses;
  for (const auto& n : nodes_) uses.emplace(n.id, 0);
  for (const auto& n : nodes_)
    for (const auto& in : n.inputs) ++uses[in];
  for (const auto& o : outputs_) ++uses[o];
  return uses;
}

std::vector<NodeId> Graph::input_ids() const {
  std::vector<NodeId> ids;
  for (const auto& n : nodes_)
    if (n.op.kind == OpKind::kInput) ids.push_back(n.id);
  return ids;
}

Node input_node(NodeId id, TensorSpec spec) {
  Node n;
  n.id = std::move(id);
  n.op.kind = OpKind::kInput;
  n.op.tensor = std::move(spec);
  return n;
}

Node constant_node(NodeId id, const Tensor& value) {
  Node n;
  n.id = std::move(id);
  n.op.kind = OpKind::kConstant;
  n.op.tensor = value.spec;
  n.payload = value.data;
  return n;
}

Node op_node(NodeId id, OperatorSpec op, std::vector<NodeId> inputs) {
  Node n;
  n.id = std::move(id);
  n.op = std::move(op);
  n.inputs = std::move(inputs);
  return n;
}

Node simple_node(NodeId id, OpKind kind, std::vector<NodeId> inputs) {
  OperatorSpec op;
  op.kind = kind;
  return op_node(std::move(id), op, std::move(inputs));
}

Node conv_node(NodeId id, const OperatorSpec& conv, NodeId x, NodeId filter) {
  OperatorSpec op = conv;
  op.kind = OpKind::kConv2D;
  return op_node(std::move(id), op, {std::move(x), std::move(filter)});
}

Node maxpool_node(NodeId id, NodeId x, std::int64_t k, std::int64_t stride, Padding padding) {
  OperatorSpec op;
  op.kind = OpKind::kMaxPool;
  op.k_h = op.k_w = k;
  op.stride = stride;
  op.padding = padding;
  return op_node(std::move(id), op, {std::move(x)});
}

Node transpose_node(NodeId id, NodeId x, Layout target) {
  OperatorSpec op;
  op.kind = OpKind::kTranspose;
  op.target_layout = target;
  return op_node(std::move(id), op, {std::move(x)});
}

Tensor constant_value(const Node& node) {
  if (node.op.kind != OpKind::kConstant || !node.payload) {
    throw Error(ErrorCode::kInvalidGraph, node.id + " is not a constant");
  }
  return Tensor(node.op.tensor, *node.payload);
}

bool is_compute(OpKind kind) { return kind != OpKind::kInput && kind != OpKind::kConstant; }

TensorSpec infer_node_shape(const Node& node, const std::vector<TensorSpec>& in) {
  const auto& op = node.op;
  switch (op.kind) {
    case OpKind::kInput:
      expect_arity(node, in, 0);
      check_spec(op.tensor);
      return op.tensor;
    case OpKind::kConstant: {
      expect_arity(node, in, 0);
      check_spec(op.tensor);
      if (!node.payload || static_cast<std::int64_t>(node.payload->size()) != op.tensor.num_elements()) {
        mismatch(node, "constant payload length != product of dims");
      }
      return op.tensor;
    }
    case OpKind::kConv2D:
      expect_arity(node, in, 2);
      return conv_output(node, in[0], in[1]);
    case OpKind::kFusedConvBiasReLU: {
      expect_arity(node, in, 3);
      TensorSpec out = conv_output(node, in[0], in[1]);
      check_bias(node, out, in[2]);
      return out;
    }
    case OpKind::kBiasAdd:
      expect_arity(node, in, 2);
      check_bias(node, in[0], in[1]);
      return in[0];
    case OpKind::kReLU:
    case OpKind::kIdentity:
    case OpKind::kDropout:
      expect_arity(node, in, 1);
      return in[0];
    case OpKind::kAdd:
      expect_arity(node, in, 2);
      if (in[0] != in[1]) mismatch(node, "Add operands differ in shape or layout");
      return in[0];
    case OpKind::kMaxPool: {
      expect_arity(node, in, 1);
      if (in[0].rank() != 4) mismatch(node, "MaxPool expects rank-4 input");
      if (op.k_h < 1 || op.k_w < 1 || op.stride < 1) mismatch(node, "bad pooling window");
      auto [n, c, h, w] = in[0].nchw();
      auto oh = window_output_extent(h, op.k_h, op.stride, op.padding);
      auto ow = window_output_extent(w, op.k_w, op.stride, op.padding);
      if (oh < 1 || ow < 1) mismatch(node, "empty pooling output");
      return nchw_to_spec(n, c, oh, ow, in[0].layout);
    }
    case OpKind::kMatMul: {
      expect_arity(node, in, 2);
      if (in[0].rank() != 2 || in[1].rank() != 2) mismatch(node, "MatMul expects rank-2 operands");
      if (in[0].dims[1] != in[1].dims[0]) mismatch(node, "MatMul inner dims differ");
      TensorSpec out;
      out.dims = {in[0].dims[0], in[1].dims[1]};
      return out;
    }
    case OpKind::kFlatten: {
      expect_arity(node, in, 1);
      if (in[0].rank() < 2) mismatch(node, "Flatten expects rank >= 2");
      TensorSpec out;
      out.dims = {in[0].dims[0], in[0].num_elements() / in[0].dims[0]};
      return out;
    }
    case OpKind::kTranspose:
      expect_arity(node, in, 1);
      return permute_spec(in[0], op.target_layout);
  }
  throw Error(ErrorCode::kInvalidGraph, "unhandled op kind");
}

std::map<NodeId, TensorSpec> infer_shapes(const Graph& g) {
  std::map<NodeId, TensorSpec> shapes;
  std::vector<TensorSpec> in;
  for (const auto& node : g.nodes()) {
    in.clear();
    for (const auto& id : node.inputs) in.push_back(shapes.at(id));
    shapes.emplace(node.id, infer_node_shape(node, in));
  }
  return shapes;
}

}  // namespace wpt

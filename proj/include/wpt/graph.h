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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wpt/tensor.h"

namespace wpt {

using NodeId = std::string;

enum class OpKind {
  kInput,
  kConstant,
  kConv2D,
  kMatMul,
  kBiasAdd,
  kReLU,
  kMaxPool,
  kAdd,
  kIdentity,
  kDropout,
  kFusedConvBiasReLU,
  kTranspose,
  kFlatten,
};

enum class Padding { kValid, kSame };

std::string_view to_string(OpKind kind);
OpKind parse_op_kind(std::string_view s);
std::string_view to_string(Padding p);
Padding parse_padding(std::string_view s);

// Workload description of one operator. Convolution-shaped fields are used by
// Conv2D / FusedConvBiasReLU (all of them) and MaxPool (window, stride,
// padding); `tensor` describes Input and Constant nodes; `target_layout` is
// the destination of a Transpose.
struct OperatorSpec {
  OpKind kind = OpKind::kIdentity;
  std::int64_t n = 0, c_in = 0, c_out = 0;
  std::int64_t k_h = 0, k_w = 0;
  std::int64_t h = 0, w = 0;
  std::int64_t stride = 1;
  Padding padding = Padding::kSame;
  TensorSpec tensor;
  Layout target_layout = Layout::kNCHW;

  bool is_conv() const {
    return kind == OpKind::kConv2D || kind == OpKind::kFusedConvBiasReLU;
  }
  // Stable textual key; used for cache keys, hashing and logs.
  std::string signature() const;

  bool operator==(const OperatorSpec&) const = default;
};

OperatorSpec conv2d_spec(std::int64_t n, std::int64_t c_in, std::int64_t c_out,
                         std::int64_t k_h, std::int64_t k_w, std::int64_t h,
                         std::int64_t w, std::int64_t stride, Padding padding);

// Output extent of a sliding window along one axis.
std::int64_t window_output_extent(std::int64_t in, std::int64_t k, std::int64_t stride,
                                  Padding padding);
// Leading (top/left) padding; SAME splits the total with the extra element
// at the end.
std::int64_t window_pad_before(std::int64_t in, std::int64_t k, std::int64_t stride,
                               Padding padding);

struct Node {
  NodeId id;
  OperatorSpec op;
  std::vector<NodeId> inputs;
  std::optional<std::vector<float>> payload;  // Constant values

  bool operator==(const Node&) const = default;
};

// Nodes are kept in topological (insertion) order; add() rejects unknown
// inputs, so the graph is acyclic by construction.
class Graph {
 public:
  Graph() = default;

  void add(Node node);
  void set_outputs(std::vector<NodeId> outputs);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<NodeId>& outputs() const { return outputs_; }
  bool contains(const NodeId& id) const { return index_.count(id) != 0; }
  const Node& node(const NodeId& id) const;
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  // Number of consuming edges per node; graph outputs count as one use.
  std::unordered_map<NodeId, int> use_counts() const;
  std::vector<NodeId> input_ids() const;

  bool operator==(const Graph& other) const {
    return nodes_ == other.nodes_ && outputs_ == other.outputs_;
  }

 private:
  std::vector<Node> nodes_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<NodeId> outputs_;
};

// Convenience constructors used by tests, tools and passes.
Node input_node(NodeId id, TensorSpec spec);
Node constant_node(NodeId id, const Tensor& value);
Node op_node(NodeId id, OperatorSpec op, std::vector<NodeId> inputs);
Node simple_node(NodeId id, OpKind kind, std::vector<NodeId> inputs);
Node conv_node(NodeId id, const OperatorSpec& conv, NodeId x, NodeId filter);
Node maxpool_node(NodeId id, NodeId x, std::int64_t k, std::int64_t stride, Padding padding);
Node transpose_node(NodeId id, NodeId x, Layout target);

Tensor constant_value(const Node& node);

// Output spec of a single node given the specs of its inputs.
TensorSpec infer_node_shape(const Node& node, const std::vector<TensorSpec>& inputs);
std::map<NodeId, TensorSpec> infer_shapes(const Graph& g);

// Nodes that do work at execution time (everything but Input and Constant).
bool is_compute(OpKind kind);

}  // namespace wpt

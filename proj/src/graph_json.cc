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

#include "wpt/graph_json.h"

#include <fstream>
#include <set>
#include <unordered_map>

namespace wpt {

using nlohmann::json;

namespace {

json nest(const std::vector<float>& data, const std::vector<std::int64_t>& dims, std::size_t axis,
          std::size_t& offset) {
  json arr = json::array();
  if (axis + 1 == dims.size()) {
    for (std::int64_t i = 0; i < dims[axis]; ++i) arr.push_back(data[offset++]);
    return arr;
  }
  for (std::int64_t i = 0; i < dims[axis]; ++i) arr.push_back(nest(data, dims, axis + 1, offset));
  return arr;
}

void flatten_into(const json& j, std::vector<float>& out, std::vector<std::int64_t>& dims,
                  std::size_t depth) {
  if (j.is_number()) {
    if (depth != dims.size()) throw Error(ErrorCode::kParseError, "ragged constant payload");
    out.push_back(j.get<float>());
    return;
  }
  if (!j.is_array()) throw Error(ErrorCode::kParseError, "constant payload must be numeric arrays");
  if (depth == dims.size()) dims.push_back(static_cast<std::int64_t>(j.size()));
  if (dims[depth] != static_cast<std::int64_t>(j.size())) {
    throw Error(ErrorCode::kParseError, "ragged constant payload");
  }
  for (const auto& e : j) flatten_into(e, out, dims, depth + 1);
}

std::int64_t get_int(const json& attrs, const char* key, const std::string& node) {
  if (!attrs.contains(key)) {
    throw Error(ErrorCode::kParseError, "node '" + node + "' missing attribute '" + key + "'");
  }
  return attrs.at(key).get<std::int64_t>();
}

Node node_from_json(const json& j) {
  Node node;
  node.id = j.at("id").get<std::string>();
  node.op.kind = parse_op_kind(j.at("op").get<std::string>());
  if (j.contains("inputs")) node.inputs = j.at("inputs").get<std::vector<std::string>>();
  const json attrs = j.value("attrs", json::object());
  auto& op = node.op;
  switch (op.kind) {
    case OpKind::kConv2D:
    case OpKind::kFusedConvBiasReLU:
      op.n = get_int(attrs, "n", node.id);
      op.c_in = get_int(attrs, "c_in", node.id);
      op.c_out = get_int(attrs, "c_out", node.id);
      op.h = get_int(attrs, "h", node.id);
      op.w = get_int(attrs, "w", node.id);
      [[fallthrough]];
    case OpKind::kMaxPool:
      op.k_h = get_int(attrs, "k_h", node.id);
      op.k_w = get_int(attrs, "k_w", node.id);
      op.stride = attrs.value("stride", std::int64_t{1});
      op.padding = parse_padding(attrs.value("padding", std::string("SAME")));
      break;
    case OpKind::kTranspose:
      op.target_layout = parse_layout(attrs.at("layout").get<std::string>());
      break;
    case OpKind::kInput:
      op.tensor = tensor_spec_from_json(attrs);
      break;
    case OpKind::kConstant: {
      if (!j.contains("const")) throw Error(ErrorCode::kParseError, node.id + ": Constant without const");
      std::vector<float> values;
      std::vector<std::int64_t> nested_dims;
      const json& c = j.at("const");
      if (c.is_number()) {
        values.push_back(c.get<float>());
        nested_dims = {1};
      } else {
        flatten_into(c, values, nested_dims, 0);
      }
      if (attrs.contains("dims")) {
        op.tensor = tensor_spec_from_json(attrs);
      } else {
        op.tensor.dims = nested_dims;
        if (attrs.contains("layout")) op.tensor.layout = parse_layout(attrs.at("layout").get<std::string>());
      }
      node.payload = std::move(values);
      break;
    }
    default:
      break;
  }
  return node;
}

}  // namespace

json tensor_spec_to_json(const TensorSpec& spec) {
  return json{{"dims", spec.dims}, {"layout", std::string(to_string(spec.layout))}, {"dtype", "F32"}};
}

TensorSpec tensor_spec_from_json(const json& j) {
  TensorSpec spec;
  spec.dims = j.at("dims").get<std::vector<std::int64_t>>();
  if (j.contains("layout")) spec.layout = parse_layout(j.at("layout").get<std::string>());
  if (j.contains("dtype") && j.at("dtype").get<std::string>() != "F32") {
    throw Error(ErrorCode::kParseError, "only F32 tensors are supported");
  }
  return spec;
}

json graph_to_json(const Graph& g) {
  json nodes = json::array();
  for (const auto& node : g.nodes()) {
    const auto& op = node.op;
    json attrs = json::object();
    if (op.is_conv()) {
      attrs = {{"n", op.n},     {"c_in", op.c_in}, {"c_out", op.c_out}, {"k_h", op.k_h},
               {"k_w", op.k_w}, {"h", op.h},       {"w", op.w},         {"stride", op.stride},
               {"padding", std::string(to_string(op.padding))}};
    } else if (op.kind == OpKind::kMaxPool) {
      attrs = {{"k_h", op.k_h},
               {"k_w", op.k_w},
               {"stride", op.stride},
               {"padding", std::string(to_string(op.padding))}};
    } else if (op.kind == OpKind::kTranspose) {
      attrs = {{"layout", std::string(to_string(op.target_layout))}};
    } else if (op.kind == OpKind::kInput || op.kind == OpKind::kConstant) {
      attrs = {{"dims", op.tensor.dims}, {"layout", std::string(to_string(op.tensor.layout))}};
    }
    json jn = {{"id", node.id}, {"op", std::string(to_string(op.kind))}, {"inputs", node.inputs}};
    if (!attrs.empty()) jn["attrs"] = attrs;
    if (node.payload) {
      std::size_t offset = 0;
      jn["const"] = nest(*node.payload, op.tensor.dims, 0, offset);
    }
    nodes.push_back(std::move(jn));
  }
  return json{{"nodes", nodes}, {"outputs", g.outputs()}};
}

Graph graph_from_json(const json& doc) {
  std::vector<Node> pending;
  try {
    for (const auto& jn : doc.at("nodes")) pending.push_back(node_from_json(jn));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  // Kahn's algorithm, preferring document order among ready nodes.
  Graph g;
  std::vector<bool> placed(pending.size(), false);
  std::size_t remaining = pending.size();
  std::set<std::string> known_ids;
  for (const auto& n : pending) {
    if (!known_ids.insert(n.id).second) {
      throw Error(ErrorCode::kInvalidGraph, "duplicate node id '" + n.id + "'");
    }
  }
  for (const auto& n : pending)
    for (const auto& in : n.inputs)
      if (!known_ids.count(in)) {
        throw Error(ErrorCode::kInvalidGraph, "node '" + n.id + "' references unknown '" + in + "'");
      }
  while (remaining > 0) {
    bool progressed = false;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (placed[i]) continue;
      bool ready = true;
      for (const auto& in : pending[i].inputs) ready = ready && g.contains(in);
      if (!ready) continue;
      g.add(pending[i]);
      placed[i] = true;
      --remaining;
      progressed = true;
    }
    if (!progressed) throw Error(ErrorCode::kInvalidGraph, "graph contains a cycle");
  }
  try {
    g.set_outputs(doc.at("outputs").get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  infer_shapes(g);
  return g;
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open graph file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return graph_from_json(doc);
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << graph_to_json(g).dump(2) << "\n";
}

}  // namespace wpt

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

#include <filesystem>
#include <string>

#include "json.hpp"
#include "wpt/graph.h"

namespace wpt {

// Graph document:
//   {"nodes":[{"id":..., "op":..., "inputs":[...], "attrs":{...}, "const":[[...]]}],
//    "outputs":[...]}
// Conv/pool attribute keys: n, c_in, c_out, k_h, k_w, h, w, stride, padding.
// Input/Constant carry "dims" and optional "layout"; Transpose carries "layout".
// Nodes may appear in any order; they are topologically sorted on load.
nlohmann::json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& doc);

Graph load_graph(const std::filesystem::path& path);
void save_graph(const Graph& g, const std::filesystem::path& path);

nlohmann::json tensor_spec_to_json(const TensorSpec& spec);
TensorSpec tensor_spec_from_json(const nlohmann::json& j);

}  // namespace wpt

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

#include <map>
#include <vector>

#include "wpt/graph.h"
#include "wpt/tensor.h"

namespace wpt {

using TensorMap = std::map<NodeId, Tensor>;

// Evaluates one compute node with the reference kernels.
Tensor evaluate_reference(const Node& node, const std::vector<const Tensor*>& inputs);

// Reference interpreter: runs every node with the reference kernels and
// returns the graph outputs in order. ShapeMismatch when an Input node has no
// entry in `inputs` or the supplied tensor does not match its spec.
std::vector<Tensor> interpret(const Graph& g, const TensorMap& inputs);

// Validates a user-supplied tensor against an Input node.
void check_input(const Node& input, const TensorMap& inputs);

}  // namespace wpt

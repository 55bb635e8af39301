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

#include "wpt/graph.h"

namespace wpt {

// Replaces every compute node whose inputs are all constants with the
// constant it evaluates to (same id), then drops constants nobody uses.
Graph constant_fold(const Graph& g);

// Splices out Identity and Dropout (inference semantics), then rewrites each
// Conv2D -> BiasAdd -> ReLU chain whose intermediates have exactly one
// consumer into a single FusedConvBiasReLU node carrying the ReLU's id.
Graph fuse_operators(const Graph& g);

// Moves every internal rank-4 tensor to `target`. Constants are permuted in
// place; Transpose nodes are inserted after graph inputs and before graph
// outputs so the external contract keeps its original layouts. Existing
// Transpose nodes are absorbed, which makes the pass idempotent.
Graph transform_layout(const Graph& g, Layout target);

}  // namespace wpt

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
#include <vector>

#include "wpt/interpreter.h"
#include "wpt/plan.h"

namespace wpt {

struct LedgerEntry {
  NodeId node_id;
  OpKind kind = OpKind::kIdentity;
  ImplSource source = ImplSource::kReferenceLibrary;
  double runtime_ms = 0.0;  // wall clock, > 0
};

struct ExecutionResult {
  std::vector<Tensor> outputs;
  std::vector<LedgerEntry> ledger;  // one entry per plan step
};

// Walks the plan in order, freeing each intermediate after its last consumer.
// ShapeMismatch on missing or malformed inputs; KernelFailure when a kernel
// throws for any other reason.
ExecutionResult execute(const InferencePlan& plan, const TensorMap& inputs);

// Largest max-abs difference between the plan's outputs and the reference
// interpreter's outputs for `g`.
float compare_with_reference(const Graph& g, const InferencePlan& plan, const TensorMap& inputs);

// CSV: node_id,op_kind,source,runtime_ms
void write_ledger_csv(const std::vector<LedgerEntry>& ledger, const std::filesystem::path& path);

}  // namespace wpt

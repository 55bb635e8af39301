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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wpt/evaluator.h"
#include "wpt/graph.h"
#include "wpt/kernels.h"

namespace wpt {

// Declaration order is the tie-break order of select_best.
enum class ImplSource { kGeneratedGenetic, kGeneratedRL, kReferenceLibrary };
std::string_view to_string(ImplSource s);
ImplSource parse_impl_source(std::string_view s);

struct ImplementationCandidate {
  ImplSource source = ImplSource::kReferenceLibrary;
  std::optional<TunedKernel> kernel;  // set for generated sources
  std::optional<EvalResult> measured;
};

// Argmin of measured runtime; exact ties go to the earlier ImplSource.
// NoCandidates when empty or when a candidate is unmeasured.
ImplementationCandidate select_best(const std::vector<ImplementationCandidate>& candidates);

using Selections = std::map<NodeId, ImplementationCandidate>;

struct PlanStep {
  NodeId id;
  OpKind kind = OpKind::kIdentity;
  ImplementationCandidate choice;
};

// Compute nodes of `graph` in topological order with their bound
// implementation. Input and Constant nodes need none.
struct InferencePlan {
  Graph graph;
  std::vector<PlanStep> steps;
  double static_estimate_ms = 0.0;
  std::string manifest_hash;
  std::uint64_t seed = 0;
};

// UnboundNode when a compute node has no selection; InvalidConfig when a
// generated selection carries no kernel or targets a non-convolution.
InferencePlan build_plan(const Graph& g, const Selections& selections);

nlohmann::json plan_to_json(const InferencePlan& plan);
InferencePlan plan_from_json(const nlohmann::json& j);
void save_plan(const InferencePlan& plan, const std::filesystem::path& path);
InferencePlan load_plan(const std::filesystem::path& path);

}  // namespace wpt

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

#include "wpt/plan.h"

#include <fstream>

#include "wpt/graph_json.h"

namespace wpt {

std::string_view to_string(ImplSource s) {
  switch (s) {
    case ImplSource::kGeneratedGenetic: return "GeneratedGenetic";
    case ImplSource::kGeneratedRL: return "GeneratedRL";
    case ImplSource::kReferenceLibrary: return "ReferenceLibrary";
  }
  return "?";
}

ImplSource parse_impl_source(std::string_view s) {
  if (s == "GeneratedGenetic") return ImplSource::kGeneratedGenetic;
  if (s == "GeneratedRL") return ImplSource::kGeneratedRL;
  if (s == "ReferenceLibrary") return ImplSource::kReferenceLibrary;
  throw Error(ErrorCode::kParseError, "unknown implementation source '" + std::string(s) + "'");
}

ImplementationCandidate select_best(const std::vector<ImplementationCandidate>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kNoCandidates, "no implementation candidates");
  const ImplementationCandidate* best = nullptr;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (!c.measured) {
      throw Error(ErrorCode::kNoCandidates, "candidate " + std::to_string(i) + " was never measured");
    }
    if (!best || c.measured->runtime_ms < best->measured->runtime_ms ||
        (c.measured->runtime_ms == best->measured->runtime_ms && c.source < best->source)) {
      best = &c;
    }
  }
  return *best;
}

InferencePlan build_plan(const Graph& g, const Selections& selections) {
  infer_shapes(g);
  InferencePlan plan;
  plan.graph = g;
  for (const auto& node : g.nodes()) {
    if (!is_compute(node.op.kind)) continue;
    auto it = selections.find(node.id);
    if (it == selections.end()) throw Error(ErrorCode::kUnboundNode, "node '" + node.id + "' has no implementation");
    const auto& choice = it->second;
    if (choice.source != ImplSource::kReferenceLibrary) {
      if (!choice.kernel || !node.op.is_conv()) {
        throw Error(ErrorCode::kInvalidConfig, "node '" + node.id + "': generated selection without a conv kernel");
      }
      if (!(choice.kernel->op == node.op)) {
        throw Error(ErrorCode::kInvalidConfig, "node '" + node.id + "': kernel was tuned for another operator");
      }
    }
    if (choice.measured) plan.static_estimate_ms += choice.measured->runtime_ms;
    plan.steps.push_back({node.id, node.op.kind, choice});
  }
  return plan;
}

nlohmann::json plan_to_json(const InferencePlan& plan) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& s : plan.steps) {
    nlohmann::json n = {{"id", s.id}, {"op", to_string(s.kind)}, {"source", to_string(s.choice.source)}};
    n["runtime_ms"] = s.choice.measured ? nlohmann::json(s.choice.measured->runtime_ms) : nlohmann::json();
    if (s.choice.measured) n["eval_source"] = to_string(s.choice.measured->source);
    if (s.choice.kernel) n["config"] = config_to_json(s.choice.kernel->config);
    nodes.push_back(std::move(n));
  }
  return {{"nodes", nodes},
          {"static_estimate_ms", plan.static_estimate_ms},
          {"manifest_hash", plan.manifest_hash},
          {"seed", plan.seed},
          {"graph", graph_to_json(plan.graph)}};
}

InferencePlan plan_from_json(const nlohmann::json& j) {
  try {
    const Graph g = graph_from_json(j.at("graph"));
    Selections sel;
    for (const auto& n : j.at("nodes")) {
      const NodeId id = n.at("id").get<std::string>();
      if (!g.contains(id)) throw Error(ErrorCode::kUnboundNode, "plan node '" + id + "' is not in the graph");
      ImplementationCandidate c;
      c.source = parse_impl_source(n.at("source").get<std::string>());
      if (n.contains("runtime_ms") && !n["runtime_ms"].is_null()) {
        c.measured = EvalResult{n["runtime_ms"].get<double>(),
                                parse_eval_source(n.value("eval_source", std::string("Synthetic")))};
      }
      if (n.contains("config")) c.kernel = TunedKernel{g.node(id).op, config_from_json(n["config"])};
      sel.emplace(id, std::move(c));
    }
    InferencePlan plan = build_plan(g, sel);
    plan.manifest_hash = j.value("manifest_hash", std::string());
    plan.seed = j.value("seed", std::uint64_t{0});
    return plan;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kParseError, std::string("plan: ") + ex.what());
  }
}

void save_plan(const InferencePlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << plan_to_json(plan).dump(2) << '\n';
}

InferencePlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  try {
    return plan_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& ex) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + ex.what());
  }
}

}  // namespace wpt

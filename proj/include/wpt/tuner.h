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
#include <vector>

#include "json.hpp"
#include "wpt/cache.h"
#include "wpt/genetic.h"
#include "wpt/plan.h"
#include "wpt/rl_search.h"

namespace wpt {

enum class Strategy { kGenetic, kRL, kRandom };
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);
// Comma-separated names or "all"; duplicates collapse, order is canonical.
std::vector<Strategy> parse_strategies(std::string_view list);

struct TuneOptions {
  std::vector<Strategy> strategies;
  std::uint64_t budget = 512;  // distinct evaluations per strategy
  std::uint64_t seed = 0;
  GeneticParams genetic;
  RLParams rl;
  std::string hardware = hardware_tag();
};

struct StrategyOutcome {
  Strategy strategy = Strategy::kGenetic;
  ScheduleConfig config;
  EvalResult result;
  std::uint64_t evaluations = 0;
  std::vector<nlohmann::json> history;  // empty when served from cache
};

struct TuneResult {
  std::string key;
  bool cache_hit = false;  // no strategy had to run
  std::vector<StrategyOutcome> outcomes;
  std::uint64_t evaluations = 0;

  const StrategyOutcome& best() const;
};

// Consults `cache` (may be null) first; strategies already stored under the
// same evaluator fingerprint are reused, the rest run and are stored.
// EmptyStrategySet when opts.strategies is empty.
TuneResult tune_operator(const OperatorSpec& op, const ScheduleTemplate& t, const TuneOptions& opts,
                         Evaluator& evaluator, const CacheStore* cache);

using TemplateSet = std::map<OpKind, ScheduleTemplate>;
// Canonical conv template for Conv2D and its twin for FusedConvBiasReLU.
TemplateSet default_templates();
// Later templates replace earlier ones of the same op kind.
TemplateSet index_templates(const std::vector<ScheduleTemplate>& templates);

struct OptimizeOptions {
  bool fold = true;
  bool fuse = true;
  std::optional<Layout> layout;
};

Graph optimize_graph(const Graph& g, const OptimizeOptions& options = {});

struct NodeSelection {
  NodeId id;
  OperatorSpec op;
  std::vector<ImplementationCandidate> candidates;
  ImplementationCandidate chosen;
  std::optional<TuneResult> tuning;
};

struct PlanReport {
  InferencePlan plan;
  std::vector<NodeSelection> nodes;
  std::uint64_t evaluations = 0;
};

// Benchmarks the reference kernel of every compute node, tunes nodes that
// have a template (random-search results are baselines, not candidates) and
// binds the fastest candidate per node.
PlanReport plan_graph(const Graph& g, const TemplateSet& templates, const TuneOptions& opts,
                      Evaluator& evaluator, const CacheStore* cache);

}  // namespace wpt

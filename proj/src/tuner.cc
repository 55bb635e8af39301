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

#include "wpt/tuner.h"

#include <algorithm>
#include <set>

#include "wpt/hash.h"
#include "wpt/passes.h"
#include "wpt/random_search.h"

namespace wpt {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kGenetic: return "genetic";
    case Strategy::kRL: return "rl";
    case Strategy::kRandom: return "random";
  }
  return "?";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "genetic") return Strategy::kGenetic;
  if (s == "rl") return Strategy::kRL;
  if (s == "random") return Strategy::kRandom;
  throw Error(ErrorCode::kParseError, "unknown strategy '" + std::string(s) + "'");
}

std::vector<Strategy> parse_strategies(std::string_view list) {
  std::set<Strategy> picked;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = std::min(list.find(',', pos), list.size());
    const auto item = list.substr(pos, comma - pos);
    if (item == "all") {
      picked.insert({Strategy::kGenetic, Strategy::kRL, Strategy::kRandom});
    } else if (!item.empty()) {
      picked.insert(parse_strategy(item));
    }
    pos = comma + 1;
  }
  return {picked.begin(), picked.end()};
}

const StrategyOutcome& TuneResult::best() const {
  if (outcomes.empty()) throw Error(ErrorCode::kNoCandidates, "tuning produced no outcome");
  return *std::min_element(outcomes.begin(), outcomes.end(), [](const auto& a, const auto& b) {
    return a.result.runtime_ms < b.result.runtime_ms;
  });
}

namespace {

std::uint64_t strategy_seed(const TuneOptions& opts, const OperatorSpec& op, Strategy s) {
  return derive_seed(opts.seed ^ fnv1a(op.signature()), static_cast<std::uint64_t>(s) + 1);
}

nlohmann::json tagged(nlohmann::json rec, const OperatorSpec& op, Strategy s) {
  rec["op"] = op.signature();
  rec["strategy"] = to_string(s);
  return rec;
}

StrategyOutcome run_strategy(Strategy s, const OperatorSpec& op, const ScheduleTemplate& t,
                             const TuneOptions& opts, Evaluator& evaluator) {
  ConfigOracle oracle(evaluator, op, t, opts.budget);
  const std::uint64_t seed = strategy_seed(opts, op, s);
  StrategyOutcome out;
  out.strategy = s;
  switch (s) {
    case Strategy::kGenetic: {
      const auto r = run_genetic(oracle, opts.genetic, seed);
      for (const auto& g : r.history) out.history.push_back(tagged(to_json(g), op, s));
      break;
    }
    case Strategy::kRL: {
      const auto r = run_rl_search(oracle, opts.rl, seed);
      for (const auto& step : r.curve) out.history.push_back(tagged(to_json(step), op, s));
      break;
    }
    case Strategy::kRandom: {
      const auto r = run_random_search(oracle, seed);
      out.history.push_back(tagged({{"draws", r.draws}, {"best_ms", r.best_result.runtime_ms}}, op, s));
      break;
    }
  }
  out.config = oracle.best_config();
  out.result = oracle.best_result();
  out.evaluations = oracle.used();
  return out;
}

}  // namespace

TuneResult tune_operator(const OperatorSpec& op, const ScheduleTemplate& t, const TuneOptions& opts,
                         Evaluator& evaluator, const CacheStore* cache) {
  if (opts.strategies.empty()) throw Error(ErrorCode::kEmptyStrategySet, "no search strategy requested");
  if (t.op_kind() != op.kind) {
    throw Error(ErrorCode::kInvalidConfig, "template '" + t.id() + "' is for " + std::string(to_string(t.op_kind())) +
                                               ", operator is " + std::string(to_string(op.kind)));
  }
  TuneResult result;
  result.key = cache_key(op.signature(), t.id(), opts.hardware);

  std::optional<CacheEntry> entry;
  if (cache) {
    entry = cache->lookup(result.key);
    if (entry && entry->fingerprint != evaluator.fingerprint()) entry.reset();
  }
  if (!entry) {
    entry = CacheEntry{result.key, op.signature(), t.id(), opts.hardware, evaluator.fingerprint(), {}, 0.0, {}};
  }

  bool ran = false;
  for (Strategy s : opts.strategies) {
    const std::string name(to_string(s));
    auto hit = entry->strategies.find(name);
    if (hit != entry->strategies.end() && is_valid(hit->second.config, t)) {
      result.outcomes.push_back({s, hit->second.config, {hit->second.runtime_ms, EvalSource::kCached}, 0, {}});
      continue;
    }
    auto out = run_strategy(s, op, t, opts, evaluator);
    result.evaluations += out.evaluations;
    entry->strategies[name] = {out.config, out.result.runtime_ms, out.evaluations};
    result.outcomes.push_back(std::move(out));
    ran = true;
  }
  result.cache_hit = !ran;

  if (cache && ran) {
    const auto best = std::min_element(entry->strategies.begin(), entry->strategies.end(), [](const auto& a, const auto& b) {
      return a.second.runtime_ms < b.second.runtime_ms;
    });
    entry->best = best->second.config;
    entry->best_runtime_ms = best->second.runtime_ms;
    cache->store(*entry);
  }
  return result;
}

TemplateSet default_templates() {
  TemplateSet set;
  set.emplace(OpKind::kConv2D, conv_template("conv2d", OpKind::kConv2D));
  set.emplace(OpKind::kFusedConvBiasReLU, conv_template("fused_conv_bias_relu", OpKind::kFusedConvBiasReLU));
  return set;
}

TemplateSet index_templates(const std::vector<ScheduleTemplate>& templates) {
  TemplateSet set;
  for (const auto& t : templates) set.insert_or_assign(t.op_kind(), t);
  return set;
}

Graph optimize_graph(const Graph& g, const OptimizeOptions& options) {
  Graph out = g;
  if (options.fold) out = constant_fold(out);
  if (options.fuse) out = fuse_operators(out);
  if (options.layout) out = transform_layout(out, *options.layout);
  return out;
}

PlanReport plan_graph(const Graph& g, const TemplateSet& templates, const TuneOptions& opts,
                      Evaluator& evaluator, const CacheStore* cache) {
  const auto shapes = infer_shapes(g);
  const std::uint64_t before = evaluator.evaluations();
  std::map<std::string, TuneResult> tuned;  // by op signature + template
  PlanReport report;
  Selections selections;

  for (const auto& node : g.nodes()) {
    if (!is_compute(node.op.kind)) continue;
    NodeSelection sel;
    sel.id = node.id;
    sel.op = node.op;

    std::vector<TensorSpec> in_specs;
    for (const auto& in : node.inputs) in_specs.push_back(shapes.at(in));
    sel.candidates.push_back({ImplSource::kReferenceLibrary, std::nullopt, evaluator.evaluate_reference(node.op, in_specs)});

    auto t = templates.find(node.op.kind);
    if (t != templates.end() && node.op.is_conv() && !opts.strategies.empty()) {
      const std::string key = node.op.signature() + "|" + t->second.id();
      auto it = tuned.find(key);
      if (it == tuned.end()) it = tuned.emplace(key, tune_operator(node.op, t->second, opts, evaluator, cache)).first;
      sel.tuning = it->second;
      for (const auto& o : it->second.outcomes) {
        if (o.strategy == Strategy::kRandom) continue;
        const auto src = o.strategy == Strategy::kGenetic ? ImplSource::kGeneratedGenetic : ImplSource::kGeneratedRL;
        sel.candidates.push_back({src, TunedKernel{node.op, o.config}, o.result});
      }
    }
    sel.chosen = select_best(sel.candidates);
    selections.emplace(node.id, sel.chosen);
    report.nodes.push_back(std::move(sel));
  }
  report.plan = build_plan(g, selections);
  report.plan.seed = opts.seed;
  report.evaluations = evaluator.evaluations() - before;
  return report;
}

}  // namespace wpt

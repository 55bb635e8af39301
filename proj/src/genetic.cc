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

#include "wpt/genetic.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wpt/hash.h"

namespace wpt {

namespace {

double fitness_of(const GeneticParams& params, double runtime_ms) {
  const double f = params.fitness_fn ? params.fitness_fn(runtime_ms) : 1.0 / runtime_ms;
  if (!(f > 0.0) || !std::isfinite(f)) {
    throw Error(ErrorCode::kMissingFitness, "fitness of runtime " + std::to_string(runtime_ms) +
                                                " is not positive");
  }
  return f;
}

std::int64_t draw_from(const ParamDomain& d, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, d.values.size() - 1);
  return d.values[pick(rng)];
}

GenerationStats stats_of(int gen, const std::vector<Individual>& pop) {
  GenerationStats s;
  s.gen = gen;
  s.population_size = pop.size();
  double lo = pop.front().runtime->runtime_ms, hi = lo, sum = 0.0;
  for (const auto& ind : pop) {
    const double r = ind.runtime->runtime_ms;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    sum += r;
  }
  s.best_runtime = lo;
  s.mean_runtime = sum / static_cast<double>(pop.size());
  s.spread = (hi - lo) / lo;
  return s;
}

// Evaluates `cfgs` and keeps those the budget could pay for.
std::vector<Individual> evaluated(const std::vector<ScheduleConfig>& cfgs, ConfigOracle& oracle,
                                  const GeneticParams& params) {
  const auto results = oracle.evaluate_batch(cfgs);
  std::vector<Individual> out;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    if (!results[i]) continue;
    out.push_back({cfgs[i], results[i], fitness_of(params, results[i]->runtime_ms)});
  }
  return out;
}

}  // namespace

void check_params(const GeneticParams& p) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (p.population < 1) fail("population must be >= 1");
  if (p.elites < 1 || p.elites > p.population) fail("elites must be in [1, population]");
  if (p.next_population < p.elites) fail("next_population must be >= elites");
  if (p.pool < 1 || p.pool > p.population) fail("pool must be in [1, population]");
  if (!(p.mutation_rate >= 0.0 && p.mutation_rate <= 1.0)) fail("mutation_rate must be in [0, 1]");
  if (!(p.epsilon > 0.0)) fail("epsilon must be > 0");
  if (p.max_generations < 1) fail("max_generations must be >= 1");
  if (p.repair_retries < 0) fail("repair_retries must be >= 0");
}

std::vector<double> selection_probabilities(const std::vector<Individual>& pop) {
  double total = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& f = pop[i].fitness;
    if (!f || !(*f > 0.0) || !std::isfinite(*f)) {
      throw Error(ErrorCode::kMissingFitness, "individual " + std::to_string(i) + " has no fitness");
    }
    total += *f;
  }
  std::vector<double> p;
  p.reserve(pop.size());
  for (const auto& ind : pop) p.push_back(*ind.fitness / total);
  return p;
}

std::vector<double> cumulative_probabilities(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  std::partial_sum(p.begin(), p.end(), c.begin());
  if (!c.empty()) c.back() = 1.0;
  return c;
}

std::size_t roulette_select(const std::vector<double>& cumulative, double v) {
  auto it = std::lower_bound(cumulative.begin(), cumulative.end(), v);
  if (it == cumulative.end()) return cumulative.empty() ? 0 : cumulative.size() - 1;
  return static_cast<std::size_t>(it - cumulative.begin());
}

std::vector<Individual> rank_population(std::vector<Individual> pop) {
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (!pop[i].fitness) {
      throw Error(ErrorCode::kMissingFitness, "individual " + std::to_string(i) + " has no fitness");
    }
  }
  std::stable_sort(pop.begin(), pop.end(),
                   [](const Individual& a, const Individual& b) { return *a.fitness > *b.fitness; });
  return pop;
}

ScheduleConfig breed(const ScheduleConfig& a, const ScheduleConfig& b, const ScheduleTemplate& t,
                     const GeneticParams& params, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution mutate(params.mutation_rate);
  ScheduleConfig child{t.id(), std::vector<std::int64_t>(t.size())};
  for (std::size_t i = 0; i < t.size(); ++i) {
    child.values[i] = coin(rng) ? a.values.at(i) : b.values.at(i);
    if (mutate(rng)) child.values[i] = draw_from(t.params()[i], rng);
  }

  for (int attempt = 0;; ++attempt) {
    std::vector<bool> redo(t.size(), false);
    bool ok = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!t.params()[i].index_of(child.values[i])) redo[i] = true, ok = false;
    }
    for (const auto& c : t.constraints()) {
      if (c.holds(child.values)) continue;
      ok = false;
      for (auto i : c.params_used()) redo[i] = true;
    }
    if (ok) return child;
    if (attempt >= params.repair_retries) {
      throw Error(ErrorCode::kExhaustedSampling,
                  "could not repair child " + child.to_string() + " after " +
                      std::to_string(params.repair_retries) + " retries");
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (redo[i]) child.values[i] = draw_from(t.params()[i], rng);
    }
  }
}

std::vector<Individual> evolve_generation(const std::vector<Individual>& pop,
                                          const GeneticParams& params, ConfigOracle& oracle,
                                          std::mt19937_64& rng, int generation) {
  check_params(params);
  const auto ranked = rank_population(pop);
  const std::size_t target =
      params.population_schedule ? params.population_schedule(generation) : params.next_population;
  if (target < params.elites) {
    throw Error(ErrorCode::kInvalidConfig, "population schedule returned fewer than k individuals");
  }

  const std::size_t k = std::min(params.elites, ranked.size());
  std::vector<Individual> next(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k));

  const std::size_t m = std::min(params.pool, ranked.size());
  const std::vector<Individual> pool(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(m));
  const auto cumulative = cumulative_probabilities(selection_probabilities(pool));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<ScheduleConfig> children;
  for (std::size_t c = k; c < target; ++c) {
    const auto& p1 = pool[roulette_select(cumulative, u01(rng))];
    const auto& p2 = pool[roulette_select(cumulative, u01(rng))];
    children.push_back(breed(p1.cfg, p2.cfg, oracle.schedule_template(), params, rng));
  }
  for (auto& ind : evaluated(children, oracle, params)) next.push_back(std::move(ind));
  return next;
}

nlohmann::json to_json(const GenerationStats& s) {
  return {{"gen", s.gen},
          {"best_runtime", s.best_runtime},
          {"mean_runtime", s.mean_runtime},
          {"spread", s.spread},
          {"population_size", s.population_size}};
}

GeneticResult run_genetic(ConfigOracle& oracle, const GeneticParams& params, std::uint64_t seed) {
  check_params(params);
  const auto& t = oracle.schedule_template();
  const std::uint64_t used_before = oracle.used();

  int gen = 1;
  std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(gen)));
  std::vector<ScheduleConfig> initial;
  for (std::size_t i = 0; i < params.population; ++i) initial.push_back(random_config(t, rng));
  std::vector<Individual> pop = evaluated(initial, oracle, params);
  if (pop.empty()) throw Error(ErrorCode::kInvalidConfig, "evaluation budget admits no individual");

  GeneticResult result;
  for (;;) {
    result.history.push_back(stats_of(gen, pop));
    if (result.history.back().spread < params.epsilon) {
      result.converged = true;
      break;
    }
    if (gen >= params.max_generations || oracle.exhausted()) break;
    ++gen;
    rng.seed(derive_seed(seed, static_cast<std::uint64_t>(gen)));
    pop = evolve_generation(pop, params, oracle, rng, gen);
  }

  result.best = {oracle.best_config(), oracle.best_result(),
                 fitness_of(params, oracle.best_result().runtime_ms)};
  result.evaluations = oracle.used() - used_before;
  return result;
}

GeneticResult run_genetic(const OperatorSpec& op, const ScheduleTemplate& t,
                          const GeneticParams& params, Evaluator& evaluator, std::uint64_t seed,
                          std::uint64_t budget) {
  ConfigOracle oracle(evaluator, op, t, budget);
  return run_genetic(oracle, params, seed);
}

}  // namespace wpt

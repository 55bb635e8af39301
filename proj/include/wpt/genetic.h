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
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "json.hpp"
#include "wpt/search.h"

namespace wpt {

struct Individual {
  ScheduleConfig cfg;
  std::optional<EvalResult> runtime;
  std::optional<double> fitness;
};

struct GeneticParams {
  std::size_t population = 48;       // |a|
  std::size_t next_population = 48;  // |a'|, >= elites
  std::size_t elites = 4;            // k
  std::size_t pool = 24;             // m, parents are drawn from the top m
  double mutation_rate = 0.1;
  double epsilon = 0.02;
  int max_generations = 50;
  int repair_retries = 100;
  // Maps runtime_ms to a positive fitness; defaults to 1 / runtime.
  std::function<double(double)> fitness_fn;
  // Optional |a'| per generation (argument is the generation being built).
  std::function<std::size_t(int)> population_schedule;
};

// InvalidConfig when a field is out of range.
void check_params(const GeneticParams& params);

// p_i = f_i / sum_j f_j. MissingFitness if any fitness is absent or <= 0.
std::vector<double> selection_probabilities(const std::vector<Individual>& pop);
// Prefix sums; the last entry is pinned to exactly 1.
std::vector<double> cumulative_probabilities(const std::vector<double>& p);
// Smallest 0-based i with v <= P[i] (P[-1] is taken as 0).
std::size_t roulette_select(const std::vector<double>& cumulative, double v);

// Fitness-descending order; ties keep the earlier individual first.
std::vector<Individual> rank_population(std::vector<Individual> pop);

// Uniform per-gene crossover followed by per-gene mutation. Invalid children
// are repaired by resampling the genes of violated constraints, at most
// `params.repair_retries` times (ExhaustedSampling after that).
ScheduleConfig breed(const ScheduleConfig& a, const ScheduleConfig& b, const ScheduleTemplate& t,
                     const GeneticParams& params, std::mt19937_64& rng);

// Elites plus roulette-bred children, evaluated through `oracle`. Children the
// budget cannot pay for are dropped. `generation` selects the |a'| schedule.
std::vector<Individual> evolve_generation(const std::vector<Individual>& pop,
                                          const GeneticParams& params, ConfigOracle& oracle,
                                          std::mt19937_64& rng, int generation = 2);

struct GenerationStats {
  int gen = 0;
  double best_runtime = 0.0;
  double mean_runtime = 0.0;
  double spread = 0.0;  // (max - min) / min
  std::size_t population_size = 0;
};

nlohmann::json to_json(const GenerationStats& s);

struct GeneticResult {
  Individual best;  // best-ever
  std::vector<GenerationStats> history;
  std::uint64_t evaluations = 0;
  bool converged = false;
};

// Runs generations until the runtime spread drops below epsilon, the
// generation cap is hit or the oracle budget is spent. Generation g draws from
// an RNG stream derived from (seed, g).
GeneticResult run_genetic(ConfigOracle& oracle, const GeneticParams& params, std::uint64_t seed);
GeneticResult run_genetic(const OperatorSpec& op, const ScheduleTemplate& t,
                          const GeneticParams& params, Evaluator& evaluator, std::uint64_t seed,
                          std::uint64_t budget = 0);

}  // namespace wpt

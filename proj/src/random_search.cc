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

#include "wpt/random_search.h"

#include "wpt/hash.h"

namespace wpt {

RandomResult run_random_search(ConfigOracle& oracle, std::uint64_t seed, std::uint64_t max_draws) {
  if (max_draws == 0) {
    if (oracle.budget() == 0) throw Error(ErrorCode::kInvalidConfig, "random search needs a budget or max_draws");
    max_draws = 64 * oracle.budget();
  }
  const std::uint64_t used_before = oracle.used();
  std::mt19937_64 rng(derive_seed(seed, 4));
  RandomResult r;
  while (r.draws < max_draws && !oracle.exhausted()) {
    ++r.draws;
    oracle.evaluate(random_config(oracle.schedule_template(), rng));
  }
  if (!oracle.has_best()) throw Error(ErrorCode::kInvalidConfig, "evaluation budget admits no config");
  r.best = oracle.best_config();
  r.best_result = oracle.best_result();
  r.evaluations = oracle.used() - used_before;
  return r;
}

RandomResult run_random_search(const OperatorSpec& op, const ScheduleTemplate& t, Evaluator& evaluator,
                               std::uint64_t seed, std::uint64_t budget) {
  ConfigOracle oracle(evaluator, op, t, budget);
  return run_random_search(oracle, seed);
}

}  // namespace wpt

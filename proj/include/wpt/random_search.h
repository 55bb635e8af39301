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

#include "wpt/search.h"

namespace wpt {

struct RandomResult {
  ScheduleConfig best;
  EvalResult best_result;
  std::uint64_t evaluations = 0;
  std::uint64_t draws = 0;
};

// Uniform valid draws until the oracle budget is spent or `max_draws`
// samples were taken (0 means 64 x budget).
RandomResult run_random_search(ConfigOracle& oracle, std::uint64_t seed, std::uint64_t max_draws = 0);
RandomResult run_random_search(const OperatorSpec& op, const ScheduleTemplate& t, Evaluator& evaluator,
                               std::uint64_t seed, std::uint64_t budget);

}  // namespace wpt

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
#include <vector>

#include "wpt/evaluator.h"

namespace wpt {

// Memoizing front-end of an Evaluator for one (op, template) search. A budget
// of 0 is unbounded; otherwise at most `budget` distinct configs reach the
// evaluator. Tracks the best-ever config (earliest wins ties).
class ConfigOracle {
 public:
  ConfigOracle(Evaluator& evaluator, OperatorSpec op, const ScheduleTemplate& t,
               std::uint64_t budget = 0);
  // The template is held by reference and must outlive the oracle.
  ConfigOracle(Evaluator&, OperatorSpec, ScheduleTemplate&&, std::uint64_t = 0) = delete;

  // nullopt when `cfg` is unseen and the budget is spent.
  std::optional<EvalResult> evaluate(const ScheduleConfig& cfg);
  // Evaluates unseen configs in order, concurrently when the evaluator allows.
  std::vector<std::optional<EvalResult>> evaluate_batch(const std::vector<ScheduleConfig>& cfgs);
  std::optional<EvalResult> lookup(const ScheduleConfig& cfg) const;

  std::uint64_t used() const { return used_; }
  std::uint64_t budget() const { return budget_; }
  bool exhausted() const { return budget_ != 0 && used_ >= budget_; }

  bool has_best() const { return best_.has_value(); }
  const ScheduleConfig& best_config() const { return best_->first; }
  const EvalResult& best_result() const { return best_->second; }

  const OperatorSpec& op() const { return op_; }
  const ScheduleTemplate& schedule_template() const { return t_; }

 private:
  void note(const ScheduleConfig& cfg, const EvalResult& r);

  Evaluator& evaluator_;
  OperatorSpec op_;
  const ScheduleTemplate& t_;
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
  std::map<ScheduleConfig, EvalResult> seen_;
  std::optional<std::pair<ScheduleConfig, EvalResult>> best_;
};

}  // namespace wpt

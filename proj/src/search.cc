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

#include "wpt/search.h"

#include <algorithm>
#include <exception>
#include <thread>

namespace wpt {

ConfigOracle::ConfigOracle(Evaluator& evaluator, OperatorSpec op, const ScheduleTemplate& t,
                           std::uint64_t budget)
    : evaluator_(evaluator), op_(std::move(op)), t_(t), budget_(budget) {}

void ConfigOracle::note(const ScheduleConfig& cfg, const EvalResult& r) {
  seen_.emplace(cfg, r);
  if (!best_ || r.runtime_ms < best_->second.runtime_ms) best_.emplace(cfg, r);
}

std::optional<EvalResult> ConfigOracle::lookup(const ScheduleConfig& cfg) const {
  auto it = seen_.find(cfg);
  if (it == seen_.end()) return std::nullopt;
  return it->second;
}

std::optional<EvalResult> ConfigOracle::evaluate(const ScheduleConfig& cfg) {
  if (auto hit = lookup(cfg)) return hit;
  if (exhausted()) return std::nullopt;
  const EvalResult r = evaluator_.evaluate(op_, t_, cfg);
  ++used_;
  note(cfg, r);
  return r;
}

std::vector<std::optional<EvalResult>> ConfigOracle::evaluate_batch(
    const std::vector<ScheduleConfig>& cfgs) {
  // Admit unseen configs in order until the budget is spent.
  std::vector<ScheduleConfig> fresh;
  std::map<ScheduleConfig, std::size_t> slot;
  for (const auto& c : cfgs) {
    if (seen_.count(c) || slot.count(c)) continue;
    if (budget_ != 0 && used_ + fresh.size() >= budget_) break;
    slot.emplace(c, fresh.size());
    fresh.push_back(c);
  }

  std::vector<std::optional<EvalResult>> results(fresh.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = evaluator_.concurrent() ? std::min<std::size_t>(hw, fresh.size()) : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < fresh.size(); ++i) results[i] = evaluator_.evaluate(op_, t_, fresh[i]);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i = w; i < fresh.size(); i += workers) {
              results[i] = evaluator_.evaluate(op_, t_, fresh[i]);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  // Record in submission order so best-ever ties resolve deterministically.
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    ++used_;
    note(fresh[i], *results[i]);
  }

  std::vector<std::optional<EvalResult>> out;
  out.reserve(cfgs.size());
  for (const auto& c : cfgs) out.push_back(lookup(c));
  return out;
}

}  // namespace wpt

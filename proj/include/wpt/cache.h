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

#include "json.hpp"
#include "wpt/schedule.h"

namespace wpt {

// Host descriptor: CPU model name and logical core count.
std::string hardware_tag();

// Hex FNV-1a over the three components.
std::string cache_key(const std::string& op_signature, const std::string& template_id,
                      const std::string& hardware);

struct StrategyBest {
  ScheduleConfig config;
  double runtime_ms = 0.0;
  std::uint64_t evaluations = 0;

  bool operator==(const StrategyBest&) const = default;
};

struct CacheEntry {
  std::string key;
  std::string op_signature;
  std::string template_id;
  std::string hardware;
  std::string fingerprint;  // evaluator settings the runtimes came from
  ScheduleConfig best;
  double best_runtime_ms = 0.0;
  std::map<std::string, StrategyBest> strategies;  // by strategy name

  bool operator==(const CacheEntry&) const = default;
};

nlohmann::json to_json(const CacheEntry& e);
CacheEntry cache_entry_from_json(const nlohmann::json& j);

// One JSON document per key under `dir`. Writes go to a temporary file that
// is renamed into place, so readers never see a partial entry.
class CacheStore {
 public:
  explicit CacheStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& key) const;
  // nullopt when absent or unreadable.
  std::optional<CacheEntry> lookup(const std::string& key) const;
  void store(const CacheEntry& entry) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace wpt

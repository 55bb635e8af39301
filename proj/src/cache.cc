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

#include "wpt/cache.h"

#include <fstream>
#include <thread>

#include <unistd.h>

#include "wpt/hash.h"

namespace wpt {

std::string hardware_tag() {
  std::string model = "unknown-cpu";
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("model name", 0) != 0) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) break;
    model = line.substr(line.find_first_not_of(" \t", colon + 1));
    break;
  }
  return model + " x" + std::to_string(std::max(1u, std::thread::hardware_concurrency()));
}

std::string cache_key(const std::string& op_signature, const std::string& template_id,
                      const std::string& hardware) {
  return hex64(fnv1a(op_signature + '\x1f' + template_id + '\x1f' + hardware));
}

nlohmann::json to_json(const CacheEntry& e) {
  nlohmann::json strategies = nlohmann::json::object();
  for (const auto& [name, s] : e.strategies) {
    strategies[name] = {{"config", s.config.values}, {"runtime_ms", s.runtime_ms},
                        {"evaluations", s.evaluations}};
  }
  return {{"key", e.key},
          {"op_signature", e.op_signature},
          {"template", e.template_id},
          {"hardware", e.hardware},
          {"fingerprint", e.fingerprint},
          {"best", {{"config", e.best.values}, {"runtime_ms", e.best_runtime_ms}}},
          {"strategies", strategies}};
}

CacheEntry cache_entry_from_json(const nlohmann::json& j) {
  try {
    CacheEntry e;
    e.key = j.at("key").get<std::string>();
    e.op_signature = j.at("op_signature").get<std::string>();
    e.template_id = j.at("template").get<std::string>();
    e.hardware = j.at("hardware").get<std::string>();
    e.fingerprint = j.at("fingerprint").get<std::string>();
    e.best = {e.template_id, j.at("best").at("config").get<std::vector<std::int64_t>>()};
    e.best_runtime_ms = j.at("best").at("runtime_ms").get<double>();
    for (const auto& [name, s] : j.at("strategies").items()) {
      e.strategies[name] = {{e.template_id, s.at("config").get<std::vector<std::int64_t>>()},
                            s.at("runtime_ms").get<double>(),
                            s.value("evaluations", std::uint64_t{0})};
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kParseError, std::string("cache entry: ") + ex.what());
  }
}

CacheStore::CacheStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create cache dir " + dir_.string() + ": " + ec.message());
}

std::filesystem::path CacheStore::path_for(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<CacheEntry> CacheStore::lookup(const std::string& key) const {
  std::ifstream in(path_for(key));
  if (!in) return std::nullopt;
  try {
    auto e = cache_entry_from_json(nlohmann::json::parse(in));
    if (e.key != key) return std::nullopt;
    return e;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void CacheStore::store(const CacheEntry& entry) const {
  const auto final_path = path_for(entry.key);
  auto tmp = final_path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out << to_json(entry).dump(2) << '\n';
    if (!out) throw Error(ErrorCode::kIoError, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, final_path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::kIoError, "cannot publish " + final_path.string() + ": " + ec.message());
  }
}

}  // namespace wpt

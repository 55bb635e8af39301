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
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "wpt/graph.h"

namespace wpt {

struct ParamDomain {
  std::string name;
  std::vector<std::int64_t> values;  // strictly increasing, positive

  std::optional<std::size_t> index_of(std::int64_t v) const;
};

class ConstraintExpr;

// A named predicate over parameter names, e.g. "T_x*T_y*T_z <= 1024".
// Accepts + - * (or the middle dot), parentheses, integer literals and one
// comparison among <=, <, >=, >, == (or the Unicode inequality signs).
class Constraint {
 public:
  Constraint(std::string name, std::string expr, const std::vector<ParamDomain>& params);

  const std::string& name() const { return name_; }
  const std::string& expr() const { return expr_; }
  // Indices of the parameters the expression mentions.
  const std::vector<std::size_t>& params_used() const { return used_; }
  bool holds(const std::vector<std::int64_t>& values) const;

 private:
  std::string name_;
  std::string expr_;
  std::shared_ptr<const ConstraintExpr> compiled_;
  std::vector<std::size_t> used_;
};

class ScheduleTemplate {
 public:
  ScheduleTemplate(std::string id, OpKind op_kind, std::vector<ParamDomain> params);

  void add_constraint(std::string name, std::string expr);

  const std::string& id() const { return id_; }
  OpKind op_kind() const { return op_kind_; }
  const std::vector<ParamDomain>& params() const { return params_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::size_t size() const { return params_.size(); }
  std::optional<std::size_t> param_index(const std::string& name) const;
  // Product of domain sizes, saturating at UINT64_MAX.
  std::uint64_t raw_space_size() const;
  // Number of discrete actions when every (param, value) pair is one action.
  std::size_t action_count() const;

 private:
  std::string id_;
  OpKind op_kind_;
  std::vector<ParamDomain> params_;
  std::vector<Constraint> constraints_;
};

struct ScheduleConfig {
  std::string template_id;
  std::vector<std::int64_t> values;

  std::string to_string() const;  // "[a,b,...]"
  bool operator==(const ScheduleConfig&) const = default;
  auto operator<=>(const ScheduleConfig&) const = default;
};

std::string describe(const ScheduleConfig& cfg, const ScheduleTemplate& t);

struct Validation {
  bool ok = true;
  std::vector<std::string> violations;
  explicit operator bool() const { return ok; }
};

// LengthMismatch when cfg.values.size() != t.size().
Validation validate(const ScheduleConfig& cfg, const ScheduleTemplate& t);
bool is_valid(const ScheduleConfig& cfg, const ScheduleTemplate& t);

inline constexpr int kMaxRejects = 10000;

// Rejection sampling, uniform over each domain. ExhaustedSampling after
// kMaxRejects consecutive invalid draws.
ScheduleConfig random_config(const ScheduleTemplate& t, std::mt19937_64& rng);
ScheduleConfig random_config(const ScheduleTemplate& t, std::uint64_t seed);

// Visits every valid config in lexicographic domain order. SpaceTooLarge if
// the unconstrained product exceeds `cap`.
void for_each_config(const ScheduleTemplate& t, std::uint64_t cap,
                     const std::function<void(const ScheduleConfig&)>& fn);
std::vector<ScheduleConfig> enumerate(const ScheduleTemplate& t, std::uint64_t cap);

// Canonical convolution template: T_x, T_y, T_z, Tile_x, Tile_y, Tile_z, Tile_rz.
namespace conv_param {
inline constexpr std::size_t kTx = 0, kTy = 1, kTz = 2;
inline constexpr std::size_t kTileX = 3, kTileY = 4, kTileZ = 5, kTileRz = 6;
inline constexpr std::size_t kCount = 7;
}  // namespace conv_param

inline constexpr std::int64_t kMaxThreadsPerBlock = 1024;

struct ConvDomains {
  std::vector<std::int64_t> threads{1, 2, 4, 8, 16, 32};
  std::vector<std::int64_t> tiles{1, 2, 4, 8};
  std::vector<std::int64_t> reduce{1, 2, 4, 8};
};

ScheduleTemplate conv_template(const std::string& id = "conv2d", OpKind kind = OpKind::kConv2D,
                               const ConvDomains& domains = {});
// All-ones config of a template whose domains all contain 1.
ScheduleConfig unit_config(const ScheduleTemplate& t);

// Descriptor: {"name", "op_kind", "params":[{"name","values"}], "constraints":[expr | {"name","expr"}]}
ScheduleTemplate template_from_json(const nlohmann::json& j);
nlohmann::json template_to_json(const ScheduleTemplate& t);
// A file holds one descriptor or an array of them.
std::vector<ScheduleTemplate> load_templates(const std::filesystem::path& path);

nlohmann::json config_to_json(const ScheduleConfig& cfg);
ScheduleConfig config_from_json(const nlohmann::json& j);

}  // namespace wpt

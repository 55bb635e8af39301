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

#include "wpt/schedule.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace wpt {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Constraint expressions

class ConstraintExpr {
 public:
  enum class Op { kConst, kParam, kAdd, kSub, kMul, kLe, kLt, kGe, kGt, kEq };

  Op op = Op::kConst;
  std::int64_t value = 0;  // kConst literal or kParam index
  std::unique_ptr<ConstraintExpr> lhs, rhs;

  std::int64_t eval(const std::vector<std::int64_t>& v) const {
    switch (op) {
      case Op::kConst: return value;
      case Op::kParam: return v[static_cast<std::size_t>(value)];
      case Op::kAdd: return lhs->eval(v) + rhs->eval(v);
      case Op::kSub: return lhs->eval(v) - rhs->eval(v);
      case Op::kMul: return lhs->eval(v) * rhs->eval(v);
      case Op::kLe: return lhs->eval(v) <= rhs->eval(v);
      case Op::kLt: return lhs->eval(v) < rhs->eval(v);
      case Op::kGe: return lhs->eval(v) >= rhs->eval(v);
      case Op::kGt: return lhs->eval(v) > rhs->eval(v);
      case Op::kEq: return lhs->eval(v) == rhs->eval(v);
    }
    return 0;
  }
};

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, const std::vector<ParamDomain>& params)
      : text_(text), params_(params) {}

  std::unique_ptr<ConstraintExpr> parse(std::set<std::size_t>& used) {
    used_ = &used;
    auto lhs = parse_sum();
    auto cmp = parse_comparator();
    auto rhs = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("trailing input");
    auto node = std::make_unique<ConstraintExpr>();
    node->op = cmp;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

 private:
  using Op = ConstraintExpr::Op;

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::kParseError, "constraint '" + std::string(text_) + "': " + why +
                                            " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view tok) {
    skip_space();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  Op parse_comparator() {
    if (eat("<=") || eat("≤")) return Op::kLe;
    if (eat(">=") || eat("≥")) return Op::kGe;
    if (eat("==")) return Op::kEq;
    if (eat("<")) return Op::kLt;
    if (eat(">")) return Op::kGt;
    if (eat("=")) return Op::kEq;
    fail("expected comparison");
  }

  std::unique_ptr<ConstraintExpr> binary(Op op, std::unique_ptr<ConstraintExpr> a,
                                         std::unique_ptr<ConstraintExpr> b) {
    auto node = std::make_unique<ConstraintExpr>();
    node->op = op;
    node->lhs = std::move(a);
    node->rhs = std::move(b);
    return node;
  }

  std::unique_ptr<ConstraintExpr> parse_sum() {
    auto node = parse_product();
    while (true) {
      if (eat("+")) {
        node = binary(Op::kAdd, std::move(node), parse_product());
      } else if (eat("-")) {
        node = binary(Op::kSub, std::move(node), parse_product());
      } else {
        return node;
      }
    }
  }

  std::unique_ptr<ConstraintExpr> parse_product() {
    auto node = parse_atom();
    while (eat("*") || eat("·") || eat("×")) node = binary(Op::kMul, std::move(node), parse_atom());
    return node;
  }

  std::unique_ptr<ConstraintExpr> parse_atom() {
    skip_space();
    if (eat("(")) {
      auto inner = parse_sum();
      if (!eat(")")) fail("expected ')'");
      return inner;
    }
    if (pos_ >= text_.size()) fail("unexpected end");
    auto node = std::make_unique<ConstraintExpr>();
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      node->op = Op::kConst;
      node->value = std::stoll(std::string(text_.substr(start, pos_ - start)));
      return node;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i].name == name) {
          node->op = Op::kParam;
          node->value = static_cast<std::int64_t>(i);
          used_->insert(i);
          return node;
        }
      }
      fail("unknown parameter '" + name + "'");
    }
    fail("unexpected character");
  }

  std::string_view text_;
  const std::vector<ParamDomain>& params_;
  std::size_t pos_ = 0;
  std::set<std::size_t>* used_ = nullptr;
};

}  // namespace

Constraint::Constraint(std::string name, std::string expr, const std::vector<ParamDomain>& params)
    : name_(std::move(name)), expr_(std::move(expr)) {
  std::set<std::size_t> used;
  compiled_ = ExprParser(expr_, params).parse(used);
  used_.assign(used.begin(), used.end());
}

bool Constraint::holds(const std::vector<std::int64_t>& values) const {
  return compiled_->eval(values) != 0;
}

// ---------------------------------------------------------------------------
// Templates and configs

std::optional<std::size_t> ParamDomain::index_of(std::int64_t v) const {
  auto it = std::lower_bound(values.begin(), values.end(), v);
  if (it == values.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

ScheduleTemplate::ScheduleTemplate(std::string id, OpKind op_kind, std::vector<ParamDomain> params)
    : id_(std::move(id)), op_kind_(op_kind), params_(std::move(params)) {
  std::set<std::string> names;
  for (const auto& p : params_) {
    if (!names.insert(p.name).second) {
      throw Error(ErrorCode::kInvalidConfig, "duplicate parameter '" + p.name + "'");
    }
    if (p.values.empty()) throw Error(ErrorCode::kInvalidConfig, p.name + ": empty domain");
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      if (p.values[i] < 1) throw Error(ErrorCode::kInvalidConfig, p.name + ": non-positive value");
      if (i && p.values[i] <= p.values[i - 1]) {
        throw Error(ErrorCode::kInvalidConfig, p.name + ": domain not strictly increasing");
      }
    }
  }
}

void ScheduleTemplate::add_constraint(std::string name, std::string expr) {
  constraints_.emplace_back(std::move(name), std::move(expr), params_);
}

std::optional<std::size_t> ScheduleTemplate::param_index(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return i;
  return std::nullopt;
}

std::uint64_t ScheduleTemplate::raw_space_size() const {
  std::uint64_t total = 1;
  for (const auto& p : params_) {
    std::uint64_t n = p.values.size();
    if (total > std::numeric_limits<std::uint64_t>::max() / n) return std::numeric_limits<std::uint64_t>::max();
    total *= n;
  }
  return total;
}

std::size_t ScheduleTemplate::action_count() const {
  std::size_t a = 0;
  for (const auto& p : params_) a += p.values.size();
  return a;
}

std::string ScheduleConfig::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
  os << ']';
  return os.str();
}

std::string describe(const ScheduleConfig& cfg, const ScheduleTemplate& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < cfg.values.size() && i < t.size(); ++i) {
    os << (i ? " " : "") << t.params()[i].name << '=' << cfg.values[i];
  }
  return os.str();
}

Validation validate(const ScheduleConfig& cfg, const ScheduleTemplate& t) {
  if (cfg.values.size() != t.size()) {
    throw Error(ErrorCode::kLengthMismatch, "config has " + std::to_string(cfg.values.size()) +
                                                " values, template '" + t.id() + "' has " +
                                                std::to_string(t.size()) + " params");
  }
  Validation v;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!t.params()[i].index_of(cfg.values[i])) {
      v.ok = false;
      v.violations.push_back(t.params()[i].name + "=" + std::to_string(cfg.values[i]) +
                             " not in domain");
    }
  }
  for (const auto& c : t.constraints()) {
    if (!c.holds(cfg.values)) {
      v.ok = false;
      v.violations.push_back(c.name() + ": " + c.expr());
    }
  }
  return v;
}

bool is_valid(const ScheduleConfig& cfg, const ScheduleTemplate& t) { return validate(cfg, t).ok; }

ScheduleConfig random_config(const ScheduleTemplate& t, std::mt19937_64& rng) {
  ScheduleConfig cfg{t.id(), std::vector<std::int64_t>(t.size())};
  for (int attempt = 0; attempt < kMaxRejects; ++attempt) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& vals = t.params()[i].values;
      std::uniform_int_distribution<std::size_t> pick(0, vals.size() - 1);
      cfg.values[i] = vals[pick(rng)];
    }
    bool ok = true;
    for (const auto& c : t.constraints()) ok = ok && c.holds(cfg.values);
    if (ok) return cfg;
  }
  throw Error(ErrorCode::kExhaustedSampling,
              "no valid config for '" + t.id() + "' after " + std::to_string(kMaxRejects) + " draws");
}

ScheduleConfig random_config(const ScheduleTemplate& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_config(t, rng);
}

void for_each_config(const ScheduleTemplate& t, std::uint64_t cap,
                     const std::function<void(const ScheduleConfig&)>& fn) {
  if (t.raw_space_size() > cap) {
    throw Error(ErrorCode::kSpaceTooLarge, "space of '" + t.id() + "' exceeds cap " + std::to_string(cap));
  }
  std::vector<std::size_t> idx(t.size(), 0);
  ScheduleConfig cfg{t.id(), std::vector<std::int64_t>(t.size())};
  while (true) {
    for (std::size_t i = 0; i < t.size(); ++i) cfg.values[i] = t.params()[i].values[idx[i]];
    bool ok = true;
    for (const auto& c : t.constraints()) ok = ok && c.holds(cfg.values);
    if (ok) fn(cfg);
    // odometer increment, last parameter fastest
    std::size_t k = t.size();
    while (k > 0) {
      --k;
      if (++idx[k] < t.params()[k].values.size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (t.size() == 0) return;
  }
}

std::vector<ScheduleConfig> enumerate(const ScheduleTemplate& t, std::uint64_t cap) {
  std::vector<ScheduleConfig> out;
  for_each_config(t, cap, [&](const ScheduleConfig& c) { out.push_back(c); });
  return out;
}

ScheduleTemplate conv_template(const std::string& id, OpKind kind, const ConvDomains& d) {
  ScheduleTemplate t(id, kind,
                     {{"T_x", d.threads},
                      {"T_y", d.threads},
                      {"T_z", d.threads},
                      {"Tile_x", d.tiles},
                      {"Tile_y", d.tiles},
                      {"Tile_z", d.tiles},
                      {"Tile_rz", d.reduce}});
  t.add_constraint("thread_block", "T_x*T_y*T_z <= " + std::to_string(kMaxThreadsPerBlock));
  return t;
}

ScheduleConfig unit_config(const ScheduleTemplate& t) {
  return ScheduleConfig{t.id(), std::vector<std::int64_t>(t.size(), 1)};
}

// ---------------------------------------------------------------------------
// JSON descriptors

ScheduleTemplate template_from_json(const json& j) {
  try {
    std::vector<ParamDomain> params;
    for (const auto& p : j.at("params")) {
      params.push_back({p.at("name").get<std::string>(), p.at("values").get<std::vector<std::int64_t>>()});
    }
    ScheduleTemplate t(j.at("name").get<std::string>(),
                       parse_op_kind(j.value("op_kind", std::string("Conv2D"))), std::move(params));
    if (j.contains("constraints")) {
      int k = 0;
      for (const auto& c : j.at("constraints")) {
        if (c.is_string()) {
          t.add_constraint("c" + std::to_string(k), c.get<std::string>());
        } else {
          t.add_constraint(c.value("name", "c" + std::to_string(k)), c.at("expr").get<std::string>());
        }
        ++k;
      }
    }
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("template descriptor: ") + e.what());
  }
}

json template_to_json(const ScheduleTemplate& t) {
  json params = json::array();
  for (const auto& p : t.params()) params.push_back({{"name", p.name}, {"values", p.values}});
  json constraints = json::array();
  for (const auto& c : t.constraints()) constraints.push_back({{"name", c.name()}, {"expr", c.expr()}});
  return {{"name", t.id()},
          {"op_kind", std::string(to_string(t.op_kind()))},
          {"params", params},
          {"constraints", constraints}};
}

std::vector<ScheduleTemplate> load_templates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open template file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  std::vector<ScheduleTemplate> out;
  if (doc.is_array()) {
    for (const auto& j : doc) out.push_back(template_from_json(j));
  } else {
    out.push_back(template_from_json(doc));
  }
  return out;
}

json config_to_json(const ScheduleConfig& cfg) {
  return {{"template", cfg.template_id}, {"values", cfg.values}};
}

ScheduleConfig config_from_json(const json& j) {
  return ScheduleConfig{j.at("template").get<std::string>(), j.at("values").get<std::vector<std::int64_t>>()};
}

}  // namespace wpt

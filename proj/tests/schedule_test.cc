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

#include <gtest/gtest.h>

#include <set>

#include "wpt/schedule.h"

namespace wpt {
namespace {

ScheduleTemplate two_param(std::vector<std::int64_t> a, std::vector<std::int64_t> b) {
  return ScheduleTemplate("pair", OpKind::kConv2D, {{"a", std::move(a)}, {"b", std::move(b)}});
}

ScheduleConfig conv_cfg(std::vector<std::int64_t> v) { return {"conv2d", std::move(v)}; }

TEST(Validate, ThreadProductOverLimit) {
  const auto v = validate(conv_cfg({32, 32, 2, 1, 1, 1, 1}), conv_template());
  EXPECT_FALSE(v.ok);
  ASSERT_EQ(v.violations.size(), 1u);
}

TEST(Validate, ThreadProductWithinLimit) {
  EXPECT_TRUE(is_valid(conv_cfg({16, 8, 4, 2, 2, 2, 2}), conv_template()));
}

TEST(Validate, DomainMembership) {
  const auto t = two_param({1, 2, 4, 8}, {1, 2});
  EXPECT_FALSE(is_valid({"pair", {7, 1}}, t));
  EXPECT_TRUE(is_valid({"pair", {8, 2}}, t));
}

TEST(Validate, LengthMismatch) {
  try {
    validate(conv_cfg({1, 2}), conv_template());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(Template, ConvHasThreadConstraint) {
  const auto t = conv_template();
  ASSERT_EQ(t.size(), conv_param::kCount);
  ASSERT_FALSE(t.constraints().empty());
  EXPECT_EQ(t.params()[conv_param::kTileRz].name, "Tile_rz");
}

TEST(Template, RejectsBadDomainsAndDuplicateNames) {
  EXPECT_THROW(two_param({2, 1}, {1}), Error);
  EXPECT_THROW(two_param({}, {1}), Error);
  EXPECT_THROW(two_param({0, 1}, {1}), Error);
  EXPECT_THROW(ScheduleTemplate("d", OpKind::kConv2D, {{"a", {1}}, {"a", {1}}}), Error);
}

TEST(Constraint, Expressions) {
  const std::vector<ParamDomain> p{{"x", {1, 2, 4}}, {"y", {1, 2, 4}}};
  EXPECT_TRUE(Constraint("c", "x*y <= 4", p).holds({2, 2}));
  EXPECT_FALSE(Constraint("c", "x*y <= 4", p).holds({4, 2}));
  EXPECT_TRUE(Constraint("c", "x + 2*(y - 1) == 3", p).holds({1, 2}));
  EXPECT_TRUE(Constraint("c", "x·y ≤ 8", p).holds({2, 4}));
  EXPECT_TRUE(Constraint("c", "x > y", p).holds({4, 2}));
  EXPECT_THROW(Constraint("c", "x * z <= 4", p), Error);
  EXPECT_THROW(Constraint("c", "x * y", p), Error);
}

TEST(RandomConfig, SeededDeterminism) {
  const auto t = conv_template();
  EXPECT_EQ(random_config(t, 42), random_config(t, 42));
}

TEST(RandomConfig, AlwaysValid) {
  const auto t = conv_template();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(is_valid(random_config(t, rng), t));
}

TEST(RandomConfig, SingletonSpace) {
  auto t = two_param({1, 2}, {1, 2});
  t.add_constraint("only", "a + b >= 4");
  EXPECT_EQ(random_config(t, 9).values, (std::vector<std::int64_t>{2, 2}));
}

TEST(RandomConfig, ExhaustedWhenEmpty) {
  auto t = two_param({1, 2}, {1, 2});
  t.add_constraint("none", "a + b > 10");
  try {
    random_config(t, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExhaustedSampling);
  }
}

TEST(Enumerate, CartesianProduct) { EXPECT_EQ(enumerate(two_param({1, 2}, {1, 2}), 100).size(), 4u); }

TEST(Enumerate, FilteredProduct) {
  auto t = two_param({1, 2}, {1, 2});
  t.add_constraint("p", "a*b <= 2");
  EXPECT_EQ(enumerate(t, 100).size(), 3u);
}

TEST(Enumerate, SpaceTooLarge) {
  try {
    enumerate(conv_template(), 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpaceTooLarge);
  }
}

// Independent recursive counter over the reduced canonical template.
std::uint64_t count_recursive(const std::vector<std::vector<std::int64_t>>& d, std::size_t i,
                              std::vector<std::int64_t>& cur) {
  if (i == d.size()) return cur[0] * cur[1] * cur[2] <= 1024 ? 1 : 0;
  std::uint64_t n = 0;
  for (auto v : d[i]) {
    cur[i] = v;
    n += count_recursive(d, i + 1, cur);
  }
  return n;
}

TEST(Enumerate, MatchesRecursiveCounterAndValidation) {
  ConvDomains dom;
  dom.threads = {1, 4, 16, 32};
  dom.tiles = {1, 2};
  dom.reduce = {1, 4};
  const auto t = conv_template("conv2d", OpKind::kConv2D, dom);
  const auto all = enumerate(t, 1u << 20);
  std::vector<std::vector<std::int64_t>> d(3, dom.threads);
  for (int i = 0; i < 3; ++i) d.push_back(dom.tiles);
  d.push_back(dom.reduce);
  std::vector<std::int64_t> cur(7);
  EXPECT_EQ(all.size(), count_recursive(d, 0, cur));
  std::set<ScheduleConfig> uniq(all.begin(), all.end());
  EXPECT_EQ(uniq.size(), all.size());
  for (const auto& c : all) EXPECT_TRUE(is_valid(c, t));
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) EXPECT_TRUE(uniq.count(random_config(t, rng)));
}

TEST(Enumerate, CanonicalSpaceIsStrictlySmallerThanRawProduct) {
  const auto t = conv_template();
  std::uint64_t valid = 0;
  for_each_config(t, t.raw_space_size(), [&](const ScheduleConfig&) { ++valid; });
  EXPECT_LT(valid, t.raw_space_size());
  EXPECT_GT(valid, 0u);
}

TEST(TemplateJson, RoundTripAndStringConstraints) {
  const auto doc = nlohmann::json::parse(R"({
    "name": "small", "op_kind": "Conv2D",
    "params": [{"name": "T_x", "values": [1, 2]}, {"name": "T_y", "values": [1, 2, 4]}],
    "constraints": ["T_x*T_y <= 4", {"name": "sym", "expr": "T_x <= T_y"}]})");
  const auto t = template_from_json(doc);
  EXPECT_EQ(t.id(), "small");
  EXPECT_EQ(t.constraints().size(), 2u);
  EXPECT_EQ(enumerate(t, 100).size(), 4u);  // (1,1) (1,2) (1,4) (2,2)
  const auto again = template_from_json(template_to_json(t));
  EXPECT_EQ(enumerate(again, 100), enumerate(t, 100));
}

TEST(TemplateJson, ConfigRoundTrip) {
  const auto c = conv_cfg({1, 2, 4, 8, 1, 2, 4});
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
}

TEST(Template, ActionCount) { EXPECT_EQ(conv_template().action_count(), 6u * 3 + 4 * 4); }

}  // namespace
}  // namespace wpt

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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"
#include "test_util.h"
#include "wpt/graph_json.h"
#include "wpt/interpreter.h"
#include "wpt/npy.h"
#include "wpt/plan.h"

namespace wpt {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string output;
};

// Runs the CLI with stdout and stderr captured.
Run cli(const std::string& args, const std::string& env = "WPT_CACHE_DIR= ") {
  const fs::path log = fs::temp_directory_path() / "wpt_cli_test.log";
  const std::string cmd = env + " " + WPT_CLI_PATH + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output.assign(std::istreambuf_iterator<char>(in), {});
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Splits one RFC 4180 record.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted && c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
      fields.back() += '"';
      ++i;
    } else if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("wpt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    graph_ = root_ / "toy.json";
    save_graph(testing::toy_graph(), graph_);
  }

  std::string manifest(const fs::path& out, const std::string& extra = "") const {
    return "--graph " + graph_.string() + " --strategy genetic,random --budget 48 --seed 5 --out " + out.string() +
           " " + extra;
  }

  fs::path root_, graph_;
};

TEST_F(CliTest, TuneHistoryIsByteIdentical) {
  const auto a = cli("tune " + manifest(root_ / "a"));
  const auto b = cli("tune " + manifest(root_ / "b"));
  ASSERT_EQ(a.code, 0) << a.output;
  ASSERT_EQ(b.code, 0) << b.output;
  const auto ha = slurp(root_ / "a" / "history.jsonl");
  EXPECT_FALSE(ha.empty());
  EXPECT_EQ(ha, slurp(root_ / "b" / "history.jsonl"));
  const auto summary = nlohmann::json::parse(slurp(root_ / "a" / "tune_summary.json"));
  EXPECT_EQ(summary.at("seed"), 5);
  EXPECT_FALSE(summary.at("manifest_hash").get<std::string>().empty());
}

TEST_F(CliTest, WarmCacheRunReportsZeroEvaluations) {
  const auto cache = root_ / "cache";
  const auto cold = cli("tune " + manifest(root_ / "cold", "--cache-dir " + cache.string()));
  ASSERT_EQ(cold.code, 0) << cold.output;
  EXPECT_EQ(cold.output.find(" 0 evaluations"), std::string::npos) << cold.output;
  const auto warm = cli("tune " + manifest(root_ / "warm"), "WPT_CACHE_DIR=" + cache.string());
  ASSERT_EQ(warm.code, 0) << warm.output;
  EXPECT_NE(warm.output.find(" 0 evaluations"), std::string::npos) << warm.output;
  EXPECT_EQ(nlohmann::json::parse(slurp(root_ / "warm" / "tune_summary.json")).at("evaluations"), 0);
}

TEST_F(CliTest, BadTemplatePathIsConfigError) {
  EXPECT_EQ(cli("tune " + manifest(root_ / "o", "--templates " + (root_ / "nope.json").string())).code, 2);
  EXPECT_EQ(cli("tune --graph " + graph_.string() + " --strategy annealing --out " + (root_ / "o").string()).code, 2);
}

TEST_F(CliTest, ReportSpeedupsAreAtLeastOne) {
  const auto out = root_ / "opt";
  ASSERT_EQ(cli("optimize " + manifest(out)).code, 0);
  ASSERT_TRUE(fs::exists(out / "plan.json"));
  const auto rep = cli("report --logs " + out.string());
  ASSERT_EQ(rep.code, 0) << rep.output;
  std::ifstream csv(out / "speedup.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("node_id,op_kind,op_signature,reference_ms,selected_ms,speedup", 0), 0u);
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto f = split_csv(line);
    ASSERT_EQ(f.size(), 9u) << line;
    EXPECT_GE(std::stod(f[3]) / std::stod(f[4]), 1.0) << line;
    EXPECT_GE(std::stod(f[5]), 1.0) << line;
    ++rows;
  }
  EXPECT_GT(rows, 0);
}

TEST_F(CliTest, ReferencePlanOutputEqualsInterpreterDump) {
  const auto g = testing::toy_graph();
  Selections s;
  for (const auto& n : g.nodes()) {
    if (!is_compute(n.op.kind)) continue;
    ImplementationCandidate c;
    c.measured = EvalResult{1.0, EvalSource::kSynthetic};
    s[n.id] = c;
  }
  save_plan(build_plan(g, s), root_ / "plan.json");
  const auto x = testing::random_tensor(testing::nchw(1, 3, 8, 8), 4);
  save_tensor(x, root_ / "x.npy");

  const auto plan_run = cli("run --plan " + (root_ / "plan.json").string() + " --input x=" + (root_ / "x.npy").string() +
                            " --out " + (root_ / "plan_out").string());
  ASSERT_EQ(plan_run.code, 0) << plan_run.output;
  const auto ref_run = cli("run --reference --plan " + (root_ / "plan.json").string() + " --input x=" +
                           (root_ / "x.npy").string() + " --out " + (root_ / "ref_out").string());
  ASSERT_EQ(ref_run.code, 0) << ref_run.output;

  const auto want = interpret(g, {{"x", x}});
  EXPECT_EQ(load_tensor(root_ / "plan_out" / "logits.npy").data, want[0].data);
  EXPECT_EQ(load_tensor(root_ / "ref_out" / "logits.npy").data, want[0].data);
  EXPECT_TRUE(fs::exists(root_ / "plan_out" / "ledger.csv"));
}

TEST_F(CliTest, ReportOnEmptyDirectoryIsConfigError) {
  fs::create_directories(root_ / "empty");
  EXPECT_EQ(cli("report --logs " + (root_ / "empty").string()).code, 2);
  EXPECT_EQ(cli("report --logs " + (root_ / "missing").string()).code, 2);
}

TEST_F(CliTest, UnknownSubcommandIsConfigError) { EXPECT_EQ(cli("frobnicate").code, 2); }

}  // namespace
}  // namespace wpt

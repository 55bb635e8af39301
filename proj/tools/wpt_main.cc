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

// wpt: offline tuning, plan building, plan execution and reporting.
//
//   wpt tune     --graph g.json [--templates t.json] --out DIR
//   wpt optimize --graph g.json [--templates t.json] --out DIR [--layout NHWC]
//   wpt run      --plan plan.json --input x=x.npy --out DIR [--reference]
//   wpt report   --logs DIR [--out DIR]
//
// Exit status: 0 on success, 2 on a configuration error, 3 when evaluating or
// executing a kernel fails.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wpt/cache.h"
#include "wpt/graph_json.h"
#include "wpt/hash.h"
#include "wpt/interpreter.h"
#include "wpt/npy.h"
#include "wpt/runtime.h"
#include "wpt/tuner.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitEvaluation = 3;

struct Manifest {
  fs::path graph;
  std::vector<fs::path> templates;
  std::string strategy = "all";
  std::string evaluator = "synthetic";
  std::uint64_t budget = 512;
  std::uint64_t seed = 0;
  std::string cache_dir;
  fs::path out;

  // Measured evaluator protocol.
  int repeats = 11;
  int warmups = 3;
  std::string average = "step";

  std::string layout;
  bool no_fold = false;
  bool no_fuse = false;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wpt::Error(wpt::ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Hashes file contents rather than paths so copies of the same inputs agree.
std::string manifest_hash(const Manifest& m) {
  json doc;
  doc["graph"] = wpt::hex64(wpt::fnv1a(read_file(m.graph)));
  doc["templates"] = json::array();
  for (const auto& t : m.templates) doc["templates"].push_back(wpt::hex64(wpt::fnv1a(read_file(t))));
  doc["strategy"] = m.strategy;
  doc["evaluator"] = m.evaluator;
  doc["budget"] = m.budget;
  doc["seed"] = m.seed;
  if (m.evaluator == "measured") doc["protocol"] = {m.repeats, m.warmups};
  if (m.average != "step") doc["average"] = m.average;
  return wpt::hex64(wpt::fnv1a(doc.dump()));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw wpt::Error(wpt::ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

void write_json(const json& doc, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw wpt::Error(wpt::ErrorCode::kIoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::optional<wpt::CacheStore> open_cache(const Manifest& m) {
  std::string dir = m.cache_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("WPT_CACHE_DIR")) dir = env;
  }
  if (dir.empty()) return std::nullopt;
  return wpt::CacheStore(dir);
}

std::unique_ptr<wpt::Evaluator> make_evaluator(const Manifest& m) {
  if (m.evaluator == "synthetic") return std::make_unique<wpt::SyntheticEvaluator>();
  wpt::MeasureOptions opts;
  opts.repeats = m.repeats;
  opts.warmups = m.warmups;
  return std::make_unique<wpt::MeasuredEvaluator>(opts);
}

wpt::TemplateSet load_template_set(const Manifest& m) {
  if (m.templates.empty()) return wpt::default_templates();
  std::vector<wpt::ScheduleTemplate> all;
  for (const auto& path : m.templates) {
    auto loaded = wpt::load_templates(path);
    all.insert(all.end(), loaded.begin(), loaded.end());
  }
  return wpt::index_templates(all);
}

wpt::TuneOptions tune_options(const Manifest& m) {
  wpt::TuneOptions opts;
  opts.strategies = wpt::parse_strategies(m.strategy);
  if (opts.strategies.empty()) throw wpt::Error(wpt::ErrorCode::kEmptyStrategySet, "--strategy selects nothing");
  opts.budget = m.budget;
  opts.seed = m.seed;
  opts.rl.average = m.average == "ema" ? wpt::AverageMode::kExponential : wpt::AverageMode::kStepNormalized;
  return opts;
}

wpt::OptimizeOptions optimize_options(const Manifest& m) {
  wpt::OptimizeOptions o;
  o.fold = !m.no_fold;
  o.fuse = !m.no_fuse;
  if (!m.layout.empty()) o.layout = wpt::parse_layout(m.layout);
  return o;
}

// Fresh per-command log files; reruns must not append to stale ones.
void reset_file(const fs::path& path) {
  std::error_code ec;
  fs::remove(path, ec);
}

json stamp(json doc, const std::string& hash, std::uint64_t seed) {
  doc["manifest_hash"] = hash;
  doc["seed"] = seed;
  return doc;
}

json outcome_json(const wpt::StrategyOutcome& o) {
  return {{"strategy", wpt::to_string(o.strategy)},
          {"config", wpt::config_to_json(o.config)},
          {"runtime_ms", o.result.runtime_ms},
          {"source", wpt::to_string(o.result.source)},
          {"evaluations", o.evaluations}};
}

void write_history(std::ofstream& out, const wpt::TuneResult& r, const std::string& hash, std::uint64_t seed) {
  for (const auto& o : r.outcomes) {
    for (const auto& rec : o.history) out << stamp(rec, hash, seed).dump() << '\n';
  }
}

struct Session {
  Manifest m;
  std::string hash;
  wpt::Graph graph;
  wpt::TemplateSet templates;
  wpt::TuneOptions opts;
  std::optional<wpt::CacheStore> cache;
  std::unique_ptr<wpt::Evaluator> evaluator;
};

// Validates the manifest up front so configuration errors surface before any
// evaluation starts.
Session open_session(const Manifest& m) {
  Session s;
  s.m = m;
  s.graph = wpt::optimize_graph(wpt::load_graph(m.graph), optimize_options(m));
  s.templates = load_template_set(m);
  s.opts = tune_options(m);
  s.hash = manifest_hash(m);
  s.cache = open_cache(m);
  s.evaluator = make_evaluator(m);
  ensure_dir(m.out);
  reset_file(m.out / "evaluations.csv");
  s.evaluator->set_log(std::make_shared<wpt::EvalLog>(m.out / "evaluations.csv"));
  return s;
}

json manifest_json(const Session& s) {
  json t = json::array();
  for (const auto& p : s.m.templates) t.push_back(p.string());
  json doc = {{"graph", s.m.graph.string()},
              {"templates", t},
              {"strategy", s.m.strategy},
              {"evaluator", s.evaluator->fingerprint()},
              {"budget", s.m.budget},
              {"hardware", s.opts.hardware}};
  if (s.m.evaluator == "measured") {
    doc["protocol"] = {{"repeats", s.m.repeats}, {"warmups", s.m.warmups}, {"statistic", "median"}};
  }
  return stamp(doc, s.hash, s.m.seed);
}

int cmd_tune(const Manifest& m) {
  Session s = open_session(m);
  const wpt::CacheStore* cache = s.cache ? &*s.cache : nullptr;
  std::ofstream history(m.out / "history.jsonl", std::ios::trunc);
  if (!history) throw wpt::Error(wpt::ErrorCode::kIoError, "cannot write history.jsonl");

  json ops = json::array();
  std::uint64_t evaluations = 0;
  std::size_t hits = 0;
  std::set<std::string> done;
  for (const auto& node : s.graph.nodes()) {
    const auto t = s.templates.find(node.op.kind);
    if (t == s.templates.end() || !node.op.is_conv()) continue;
    if (!done.insert(node.op.signature() + "|" + t->second.id()).second) continue;
    const auto r = wpt::tune_operator(node.op, t->second, s.opts, *s.evaluator, cache);
    write_history(history, r, s.hash, m.seed);
    evaluations += r.evaluations;
    hits += r.cache_hit ? 1 : 0;
    json outcomes = json::array();
    for (const auto& o : r.outcomes) outcomes.push_back(outcome_json(o));
    ops.push_back({{"node", node.id},
                   {"op", node.op.signature()},
                   {"template", t->second.id()},
                   {"key", r.key},
                   {"cache_hit", r.cache_hit},
                   {"evaluations", r.evaluations},
                   {"strategies", outcomes},
                   {"best", outcome_json(r.best())}});
  }
  json summary = stamp({{"command", "tune"},
                        {"manifest", manifest_json(s)},
                        {"operators", ops},
                        {"cache_hits", hits},
                        {"evaluations", evaluations}},
                       s.hash, m.seed);
  write_json(summary, m.out / "tune_summary.json");
  std::cout << "tuned " << ops.size() << " operators, " << evaluations << " evaluations\n";
  return kExitOk;
}

double reference_estimate(const wpt::PlanReport& report) {
  double total = 0.0;
  for (const auto& n : report.nodes) {
    for (const auto& c : n.candidates) {
      if (c.source == wpt::ImplSource::kReferenceLibrary) total += c.measured->runtime_ms;
    }
  }
  return total;
}

int cmd_optimize(const Manifest& m) {
  Session s = open_session(m);
  const wpt::CacheStore* cache = s.cache ? &*s.cache : nullptr;
  wpt::PlanReport report = wpt::plan_graph(s.graph, s.templates, s.opts, *s.evaluator, cache);
  report.plan.manifest_hash = s.hash;
  report.plan.seed = m.seed;
  wpt::save_plan(report.plan, m.out / "plan.json");

  std::ofstream history(m.out / "history.jsonl", std::ios::trunc);
  std::ofstream selections(m.out / "selections.jsonl", std::ios::trunc);
  if (!history || !selections) throw wpt::Error(wpt::ErrorCode::kIoError, "cannot write logs in " + m.out.string());
  std::set<std::string> logged;
  std::uint64_t search_evaluations = 0;
  for (const auto& n : report.nodes) {
    json cands = json::array();
    double reference_ms = 0.0;
    for (const auto& c : n.candidates) {
      if (c.source == wpt::ImplSource::kReferenceLibrary) reference_ms = c.measured->runtime_ms;
      cands.push_back({{"source", wpt::to_string(c.source)}, {"runtime_ms", c.measured->runtime_ms}});
    }
    json rec = {{"node", n.id},
                {"op_kind", wpt::to_string(n.op.kind)},
                {"op", n.op.signature()},
                {"reference_ms", reference_ms},
                {"selected_ms", n.chosen.measured->runtime_ms},
                {"source", wpt::to_string(n.chosen.source)},
                {"candidates", cands}};
    if (n.tuning) {
      json outcomes = json::array();
      for (const auto& o : n.tuning->outcomes) outcomes.push_back(outcome_json(o));
      rec["strategies"] = outcomes;
      if (logged.insert(n.tuning->key).second) {
        write_history(history, *n.tuning, s.hash, m.seed);
        search_evaluations += n.tuning->evaluations;
      }
    }
    selections << stamp(rec, s.hash, m.seed).dump() << '\n';
  }

  const double ref_total = reference_estimate(report);
  json summary = stamp({{"command", "optimize"},
                        {"manifest", manifest_json(s)},
                        {"nodes", report.nodes.size()},
                        {"evaluations", search_evaluations},
                        {"reference_evaluations", report.evaluations - search_evaluations},
                        {"static_estimate_ms", report.plan.static_estimate_ms},
                        {"reference_estimate_ms", ref_total}},
                       s.hash, m.seed);
  write_json(summary, m.out / "optimize_summary.json");
  std::cout << "planned " << report.nodes.size() << " nodes, " << search_evaluations
            << " evaluations, estimate " << report.plan.static_estimate_ms << " ms (reference " << ref_total
            << " ms)\n";
  return kExitOk;
}

struct RunArgs {
  fs::path plan;
  std::vector<std::string> inputs;  // id=path
  std::optional<std::uint64_t> random_inputs;
  fs::path out;
  bool reference = false;
  bool check = false;
};

wpt::TensorMap load_inputs(const wpt::Graph& g, const RunArgs& a) {
  wpt::TensorMap inputs;
  for (const auto& item : a.inputs) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw wpt::Error(wpt::ErrorCode::kParseError, "--input expects id=path, got '" + item + "'");
    }
    inputs[item.substr(0, eq)] = wpt::load_tensor(item.substr(eq + 1));
  }
  if (a.random_inputs) {
    std::uint64_t stream = 0;
    for (const auto& id : g.input_ids()) {
      if (inputs.count(id)) continue;
      const auto& spec = g.node(id).op.tensor;
      inputs[id] = wpt::random_tensors({spec}, wpt::derive_seed(*a.random_inputs, stream++)).front();
    }
  }
  for (const auto& id : g.input_ids()) wpt::check_input(g.node(id), inputs);
  return inputs;
}

std::string output_file_name(const std::string& id) {
  std::string name;
  for (char c : id) name += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return name + ".npy";
}

int cmd_run(const RunArgs& a) {
  const wpt::InferencePlan plan = wpt::load_plan(a.plan);
  const wpt::TensorMap inputs = load_inputs(plan.graph, a);
  ensure_dir(a.out);

  std::vector<wpt::Tensor> outputs;
  json summary = {{"command", "run"}, {"plan", a.plan.string()}, {"mode", a.reference ? "reference" : "plan"}};
  if (a.reference) {
    outputs = wpt::interpret(plan.graph, inputs);
  } else {
    auto result = wpt::execute(plan, inputs);
    outputs = std::move(result.outputs);
    wpt::write_ledger_csv(result.ledger, a.out / "ledger.csv");
    double total = 0.0;
    for (const auto& e : result.ledger) total += e.runtime_ms;
    summary["total_ms"] = total;
    summary["steps"] = result.ledger.size();
  }
  json outs = json::array();
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& id = plan.graph.outputs()[i];
    const auto file = output_file_name(id);
    wpt::save_tensor(outputs[i], a.out / file);
    outs.push_back({{"id", id}, {"file", file}, {"spec", wpt::tensor_spec_to_json(outputs[i].spec)}});
  }
  summary["outputs"] = outs;
  if (a.check) summary["max_abs_diff"] = wpt::compare_with_reference(plan.graph, plan, inputs);
  write_json(stamp(summary, plan.manifest_hash, plan.seed), a.out / "run_summary.json");
  std::cout << "wrote " << outputs.size() << " outputs to " << a.out.string() << '\n';
  return kExitOk;
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::vector<json> records;
  std::ifstream in(path);
  if (!in) return records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw wpt::Error(wpt::ErrorCode::kParseError, path.string() + ": " + e.what());
    }
  }
  return records;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int cmd_report(const fs::path& logs, fs::path out) {
  if (!fs::is_directory(logs)) throw wpt::Error(wpt::ErrorCode::kIoError, "no log directory " + logs.string());
  const auto records = read_jsonl(logs / "selections.jsonl");
  if (records.empty()) {
    throw wpt::Error(wpt::ErrorCode::kIoError, "no selections.jsonl records under " + logs.string());
  }
  if (out.empty()) out = logs;
  ensure_dir(out);

  std::ofstream speedup(out / "speedup.csv");
  std::ofstream strategies(out / "strategies.csv");
  if (!speedup || !strategies) throw wpt::Error(wpt::ErrorCode::kIoError, "cannot write reports in " + out.string());
  speedup << "node_id,op_kind,op_signature,reference_ms,selected_ms,speedup,source,manifest_hash,seed\n";
  strategies << "node_id,op_signature,strategy,best_ms,evaluations,speedup_vs_reference,manifest_hash,seed\n";

  double log_sum = 0.0;
  for (const auto& r : records) {
    const double ref = r.at("reference_ms").get<double>();
    const double sel = r.at("selected_ms").get<double>();
    const std::string tail = "," + r.at("manifest_hash").get<std::string>() + "," +
                             std::to_string(r.at("seed").get<std::uint64_t>()) + "\n";
    const std::string node = csv_field(r.at("node").get<std::string>());
    const std::string sig = csv_field(r.at("op").get<std::string>());
    speedup << node << ',' << r.at("op_kind").get<std::string>() << ',' << sig << ',' << format_double(ref) << ','
            << format_double(sel) << ',' << format_double(ref / sel) << ',' << r.at("source").get<std::string>()
            << tail;
    log_sum += std::log(ref / sel);
    if (!r.contains("strategies")) continue;
    for (const auto& s : r.at("strategies")) {
      const double best = s.at("runtime_ms").get<double>();
      strategies << node << ',' << sig << ',' << s.at("strategy").get<std::string>() << ',' << format_double(best)
                 << ',' << s.at("evaluations").get<std::uint64_t>() << ',' << format_double(ref / best) << tail;
    }
  }
  const double geomean = std::exp(log_sum / static_cast<double>(records.size()));
  json summary = {{"command", "report"},
                  {"logs", logs.string()},
                  {"nodes", records.size()},
                  {"geomean_speedup", geomean}};
  write_json(stamp(summary, records.front().at("manifest_hash"), records.front().at("seed")),
             out / "report_summary.json");
  std::cout << "reported " << records.size() << " nodes, geometric-mean speedup " << geomean << "\n";
  return kExitOk;
}

int exit_code_for(wpt::ErrorCode code) {
  switch (code) {
    case wpt::ErrorCode::kKernelFailure:
    case wpt::ErrorCode::kNonPositiveRuntime:
    case wpt::ErrorCode::kNonFiniteLoss:
    case wpt::ErrorCode::kExhaustedSampling:
      return kExitEvaluation;
    default:
      return kExitConfig;
  }
}

void add_manifest_flags(CLI::App* cmd, Manifest& m) {
  cmd->add_option("--graph", m.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--templates", m.templates, "Schedule template JSON files")->check(CLI::ExistingFile);
  cmd->add_option("--strategy", m.strategy, "genetic, rl, random, all or a comma list");
  cmd->add_option("--evaluator", m.evaluator, "Runtime source")->check(CLI::IsMember({"synthetic", "measured"}));
  cmd->add_option("--budget", m.budget, "Distinct evaluations per strategy and operator")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", m.seed, "Base seed");
  cmd->add_option("--cache-dir", m.cache_dir, "Tuning cache directory (default: $WPT_CACHE_DIR)");
  cmd->add_option("--out", m.out, "Output directory")->required();
  cmd->add_option("--repeats", m.repeats, "Measured runs per median")->check(CLI::PositiveNumber);
  cmd->add_option("--warmups", m.warmups, "Discarded runs before timing")->check(CLI::NonNegativeNumber);
  cmd->add_option("--average", m.average, "RL runtime average")->check(CLI::IsMember({"step", "ema"}));
  cmd->add_flag("--no-fold", m.no_fold, "Skip constant folding");
  cmd->add_flag("--no-fuse", m.no_fuse, "Skip operator fusion");
  cmd->add_option("--layout", m.layout, "Internal layout")->check(CLI::IsMember({"NCHW", "NHWC"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline operator tuning and inference planning"};
  app.require_subcommand(1);

  Manifest tune_m, opt_m;
  auto* tune = app.add_subcommand("tune", "Search schedules for every tunable operator");
  add_manifest_flags(tune, tune_m);
  auto* optimize = app.add_subcommand("optimize", "Build an inference plan");
  add_manifest_flags(optimize, opt_m);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Execute a plan on input tensors");
  run->add_option("--plan", run_args.plan, "Plan JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--input", run_args.inputs, "Graph input as id=path.npy");
  run->add_option("--random-inputs", run_args.random_inputs, "Seed for inputs not given with --input");
  run->add_option("--out", run_args.out, "Output directory")->required();
  run->add_flag("--reference", run_args.reference, "Run the reference interpreter instead of the plan");
  run->add_flag("--check", run_args.check, "Record the max-abs difference to the reference");

  fs::path logs, report_out;
  auto* report = app.add_subcommand("report", "Speedup and strategy tables from optimize logs");
  report->add_option("--logs", logs, "Directory holding selections.jsonl")->required();
  report->add_option("--out", report_out, "Output directory (default: --logs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*tune) return cmd_tune(tune_m);
    if (*optimize) return cmd_optimize(opt_m);
    if (*run) return cmd_run(run_args);
    if (*report) return cmd_report(logs, report_out);
  } catch (const wpt::Error& e) {
    std::cerr << "wpt: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    std::cerr << "wpt: malformed JSON: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "wpt: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

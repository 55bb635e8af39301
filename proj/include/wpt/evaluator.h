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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "wpt/graph.h"
#include "wpt/kernels.h"
#include "wpt/schedule.h"

namespace wpt {

enum class EvalSource { kSynthetic, kMeasured, kCached };
std::string_view to_string(EvalSource s);
EvalSource parse_eval_source(std::string_view s);

struct EvalResult {
  double runtime_ms = 0.0;
  EvalSource source = EvalSource::kSynthetic;
};

// Appends CSV rows: op_signature,config,runtime_ms,source,timestamp.
class EvalLog {
 public:
  explicit EvalLog(const std::filesystem::path& path);
  void record(const OperatorSpec& op, const std::string& config, const EvalResult& r);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

// Config -> runtime. Implementations validate the config against the template
// (InvalidConfig) and count every call.
class Evaluator {
 public:
  virtual ~Evaluator() = default;

  EvalResult evaluate(const OperatorSpec& op, const ScheduleTemplate& t, const ScheduleConfig& cfg);
  // Runtime of the reference (library) implementation of `op`. `inputs` are
  // the operand specs; they may be omitted for convolutions.
  EvalResult evaluate_reference(const OperatorSpec& op, const std::vector<TensorSpec>& inputs = {});

  // Identifies the evaluator and its settings; cache entries are only reused
  // under an identical fingerprint.
  virtual std::string fingerprint() const = 0;
  // Whether evaluate() may be called from several threads at once.
  virtual bool concurrent() const = 0;

  std::uint64_t evaluations() const { return evaluations_.load(); }
  void set_log(std::shared_ptr<EvalLog> log) { log_ = std::move(log); }

 protected:
  virtual EvalResult do_evaluate(const OperatorSpec& op, const ScheduleTemplate& t,
                                 const ScheduleConfig& cfg) = 0;
  virtual EvalResult do_evaluate_reference(const OperatorSpec& op,
                                           const std::vector<TensorSpec>& inputs) = 0;

 private:
  std::atomic<std::uint64_t> evaluations_{0};
  std::shared_ptr<EvalLog> log_;
};

// Deterministic cost model:
//   runtime = base + sum_i w_i * (log2 c_i - log2 c*_i)^2  [+ seeded noise]
// The optimum c* is a valid config drawn from a hash of the operator
// signature, so cost(c*) = base is the unique minimum over the valid space.
class SyntheticSurface {
 public:
  SyntheticSurface(const OperatorSpec& op, const ScheduleTemplate& t, double base = 1.0);
  SyntheticSurface(ScheduleConfig optimum, std::vector<double> weights, double base);

  double cost(const ScheduleConfig& cfg) const;
  const ScheduleConfig& optimum() const { return optimum_; }
  const std::vector<double>& weights() const { return weights_; }
  double base() const { return base_; }

 private:
  ScheduleConfig optimum_;
  std::vector<double> weights_;
  double base_;
};

struct SyntheticOptions {
  double base = 1.0;
  double noise_sigma = 0.0;  // relative, log-normal
  std::uint64_t noise_seed = 0;
};

class SyntheticEvaluator : public Evaluator {
 public:
  explicit SyntheticEvaluator(SyntheticOptions options = {});

  std::string fingerprint() const override;
  bool concurrent() const override { return true; }

  // The surface used for (op, template); built on first use.
  const SyntheticSurface& surface(const OperatorSpec& op, const ScheduleTemplate& t);

 protected:
  EvalResult do_evaluate(const OperatorSpec& op, const ScheduleTemplate& t,
                         const ScheduleConfig& cfg) override;
  EvalResult do_evaluate_reference(const OperatorSpec& op,
                                   const std::vector<TensorSpec>& inputs) override;

 private:
  SyntheticOptions options_;
  std::mutex mu_;
  std::map<std::string, SyntheticSurface> surfaces_;
};

struct MeasureOptions {
  int repeats = 11;
  int warmups = 3;
  std::uint64_t input_seed = 0x5eed;
  bool allow_concurrent = false;  // timings interfere when measured in parallel
};

// Times the real kernels: median of `repeats` runs after `warmups` runs, on
// fixed random inputs derived from `input_seed`.
class MeasuredEvaluator : public Evaluator {
 public:
  explicit MeasuredEvaluator(MeasureOptions options = {});

  std::string fingerprint() const override;
  bool concurrent() const override { return options_.allow_concurrent; }
  const MeasureOptions& options() const { return options_; }

 protected:
  EvalResult do_evaluate(const OperatorSpec& op, const ScheduleTemplate& t,
                         const ScheduleConfig& cfg) override;
  EvalResult do_evaluate_reference(const OperatorSpec& op,
                                   const std::vector<TensorSpec>& inputs) override;

 private:
  const std::vector<Tensor>& operands(const OperatorSpec& op, const std::vector<TensorSpec>& specs);
  template <typename Fn>
  double time_median(Fn&& fn);

  MeasureOptions options_;
  std::mutex mu_;
  std::mutex run_mu_;
  std::map<std::string, std::vector<Tensor>> operands_;
};

// Operand specs of a convolution: NCHW input, filter[, bias].
std::vector<TensorSpec> conv_operand_specs(const OperatorSpec& op);
// Uniform [-1, 1) tensors of the given specs.
std::vector<Tensor> random_tensors(const std::vector<TensorSpec>& specs, std::uint64_t seed);

enum class AverageMode { kStepNormalized, kExponential };

// Runtime moving average driving the RL reward baseline.
//   kStepNormalized: alpha_t = (alpha_{t-1} * 0.8 + beta_t) / t, alpha_0 = 0.
//     Decays toward 0 for constant beta.
//   kExponential: alpha_t = 0.8 alpha_{t-1} + 0.2 beta_t, seeded with beta_1.
struct RuntimeTracker {
  double alpha = 0.0;
  std::uint64_t t = 0;
  AverageMode mode = AverageMode::kStepNormalized;
};

// NonPositiveRuntime if beta <= 0 or not finite.
RuntimeTracker update_moving_average(const RuntimeTracker& tracker, double beta);

}  // namespace wpt

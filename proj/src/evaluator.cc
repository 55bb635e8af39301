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

#include "wpt/evaluator.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "wpt/hash.h"

namespace wpt {

namespace {

// Uniform double in [0, 1) from a 64-bit hash.
double unit_from_hash(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms
     << 'Z';
  return os.str();
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void check_runtime(double ms, const std::string& what) {
  if (!(ms > 0.0) || !std::isfinite(ms)) {
    throw Error(ErrorCode::kNonPositiveRuntime, what + ": runtime " + std::to_string(ms));
  }
}

}  // namespace

std::string_view to_string(EvalSource s) {
  switch (s) {
    case EvalSource::kSynthetic: return "Synthetic";
    case EvalSource::kMeasured: return "Measured";
    case EvalSource::kCached: return "Cached";
  }
  return "?";
}

EvalSource parse_eval_source(std::string_view s) {
  if (s == "Synthetic") return EvalSource::kSynthetic;
  if (s == "Measured") return EvalSource::kMeasured;
  if (s == "Cached") return EvalSource::kCached;
  throw Error(ErrorCode::kParseError, "unknown eval source '" + std::string(s) + "'");
}

EvalLog::EvalLog(const std::filesystem::path& path) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  out_.open(path, std::ios::app);
  if (!out_) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  if (fresh) out_ << "op_signature,config,runtime_ms,source,timestamp\n";
}

void EvalLog::record(const OperatorSpec& op, const std::string& config, const EvalResult& r) {
  std::ostringstream row;
  row << csv_quote(op.signature()) << ',' << csv_quote(config) << ','
      << std::setprecision(17) << r.runtime_ms << ',' << to_string(r.source) << ','
      << iso_timestamp() << '\n';
  std::lock_guard lock(mu_);
  out_ << row.str();
  out_.flush();
}

EvalResult Evaluator::evaluate(const OperatorSpec& op, const ScheduleTemplate& t,
                               const ScheduleConfig& cfg) {
  const auto v = validate(cfg, t);
  if (!v.ok) {
    std::string msg = cfg.to_string() + " violates";
    for (const auto& s : v.violations) msg += " " + s;
    throw Error(ErrorCode::kInvalidConfig, msg);
  }
  EvalResult r = do_evaluate(op, t, cfg);
  check_runtime(r.runtime_ms, op.signature());
  ++evaluations_;
  if (log_) log_->record(op, cfg.to_string(), r);
  return r;
}

EvalResult Evaluator::evaluate_reference(const OperatorSpec& op,
                                         const std::vector<TensorSpec>& inputs) {
  EvalResult r = do_evaluate_reference(op, inputs);
  check_runtime(r.runtime_ms, op.signature());
  ++evaluations_;
  if (log_) log_->record(op, "reference", r);
  return r;
}

SyntheticSurface::SyntheticSurface(const OperatorSpec& op, const ScheduleTemplate& t, double base)
    : base_(base) {
  const std::uint64_t h = fnv1a(op.signature() + "|" + t.id());
  optimum_ = random_config(t, h);
  weights_.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    weights_[i] = 0.25 + 0.75 * unit_from_hash(derive_seed(h, i));
  }
}

SyntheticSurface::SyntheticSurface(ScheduleConfig optimum, std::vector<double> weights, double base)
    : optimum_(std::move(optimum)), weights_(std::move(weights)), base_(base) {
  if (weights_.size() != optimum_.values.size()) {
    throw Error(ErrorCode::kLengthMismatch, "surface weights and optimum differ in length");
  }
}

double SyntheticSurface::cost(const ScheduleConfig& cfg) const {
  if (cfg.values.size() != optimum_.values.size()) {
    throw Error(ErrorCode::kLengthMismatch, "config length " + std::to_string(cfg.values.size()) +
                                                " vs surface " +
                                                std::to_string(optimum_.values.size()));
  }
  double c = base_;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double d = std::log2(static_cast<double>(cfg.values[i])) -
                     std::log2(static_cast<double>(optimum_.values[i]));
    c += weights_[i] * d * d;
  }
  return c;
}

SyntheticEvaluator::SyntheticEvaluator(SyntheticOptions options) : options_(options) {
  if (!(options_.base > 0.0)) throw Error(ErrorCode::kInvalidConfig, "synthetic base must be > 0");
}

std::string SyntheticEvaluator::fingerprint() const {
  std::ostringstream os;
  os << "synthetic:base=" << std::setprecision(17) << options_.base
     << ",sigma=" << options_.noise_sigma << ",noise_seed=" << options_.noise_seed;
  return os.str();
}

const SyntheticSurface& SyntheticEvaluator::surface(const OperatorSpec& op,
                                                    const ScheduleTemplate& t) {
  const std::string key = op.signature() + "|" + t.id();
  std::lock_guard lock(mu_);
  auto it = surfaces_.find(key);
  if (it == surfaces_.end()) it = surfaces_.emplace(key, SyntheticSurface(op, t, options_.base)).first;
  return it->second;
}

EvalResult SyntheticEvaluator::do_evaluate(const OperatorSpec& op, const ScheduleTemplate& t,
                                           const ScheduleConfig& cfg) {
  double ms = surface(op, t).cost(cfg);
  if (options_.noise_sigma > 0.0) {
    std::mt19937_64 rng(derive_seed(options_.noise_seed,
                                    fnv1a(op.signature() + "|" + t.id() + "|" + cfg.to_string())));
    ms *= std::exp(options_.noise_sigma * std::normal_distribution<double>()(rng));
  }
  return {ms, EvalSource::kSynthetic};
}

EvalResult SyntheticEvaluator::do_evaluate_reference(const OperatorSpec& op,
                                                     const std::vector<TensorSpec>& inputs) {
  // The library kernel of a tunable op lands between 10% faster and 60%
  // slower than the surface optimum; other ops scale with their operand size.
  const double u = unit_from_hash(fnv1a(op.signature(), 0x7265666572656e63ULL));
  if (op.is_conv()) return {options_.base * (0.9 + 0.7 * u), EvalSource::kSynthetic};
  std::int64_t elems = 0;
  for (const auto& s : inputs) elems += s.num_elements();
  return {options_.base * (0.01 + 1e-6 * static_cast<double>(elems)) * (1.0 + 0.1 * u),
          EvalSource::kSynthetic};
}

std::vector<TensorSpec> conv_operand_specs(const OperatorSpec& op) {
  if (!op.is_conv()) throw Error(ErrorCode::kInvalidConfig, op.signature() + " is not a convolution");
  std::vector<TensorSpec> specs{TensorSpec{{op.n, op.c_in, op.h, op.w}},
                                TensorSpec{{op.c_out, op.c_in, op.k_h, op.k_w}}};
  if (op.kind == OpKind::kFusedConvBiasReLU) specs.push_back(TensorSpec{{op.c_out}});
  return specs;
}

std::vector<Tensor> random_tensors(const std::vector<TensorSpec>& specs, std::uint64_t seed) {
  std::vector<Tensor> out;
  out.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    check_spec(specs[i]);
    std::mt19937_64 rng(derive_seed(seed, i));
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    Tensor t(specs[i]);
    for (auto& v : t.data) v = dist(rng);
    out.push_back(std::move(t));
  }
  return out;
}

MeasuredEvaluator::MeasuredEvaluator(MeasureOptions options) : options_(options) {
  if (options_.repeats < 1 || options_.warmups < 0) {
    throw Error(ErrorCode::kInvalidConfig, "measure repeats must be >= 1 and warmups >= 0");
  }
}

std::string MeasuredEvaluator::fingerprint() const {
  std::ostringstream os;
  os << "measured:R=" << options_.repeats << ",W=" << options_.warmups
     << ",input_seed=" << options_.input_seed
     << ",concurrent=" << (options_.allow_concurrent ? 1 : 0);
  return os.str();
}

const std::vector<Tensor>& MeasuredEvaluator::operands(const OperatorSpec& op,
                                                       const std::vector<TensorSpec>& specs) {
  std::string key = op.signature();
  for (const auto& s : specs) {
    key += "|";
    for (auto d : s.dims) key += std::to_string(d) + "x";
    key += to_string(s.layout);
  }
  std::lock_guard lock(mu_);
  auto it = operands_.find(key);
  if (it == operands_.end()) {
    it = operands_.emplace(key, random_tensors(specs, derive_seed(options_.input_seed, fnv1a(key))))
             .first;
  }
  return it->second;
}

template <typename Fn>
double MeasuredEvaluator::time_median(Fn&& fn) {
  std::unique_lock<std::mutex> lock(run_mu_, std::defer_lock);
  if (!options_.allow_concurrent) lock.lock();
  for (int i = 0; i < options_.warmups; ++i) fn();
  std::vector<double> ms(options_.repeats);
  for (auto& m : ms) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    m = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  std::nth_element(ms.begin(), ms.begin() + ms.size() / 2, ms.end());
  double median = ms[ms.size() / 2];
  if (ms.size() % 2 == 0) {
    median = (median + *std::max_element(ms.begin(), ms.begin() + ms.size() / 2)) / 2.0;
  }
  // Clock granularity can yield 0 for trivial ops.
  return std::max(median, 1e-6);
}

EvalResult MeasuredEvaluator::do_evaluate(const OperatorSpec& op, const ScheduleTemplate& t,
                                          const ScheduleConfig& cfg) {
  (void)t;
  const auto& args = operands(op, conv_operand_specs(op));
  const TunedKernel kernel{op, cfg};
  try {
    const double ms = time_median([&] {
      if (op.kind == OpKind::kFusedConvBiasReLU) {
        (void)fused_conv_bias_relu_tuned(args[0], args[1], args[2], kernel);
      } else {
        (void)conv2d_tuned(args[0], args[1], kernel);
      }
    });
    return {ms, EvalSource::kMeasured};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    throw Error(ErrorCode::kKernelFailure, op.signature() + " " + cfg.to_string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kKernelFailure, op.signature() + " " + cfg.to_string() + ": " + e.what());
  }
}

EvalResult MeasuredEvaluator::do_evaluate_reference(const OperatorSpec& op,
                                                    const std::vector<TensorSpec>& inputs) {
  const auto specs = inputs.empty() && op.is_conv() ? conv_operand_specs(op) : inputs;
  const auto& args = operands(op, specs);
  std::vector<const Tensor*> ptrs;
  for (const auto& a : args) ptrs.push_back(&a);
  try {
    const double ms = time_median([&] {
      switch (op.kind) {
        case OpKind::kConv2D: (void)conv2d_reference(*ptrs.at(0), *ptrs.at(1), op); break;
        case OpKind::kFusedConvBiasReLU:
          (void)fused_conv_bias_relu(*ptrs.at(0), *ptrs.at(1), *ptrs.at(2), op);
          break;
        case OpKind::kBiasAdd: (void)bias_add(*ptrs.at(0), *ptrs.at(1)); break;
        case OpKind::kReLU: (void)relu(*ptrs.at(0)); break;
        case OpKind::kAdd: (void)add(*ptrs.at(0), *ptrs.at(1)); break;
        case OpKind::kMaxPool: (void)max_pool(*ptrs.at(0), op); break;
        case OpKind::kMatMul: (void)matmul(*ptrs.at(0), *ptrs.at(1)); break;
        case OpKind::kFlatten: (void)flatten(*ptrs.at(0)); break;
        case OpKind::kTranspose: (void)to_layout(*ptrs.at(0), op.target_layout); break;
        case OpKind::kIdentity:
        case OpKind::kDropout: {
          Tensor copy = *ptrs.at(0);
          (void)copy;
          break;
        }
        case OpKind::kInput:
        case OpKind::kConstant:
          throw Error(ErrorCode::kInvalidGraph, "nothing to measure for " + op.signature());
      }
    });
    return {ms, EvalSource::kMeasured};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidGraph) throw;
    throw Error(ErrorCode::kKernelFailure, op.signature() + " reference: " + e.what());
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::kKernelFailure, op.signature() + " reference: missing operand specs");
  }
}

RuntimeTracker update_moving_average(const RuntimeTracker& tracker, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kNonPositiveRuntime, "beta = " + std::to_string(beta));
  }
  RuntimeTracker next = tracker;
  next.t = tracker.t + 1;
  if (tracker.mode == AverageMode::kStepNormalized) {
    next.alpha = (tracker.alpha * 0.8 + beta) / static_cast<double>(next.t);
  } else {
    next.alpha = tracker.t == 0 ? beta : 0.8 * tracker.alpha + 0.2 * beta;
  }
  return next;
}

}  // namespace wpt

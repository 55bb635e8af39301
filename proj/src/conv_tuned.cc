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

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

#include "wpt/kernels.h"

namespace wpt {

namespace {

std::atomic<int> g_thread_limit{0};

struct Blocking {
  std::int64_t tx, ty, tz;           // logical workers per block
  std::int64_t tile_x, tile_y, tile_z;
  std::int64_t rz;
};

Blocking check_config(const ScheduleConfig& cfg) {
  using namespace conv_param;
  if (cfg.values.size() != kCount) {
    throw Error(ErrorCode::kInvalidConfig, "tuned conv expects " + std::to_string(kCount) +
                                               " schedule values, got " +
                                               std::to_string(cfg.values.size()));
  }
  for (auto v : cfg.values) {
    if (v < 1) throw Error(ErrorCode::kInvalidConfig, "non-positive schedule value in " + cfg.to_string());
  }
  const auto& v = cfg.values;
  if (v[kTx] * v[kTy] * v[kTz] > kMaxThreadsPerBlock) {
    throw Error(ErrorCode::kInvalidConfig, "T_x*T_y*T_z exceeds " + std::to_string(kMaxThreadsPerBlock));
  }
  return {v[kTx], v[kTy], v[kTz], v[kTileX], v[kTileY], v[kTileZ], v[kTileRz]};
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Smallest x >= 0 with x*s + k - pad >= 0, and one past the largest with
// x*s + k - pad < extent.
std::int64_t first_valid(std::int64_t k, std::int64_t pad, std::int64_t s) {
  std::int64_t num = pad - k;
  return num <= 0 ? 0 : ceil_div(num, s);
}
std::int64_t end_valid(std::int64_t k, std::int64_t pad, std::int64_t s, std::int64_t extent) {
  std::int64_t num = extent - 1 + pad - k;
  return num < 0 ? 0 : num / s + 1;
}

class TiledConv {
 public:
  TiledConv(const Tensor& input, const Tensor& filter, const Tensor* bias, bool relu,
            const OperatorSpec& op, const Blocking& b, Tensor& out)
      : in_(input.data.data()),
        wt_(filter.data.data()),
        bias_(bias ? bias->data.data() : nullptr),
        relu_(relu),
        op_(op),
        b_(b),
        si_(nchw_strides(input.spec)),
        sf_(nchw_strides(filter.spec)),
        so_(nchw_strides(out.spec)),
        out_(out.data.data()) {
    auto d = out.spec.nchw();
    N_ = d[0];
    C_out_ = d[1];
    OH_ = d[2];
    OW_ = d[3];
    pad_h_ = window_pad_before(op.h, op.k_h, op.stride, op.padding);
    pad_w_ = window_pad_before(op.w, op.k_w, op.stride, op.padding);
    bx_ = b.tx * b.tile_x;
    by_ = b.ty * b.tile_y;
    bz_ = b.tz * b.tile_z;
    nbx_ = ceil_div(OW_, bx_);
    nby_ = ceil_div(OH_, by_);
    nbz_ = ceil_div(C_out_, bz_);
  }

  std::int64_t workers() const { return b_.tx * b_.ty * b_.tz; }

  // Runs logical workers first, first + stride, ... on the calling thread.
  void run_workers(std::int64_t first, std::int64_t stride) const {
    std::vector<float> acc(static_cast<std::size_t>(b_.rz * b_.tile_z * b_.tile_y * b_.tile_x));
    for (std::int64_t w = first; w < workers(); w += stride) {
      const std::int64_t tx = w % b_.tx;
      const std::int64_t ty = (w / b_.tx) % b_.ty;
      const std::int64_t tz = w / (b_.tx * b_.ty);
      for (std::int64_t n = 0; n < N_; ++n)
        for (std::int64_t bz = 0; bz < nbz_; ++bz)
          for (std::int64_t by = 0; by < nby_; ++by)
            for (std::int64_t bx = 0; bx < nbx_; ++bx) {
              const std::int64_t z0 = bz * bz_ + tz * b_.tile_z;
              const std::int64_t y0 = by * by_ + ty * b_.tile_y;
              const std::int64_t x0 = bx * bx_ + tx * b_.tile_x;
              if (z0 >= C_out_ || y0 >= OH_ || x0 >= OW_) continue;
              compute_tile(n, z0, std::min(z0 + b_.tile_z, C_out_), y0, std::min(y0 + b_.tile_y, OH_), x0,
                           std::min(x0 + b_.tile_x, OW_), acc);
            }
    }
  }

 private:
  void compute_tile(std::int64_t n, std::int64_t z0, std::int64_t z1, std::int64_t y0, std::int64_t y1,
                    std::int64_t x0, std::int64_t x1, std::vector<float>& acc) const {
    const std::int64_t tz = b_.tile_z, ty = b_.tile_y, tx = b_.tile_x;
    const std::int64_t lane_size = tz * ty * tx;
    std::fill(acc.begin(), acc.end(), 0.0f);
    const std::int64_t s = op_.stride;
    const float* in_n = in_ + n * si_.n;

    for (std::int64_t ci0 = 0; ci0 < op_.c_in; ci0 += b_.rz) {
      const std::int64_t lanes = std::min(b_.rz, op_.c_in - ci0);
      for (std::int64_t kh = 0; kh < op_.k_h; ++kh) {
        const std::int64_t ylo = std::max(y0, first_valid(kh, pad_h_, s));
        const std::int64_t yhi = std::min(y1, end_valid(kh, pad_h_, s, op_.h));
        for (std::int64_t kw = 0; kw < op_.k_w; ++kw) {
          const std::int64_t xlo = std::max(x0, first_valid(kw, pad_w_, s));
          const std::int64_t xhi = std::min(x1, end_valid(kw, pad_w_, s, op_.w));
          if (ylo >= yhi || xlo >= xhi) continue;
          for (std::int64_t lane = 0; lane < lanes; ++lane) {
            const std::int64_t ci = ci0 + lane;
            const float* in_c = in_n + ci * si_.c;
            float* acc_lane = acc.data() + lane * lane_size;
            for (std::int64_t z = z0; z < z1; ++z) {
              const float wv = wt_[z * sf_.n + ci * sf_.c + kh * sf_.h + kw * sf_.w];
              float* acc_z = acc_lane + (z - z0) * ty * tx;
              for (std::int64_t y = ylo; y < yhi; ++y) {
                const float* in_row = in_c + (y * s + kh - pad_h_) * si_.h;
                float* acc_row = acc_z + (y - y0) * tx;
                const std::int64_t step = s * si_.w;
                std::int64_t src = (xlo * s + kw - pad_w_) * si_.w;
                for (std::int64_t x = xlo; x < xhi; ++x, src += step) acc_row[x - x0] += in_row[src] * wv;
              }
            }
          }
        }
      }
    }

    for (std::int64_t z = z0; z < z1; ++z)
      for (std::int64_t y = y0; y < y1; ++y)
        for (std::int64_t x = x0; x < x1; ++x) {
          const std::int64_t local = ((z - z0) * ty + (y - y0)) * tx + (x - x0);
          float v = acc[local];
          for (std::int64_t lane = 1; lane < b_.rz; ++lane) v += acc[lane * lane_size + local];
          if (bias_) v += bias_[z];
          if (relu_) v = v > 0.0f ? v : 0.0f;
          out_[n * so_.n + z * so_.c + y * so_.h + x * so_.w] = v;
        }
  }

  const float* in_;
  const float* wt_;
  const float* bias_;
  bool relu_;
  const OperatorSpec& op_;
  Blocking b_;
  Strides4 si_, sf_, so_;
  float* out_;
  std::int64_t N_ = 0, C_out_ = 0, OH_ = 0, OW_ = 0;
  std::int64_t pad_h_ = 0, pad_w_ = 0;
  std::int64_t bx_ = 1, by_ = 1, bz_ = 1;
  std::int64_t nbx_ = 0, nby_ = 0, nbz_ = 0;
};

Tensor run_tuned(const Tensor& input, const Tensor& filter, const Tensor* bias, bool relu,
                 const TunedKernel& kernel) {
  const Blocking b = check_config(kernel.config);
  Node probe;
  probe.id = "tuned_conv";
  probe.op = kernel.op;
  probe.op.kind = bias ? OpKind::kFusedConvBiasReLU : OpKind::kConv2D;
  std::vector<TensorSpec> specs{input.spec, filter.spec};
  if (bias) specs.push_back(bias->spec);
  Tensor out(infer_node_shape(probe, specs));

  TiledConv conv(input, filter, bias, relu, kernel.op, b, out);
  const std::int64_t threads = std::min<std::int64_t>(conv.workers(), kernel_thread_limit());
  if (threads <= 1) {
    conv.run_workers(0, 1);
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (std::int64_t t = 0; t < threads; ++t) pool.emplace_back([&conv, t, threads] { conv.run_workers(t, threads); });
  pool.clear();  // join
  return out;
}

}  // namespace

void set_kernel_thread_limit(int threads) { g_thread_limit = std::max(1, threads); }

int kernel_thread_limit() {
  int limit = g_thread_limit.load();
  if (limit > 0) return limit;
  return std::max(1u, std::thread::hardware_concurrency());
}

Tensor conv2d_tuned(const Tensor& input, const Tensor& filter, const TunedKernel& kernel) {
  return run_tuned(input, filter, nullptr, false, kernel);
}

Tensor fused_conv_bias_relu_tuned(const Tensor& input, const Tensor& filter, const Tensor& bias,
                                  const TunedKernel& kernel) {
  return run_tuned(input, filter, &bias, true, kernel);
}

}  // namespace wpt

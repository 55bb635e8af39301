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

#include "wpt/kernels.h"

#include <Eigen/Core>
#include <algorithm>
#include <limits>

namespace wpt {

namespace {

TensorSpec checked_output(OpKind kind, const OperatorSpec& op,
                          const std::vector<TensorSpec>& inputs) {
  Node probe;
  probe.id = std::string(to_string(kind));
  probe.op = op;
  probe.op.kind = kind;
  return infer_node_shape(probe, inputs);
}

}  // namespace

Tensor conv2d_reference(const Tensor& input, const Tensor& filter, const OperatorSpec& op) {
  Tensor out(checked_output(OpKind::kConv2D, op, {input.spec, filter.spec}));
  const auto si = nchw_strides(input.spec);
  const auto sf = nchw_strides(filter.spec);
  const auto so = nchw_strides(out.spec);
  const auto [N, C_out, OH, OW] = out.spec.nchw();
  const std::int64_t pad_h = window_pad_before(op.h, op.k_h, op.stride, op.padding);
  const std::int64_t pad_w = window_pad_before(op.w, op.k_w, op.stride, op.padding);
  const float* in = input.data.data();
  const float* wt = filter.data.data();

  for (std::int64_t n = 0; n < N; ++n)
    for (std::int64_t co = 0; co < C_out; ++co)
      for (std::int64_t oh = 0; oh < OH; ++oh)
        for (std::int64_t ow = 0; ow < OW; ++ow) {
          float acc = 0.0f;
          for (std::int64_t ci = 0; ci < op.c_in; ++ci)
            for (std::int64_t kh = 0; kh < op.k_h; ++kh) {
              const std::int64_t ih = oh * op.stride + kh - pad_h;
              if (ih < 0 || ih >= op.h) continue;
              for (std::int64_t kw = 0; kw < op.k_w; ++kw) {
                const std::int64_t iw = ow * op.stride + kw - pad_w;
                if (iw < 0 || iw >= op.w) continue;
                acc += in[n * si.n + ci * si.c + ih * si.h + iw * si.w] *
                       wt[co * sf.n + ci * sf.c + kh * sf.h + kw * sf.w];
              }
            }
          out.data[n * so.n + co * so.c + oh * so.h + ow * so.w] = acc;
        }
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (auto& v : out.data) v = v > 0.0f ? v : 0.0f;
  return out;
}

Tensor bias_add(const Tensor& x, const Tensor& bias) {
  Tensor out(checked_output(OpKind::kBiasAdd, {}, {x.spec, bias.spec}));
  out.data = x.data;
  if (x.spec.rank() == 2) {
    const auto cols = x.spec.dims[1];
    for (std::int64_t i = 0; i < x.size(); ++i) out.data[i] += bias.data[i % cols];
    return out;
  }
  const auto s = nchw_strides(x.spec);
  const auto [N, C, H, W] = x.spec.nchw();
  for (std::int64_t n = 0; n < N; ++n)
    for (std::int64_t c = 0; c < C; ++c)
      for (std::int64_t h = 0; h < H; ++h)
        for (std::int64_t w = 0; w < W; ++w) out.data[n * s.n + c * s.c + h * s.h + w * s.w] += bias.data[c];
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  Tensor out(checked_output(OpKind::kAdd, {}, {a.spec, b.spec}));
  for (std::int64_t i = 0; i < a.size(); ++i) out.data[i] = a.data[i] + b.data[i];
  return out;
}

Tensor max_pool(const Tensor& x, const OperatorSpec& op) {
  Tensor out(checked_output(OpKind::kMaxPool, op, {x.spec}));
  const auto si = nchw_strides(x.spec);
  const auto so = nchw_strides(out.spec);
  const auto [N, C, H, W] = x.spec.nchw();
  const auto [ON, OC, OH, OW] = out.spec.nchw();
  const std::int64_t pad_h = window_pad_before(H, op.k_h, op.stride, op.padding);
  const std::int64_t pad_w = window_pad_before(W, op.k_w, op.stride, op.padding);
  for (std::int64_t n = 0; n < ON; ++n)
    for (std::int64_t c = 0; c < OC; ++c)
      for (std::int64_t oh = 0; oh < OH; ++oh)
        for (std::int64_t ow = 0; ow < OW; ++ow) {
          float m = -std::numeric_limits<float>::infinity();
          for (std::int64_t kh = 0; kh < op.k_h; ++kh) {
            const std::int64_t ih = oh * op.stride + kh - pad_h;
            if (ih < 0 || ih >= H) continue;
            for (std::int64_t kw = 0; kw < op.k_w; ++kw) {
              const std::int64_t iw = ow * op.stride + kw - pad_w;
              if (iw < 0 || iw >= W) continue;
              m = std::max(m, x.data[n * si.n + c * si.c + ih * si.h + iw * si.w]);
            }
          }
          out.data[n * so.n + c * so.c + oh * so.h + ow * so.w] = m;
        }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  using RowMajor = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Tensor out(checked_output(OpKind::kMatMul, {}, {a.spec, b.spec}));
  Eigen::Map<const RowMajor> lhs(a.data.data(), a.spec.dims[0], a.spec.dims[1]);
  Eigen::Map<const RowMajor> rhs(b.data.data(), b.spec.dims[0], b.spec.dims[1]);
  Eigen::Map<RowMajor> result(out.data.data(), out.spec.dims[0], out.spec.dims[1]);
  result.noalias() = lhs * rhs;
  return out;
}

Tensor flatten(const Tensor& x) {
  TensorSpec spec = checked_output(OpKind::kFlatten, {}, {x.spec});
  if (x.spec.rank() == 4 && x.spec.layout != Layout::kNCHW) {
    return Tensor(spec, to_layout(x, Layout::kNCHW).data);
  }
  return Tensor(spec, x.data);
}

Tensor fused_conv_bias_relu(const Tensor& input, const Tensor& filter, const Tensor& bias,
                            const OperatorSpec& op) {
  checked_output(OpKind::kFusedConvBiasReLU, op, {input.spec, filter.spec, bias.spec});
  return relu(bias_add(conv2d_reference(input, filter, op), bias));
}

}  // namespace wpt

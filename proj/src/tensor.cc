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

#include "wpt/tensor.h"

#include <algorithm>
#include <cmath>

namespace wpt {

std::string_view to_string(Layout layout) {
  return layout == Layout::kNCHW ? "NCHW" : "NHWC";
}

Layout parse_layout(std::string_view s) {
  if (s == "NCHW") return Layout::kNCHW;
  if (s == "NHWC") return Layout::kNHWC;
  throw Error(ErrorCode::kParseError, "unknown layout '" + std::string(s) + "'");
}

std::array<std::int64_t, 4> TensorSpec::nchw() const {
  if (dims.size() != 4) throw Error(ErrorCode::kUnsupportedRank, "expected rank-4 tensor");
  if (layout == Layout::kNCHW) return {dims[0], dims[1], dims[2], dims[3]};
  return {dims[0], dims[3], dims[1], dims[2]};
}

void check_spec(const TensorSpec& spec) {
  if (spec.dims.empty()) throw Error(ErrorCode::kShapeMismatch, "tensor has no dims");
  for (auto d : spec.dims) {
    if (d < 1) throw Error(ErrorCode::kShapeMismatch, "tensor dim < 1");
  }
  if (spec.layout != Layout::kNCHW && spec.dims.size() != 4) {
    throw Error(ErrorCode::kUnsupportedRank, "layout only applies to rank-4 tensors");
  }
}

std::array<int, 4> layout_permutation(Layout from, Layout to) {
  if (from == to) return {0, 1, 2, 3};
  if (from == Layout::kNCHW) return {0, 2, 3, 1};  // NCHW -> NHWC
  return {0, 3, 1, 2};                              // NHWC -> NCHW
}

TensorSpec permute_spec(const TensorSpec& spec, Layout to) {
  if (spec.dims.size() != 4) {
    throw Error(ErrorCode::kUnsupportedRank, "layout change on rank-" +
                                                 std::to_string(spec.dims.size()) + " tensor");
  }
  auto perm = layout_permutation(spec.layout, to);
  TensorSpec out = spec;
  for (int i = 0; i < 4; ++i) out.dims[i] = spec.dims[perm[i]];
  out.layout = to;
  return out;
}

Tensor::Tensor(TensorSpec s, std::vector<float> values) : spec(std::move(s)), data(std::move(values)) {
  if (static_cast<std::int64_t>(data.size()) != spec.num_elements()) {
    throw Error(ErrorCode::kShapeMismatch, "data length " + std::to_string(data.size()) +
                                               " != product of dims " +
                                               std::to_string(spec.num_elements()));
  }
}

std::vector<std::int64_t> row_major_strides(const std::vector<std::int64_t>& dims) {
  std::vector<std::int64_t> strides(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) strides[i] = strides[i + 1] * dims[i + 1];
  return strides;
}

Strides4 nchw_strides(const TensorSpec& spec) {
  auto s = row_major_strides(spec.dims);
  if (spec.dims.size() != 4) throw Error(ErrorCode::kUnsupportedRank, "expected rank-4 tensor");
  if (spec.layout == Layout::kNCHW) return {s[0], s[1], s[2], s[3]};
  return {s[0], s[3], s[1], s[2]};
}

Tensor to_layout(const Tensor& t, Layout to) {
  if (t.spec.layout == to) return t;
  Tensor out(permute_spec(t.spec, to));
  auto [N, C, H, W] = t.spec.nchw();
  auto src = nchw_strides(t.spec);
  auto dst = nchw_strides(out.spec);
  for (std::int64_t n = 0; n < N; ++n)
    for (std::int64_t c = 0; c < C; ++c)
      for (std::int64_t h = 0; h < H; ++h)
        for (std::int64_t w = 0; w < W; ++w)
          out.data[n * dst.n + c * dst.c + h * dst.h + w * dst.w] =
              t.data[n * src.n + c * src.c + h * src.h + w * src.w];
  return out;
}

float max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.spec.dims != b.spec.dims || a.spec.layout != b.spec.layout ||
      a.data.size() != b.data.size()) {
    throw Error(ErrorCode::kShapeMismatch, "max_abs_diff on tensors of different shape");
  }
  float m = 0.0f;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    float d = std::fabs(a.data[i] - b.data[i]);
    if (std::isnan(d)) return d;
    m = std::max(m, d);
  }
  return m;
}

}  // namespace wpt

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

#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "wpt/error.h"

namespace wpt {

enum class Layout { kNCHW, kNHWC };
enum class DType { kF32 };

std::string_view to_string(Layout layout);
Layout parse_layout(std::string_view s);

// Physical dims in the tensor's own layout; `layout` only has meaning for
// rank-4 tensors and is NCHW otherwise.
struct TensorSpec {
  std::vector<std::int64_t> dims;
  Layout layout = Layout::kNCHW;
  DType dtype = DType::kF32;

  std::size_t rank() const { return dims.size(); }
  std::int64_t num_elements() const {
    return std::accumulate(dims.begin(), dims.end(), std::int64_t{1},
                           [](std::int64_t a, std::int64_t b) { return a * b; });
  }
  // Dims reordered to logical N, C, H, W. Requires rank 4.
  std::array<std::int64_t, 4> nchw() const;

  bool operator==(const TensorSpec&) const = default;
};

// Throws ShapeMismatch / UnsupportedRank when the invariants are violated.
void check_spec(const TensorSpec& spec);

// Axis permutation taking a rank-4 tensor from `from` to `to`.
std::array<int, 4> layout_permutation(Layout from, Layout to);
TensorSpec permute_spec(const TensorSpec& spec, Layout to);

struct Tensor {
  TensorSpec spec;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(TensorSpec s) : spec(std::move(s)), data(spec.num_elements(), 0.0f) {}
  Tensor(TensorSpec s, std::vector<float> values);

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
  const std::vector<std::int64_t>& dims() const { return spec.dims; }
};

// Element strides (row-major) of the physical dims.
std::vector<std::int64_t> row_major_strides(const std::vector<std::int64_t>& dims);

// Logical NCHW strides of a rank-4 tensor in its physical layout.
struct Strides4 {
  std::int64_t n, c, h, w;
};
Strides4 nchw_strides(const TensorSpec& spec);

// Reorders a rank-4 tensor into `to` layout. No-op copy when already there.
Tensor to_layout(const Tensor& t, Layout to);

float max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace wpt

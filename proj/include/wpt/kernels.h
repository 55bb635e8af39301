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

#include "wpt/graph.h"
#include "wpt/schedule.h"
#include "wpt/tensor.h"

namespace wpt {

// Reference implementations. All are pure and deterministic; tensors of rank 4
// may be NCHW or NHWC and outputs keep the input layout.

// Direct convolution; accumulation order n, c_out, h, w, c_in, k_h, k_w in
// float, padded taps skipped.
Tensor conv2d_reference(const Tensor& input, const Tensor& filter, const OperatorSpec& op);
Tensor relu(const Tensor& x);
Tensor bias_add(const Tensor& x, const Tensor& bias);
Tensor add(const Tensor& a, const Tensor& b);
Tensor max_pool(const Tensor& x, const OperatorSpec& op);
Tensor matmul(const Tensor& a, const Tensor& b);
// Flattens in logical NCHW order regardless of physical layout.
Tensor flatten(const Tensor& x);
Tensor fused_conv_bias_relu(const Tensor& input, const Tensor& filter, const Tensor& bias,
                            const OperatorSpec& op);

// A convolution bound to a schedule. Config values follow the canonical
// conv template order (T_x, T_y, T_z, Tile_x, Tile_y, Tile_z, Tile_rz).
struct TunedKernel {
  OperatorSpec op;
  ScheduleConfig config;
};

// Blocked convolution. x/y/z map to output width/height/channel. Each of the
// T_x*T_y*T_z logical workers owns one Tile_x*Tile_y*Tile_z sub-tile of every
// block; the c_in reduction is split into Tile_rz interleaved partial sums.
// With Tile_rz == 1 every output sees the reference accumulation order, so
// results are bit-identical to conv2d_reference.
//
// InvalidConfig if the config has the wrong arity or a non-positive value.
Tensor conv2d_tuned(const Tensor& input, const Tensor& filter, const TunedKernel& kernel);
// Same loop nest with a bias + ReLU epilogue.
Tensor fused_conv_bias_relu_tuned(const Tensor& input, const Tensor& filter, const Tensor& bias,
                                  const TunedKernel& kernel);

// Maximum number of OS threads a tuned kernel fans out to; defaults to the
// hardware concurrency.
void set_kernel_thread_limit(int threads);
int kernel_thread_limit();

}  // namespace wpt

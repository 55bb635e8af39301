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

#include <filesystem>

#include "wpt/tensor.h"

namespace wpt {

// NPY v1.0 little-endian float32, C order, in the tensor's physical dims.
// A sidecar "<path>.json" records {dims, layout, dtype}.
void save_tensor(const Tensor& t, const std::filesystem::path& path);
// The sidecar is optional; without it the layout is NCHW.
Tensor load_tensor(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace wpt

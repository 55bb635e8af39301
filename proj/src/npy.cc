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

#include "wpt/npy.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <regex>

#include "json.hpp"
#include "wpt/graph_json.h"

namespace wpt {

namespace {

static_assert(std::endian::native == std::endian::little, "npy IO assumes little-endian");
constexpr char kMagic[] = "\x93NUMPY";

std::string shape_tuple(const std::vector<std::int64_t>& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? ", " : "") + std::to_string(dims[i]);
  return s + (dims.size() == 1 ? ",)" : ")");
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

void save_tensor(const Tensor& t, const std::filesystem::path& path) {
  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': " + shape_tuple(t.spec.dims) + ", }";
  // Magic (6) + version (2) + length (2) + header + '\n' is a multiple of 64.
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(kMagic, 6);
  out.put(1);
  out.put(0);
  const auto len = static_cast<std::uint16_t>(header.size());
  out.write(reinterpret_cast<const char*>(&len), 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());

  std::ofstream side(sidecar_path(path));
  if (!side) throw Error(ErrorCode::kIoError, "cannot write " + sidecar_path(path).string());
  side << tensor_spec_to_json(t.spec).dump() << '\n';
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  char magic[6];
  unsigned char version[2];
  if (!in.read(magic, 6) || std::memcmp(magic, kMagic, 6) != 0 ||
      !in.read(reinterpret_cast<char*>(version), 2)) {
    throw Error(ErrorCode::kParseError, path.string() + " is not an NPY file");
  }
  std::uint32_t header_len = 0;
  if (version[0] == 1) {
    std::uint16_t l = 0;
    in.read(reinterpret_cast<char*>(&l), 2);
    header_len = l;
  } else {
    in.read(reinterpret_cast<char*>(&header_len), 4);
  }
  std::string header(header_len, '\0');
  if (!in.read(header.data(), header_len)) throw Error(ErrorCode::kParseError, path.string() + ": truncated header");

  std::smatch m;
  if (!std::regex_search(header, m, std::regex(R"('descr'\s*:\s*'([^']*)')")) || m[1] != "<f4") {
    throw Error(ErrorCode::kParseError, path.string() + ": only little-endian float32 is supported");
  }
  if (std::regex_search(header, std::regex(R"('fortran_order'\s*:\s*True)"))) {
    throw Error(ErrorCode::kParseError, path.string() + ": fortran order is not supported");
  }
  if (!std::regex_search(header, m, std::regex(R"('shape'\s*:\s*\(([^)]*)\))"))) {
    throw Error(ErrorCode::kParseError, path.string() + ": missing shape");
  }
  std::vector<std::int64_t> dims;
  const std::string shape = m[1];
  const std::regex num(R"(\d+)");
  for (auto it = std::sregex_iterator(shape.begin(), shape.end(), num); it != std::sregex_iterator(); ++it) {
    dims.push_back(std::stoll(it->str()));
  }

  TensorSpec spec{dims};
  std::ifstream side(sidecar_path(path));
  if (side) {
    try {
      spec = tensor_spec_from_json(nlohmann::json::parse(side));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kParseError, sidecar_path(path).string() + ": " + ex.what());
    }
    if (spec.dims != dims) throw Error(ErrorCode::kShapeMismatch, path.string() + ": sidecar dims differ from NPY shape");
  }
  check_spec(spec);
  Tensor t(spec);
  if (!in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(float)))) {
    throw Error(ErrorCode::kParseError, path.string() + ": truncated data");
  }
  return t;
}

}  // namespace wpt

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

#include <stdexcept>
#include <string>
#include <string_view>

namespace wpt {

enum class ErrorCode {
  kShapeMismatch,
  kUnsupportedRank,
  kInvalidGraph,
  kInvalidConfig,
  kLengthMismatch,
  kExhaustedSampling,
  kSpaceTooLarge,
  kKernelFailure,
  kNonPositiveRuntime,
  kMissingFitness,
  kIndexOutOfRange,
  kNonFiniteLoss,
  kEmptyStrategySet,
  kNoCandidates,
  kUnboundNode,
  kParseError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as wpt::Error; code() lets callers branch
// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kUnsupportedRank: return "UnsupportedRank";
    case ErrorCode::kInvalidGraph: return "InvalidGraph";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kExhaustedSampling: return "ExhaustedSampling";
    case ErrorCode::kSpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::kKernelFailure: return "KernelFailure";
    case ErrorCode::kNonPositiveRuntime: return "NonPositiveRuntime";
    case ErrorCode::kMissingFitness: return "MissingFitness";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kEmptyStrategySet: return "EmptyStrategySet";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kUnboundNode: return "UnboundNode";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace wpt

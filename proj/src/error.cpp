// Copyright 2026 The CCMA Kinematics Authors
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

#include "error.hpp"

namespace ccma {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDanglingBodyRef: return "DanglingBodyRef";
    case ErrorCode::kDuplicateBase: return "DuplicateBase";
    case ErrorCode::kNonUnitAxis: return "NonUnitAxis";
    case ErrorCode::kInvalidScene: return "InvalidScene";
    case ErrorCode::kUnknownScene: return "UnknownScene";
    case ErrorCode::kInfeasibleScene: return "InfeasibleScene";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingularSensitivity: return "SingularSensitivity";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ccma

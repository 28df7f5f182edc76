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

#ifndef CCMA_ERROR_HPP_
#define CCMA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ccma {

enum class ErrorCode {
  kInvalidArgument,
  kParseError,
  kDanglingBodyRef,
  kDuplicateBase,
  kNonUnitAxis,
  kInvalidScene,
  kUnknownScene,
  kInfeasibleScene,
  kDimensionMismatch,
  kSingularSensitivity,
  kIoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ccma

#endif  // CCMA_ERROR_HPP_

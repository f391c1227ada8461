// Copyright 2026 The ProBA Authors.
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

namespace proba {

enum class ErrorCode {
  kNonPositiveDepth,
  kNonPositiveRadius,
  kSingularCovariance,
  kLengthMismatch,
  kDimensionMismatch,
  kNonFiniteLoss,
  kNonFiniteGradient,
  kMissingGroundTruth,
  kDegenerateScene,
  kEmptyAfterSampling,
  kOutOfRange,
  kInvalidInput,
  kIoError,
};

const char* ErrorCodeName(ErrorCode code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

  // True for failures that come from the numbers rather than the inputs.
  bool IsNumerical() const {
    return code_ == ErrorCode::kNonFiniteLoss ||
           code_ == ErrorCode::kNonFiniteGradient ||
           code_ == ErrorCode::kSingularCovariance;
  }

 private:
  ErrorCode code_;
};

}  // namespace proba

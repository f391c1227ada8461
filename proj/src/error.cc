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

#include "proba/error.h"

namespace proba {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kNonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kMissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::kDegenerateScene: return "DegenerateScene";
    case ErrorCode::kEmptyAfterSampling: return "EmptyAfterSampling";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace proba

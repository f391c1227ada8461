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

// One-lane "vector" used by the reference kernels.

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace proba::kernels {
namespace {

struct ScalarLanes {
  using V = double;
  using Mask = bool;
  static constexpr std::size_t kWidth = 1;

  static V Load(const double* p) { return *p; }
  static void Store(double* p, V v) { *p = v; }
  static V Gather(const double* base, const std::int32_t* index) {
    return base[*index];
  }
  static V Sqrt(V x) { return std::sqrt(x); }
  static V Log(V x) { return std::log(x); }
  static V Exp(V x) { return std::exp(x); }
  static Mask Greater(V a, V b) { return a > b; }
  static V Select(Mask m, V a, V b) { return m ? a : b; }
};

}  // namespace
}  // namespace proba::kernels

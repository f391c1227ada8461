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

#include "proba/kernels/kernel.h"

namespace proba::kernels {

#define PROBA_DECLARE_KERNELS(ns)                                            \
  namespace ns {                                                            \
  void ProbaIsotropic(const FrameTable& frames,                             \
                      const CorrespondenceBatch& batch,                     \
                      const KernelParams& params, std::size_t begin,        \
                      std::size_t end, KernelOutputs* out);                 \
  void ClassicalBa(const FrameTable& frames, const CorrespondenceBatch& batch, \
                   const KernelParams& params, std::size_t begin,           \
                   std::size_t end, KernelOutputs* out);                    \
  void AdamUpdate(std::span<double> theta, std::span<double> m,             \
                  std::span<double> v, std::span<const double> grad,        \
                  const AdamCoefficients& coeff);                           \
  }

PROBA_DECLARE_KERNELS(scalar)
PROBA_DECLARE_KERNELS(avx2)

#undef PROBA_DECLARE_KERNELS

}  // namespace proba::kernels

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

#include "kernels/entry_points.h"
#include "kernels/kernel_body.h"
#include "kernels/lanes_avx2.h"
#include "kernels/lanes_scalar.h"

namespace proba::kernels::avx2 {

void ProbaIsotropic(const FrameTable& frames, const CorrespondenceBatch& batch,
                    const KernelParams& params, std::size_t begin,
                    std::size_t end, KernelOutputs* out) {
  ReprojectionKernel<Avx2Lanes, true>(frames, batch, params, begin, end, out);
}

void ClassicalBa(const FrameTable& frames, const CorrespondenceBatch& batch,
                 const KernelParams& params, std::size_t begin,
                 std::size_t end, KernelOutputs* out) {
  ReprojectionKernel<Avx2Lanes, false>(frames, batch, params, begin, end, out);
}

void AdamUpdate(std::span<double> theta, std::span<double> m,
                std::span<double> v, std::span<const double> grad,
                const AdamCoefficients& coeff) {
  const std::size_t n = theta.size();
  const std::size_t body = n - n % Avx2Lanes::kWidth;
  AdamBody<Avx2Lanes>(theta.data(), m.data(), v.data(), grad.data(), 0, body,
                      coeff);
  AdamBody<ScalarLanes>(theta.data(), m.data(), v.data(), grad.data(), body, n,
                        coeff);
}

}  // namespace proba::kernels::avx2

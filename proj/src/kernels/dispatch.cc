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

#include <cstdlib>
#include <string_view>

#include "kernels/entry_points.h"
#include "proba/error.h"

namespace proba::kernels {

const char* IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool IsaAvailable(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(PROBA_WITH_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa ActiveIsa() {
  static const Isa isa = [] {
    if (const char* forced = std::getenv("PROBA_SIMD")) {
      const std::string_view name(forced);
      if (name == "scalar") return Isa::kScalar;
      if (name == "avx2" && IsaAvailable(Isa::kAvx2)) return Isa::kAvx2;
    }
    return IsaAvailable(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
  }();
  return isa;
}

void FrameTable::Resize(std::size_t num_frames) {
  for (auto& f : fields) f.assign(num_frames, 0.0);
}

void CorrespondenceBatch::Resize(std::size_t n) {
  count = n;
  padded = (n + kLanes - 1) / kLanes * kLanes;
  for (auto* v : {&pu, &pv, &qu, &qv, &log_depth_p, &log_depth_q,
                  &log_sigma_p, &log_sigma_q, &weight}) {
    v->assign(padded, 0.0);
  }
  frame_i.assign(padded, 0);
  frame_j.assign(padded, 0);
}

void KernelOutputs::Resize(std::size_t padded) {
  stride = padded;
  data.assign(kNumFields * padded, 0.0);
}

namespace {

void CheckRange(const CorrespondenceBatch& batch, std::size_t begin,
                std::size_t end, const KernelOutputs& out) {
  if (begin % kLanes != 0 || end % kLanes != 0 || end > batch.padded ||
      out.stride < batch.padded) {
    throw Error(ErrorCode::kDimensionMismatch,
                "kernel range must be lane aligned and within the batch");
  }
}

}  // namespace

void ProbaIsotropic(Isa isa, const FrameTable& frames,
                    const CorrespondenceBatch& batch, const KernelParams& params,
                    std::size_t begin, std::size_t end, KernelOutputs* out) {
  CheckRange(batch, begin, end, *out);
#if defined(PROBA_WITH_AVX2)
  if (isa == Isa::kAvx2) {
    return avx2::ProbaIsotropic(frames, batch, params, begin, end, out);
  }
#endif
  (void)isa;
  scalar::ProbaIsotropic(frames, batch, params, begin, end, out);
}

void ClassicalBa(Isa isa, const FrameTable& frames,
                 const CorrespondenceBatch& batch, const KernelParams& params,
                 std::size_t begin, std::size_t end, KernelOutputs* out) {
  CheckRange(batch, begin, end, *out);
#if defined(PROBA_WITH_AVX2)
  if (isa == Isa::kAvx2) {
    return avx2::ClassicalBa(frames, batch, params, begin, end, out);
  }
#endif
  (void)isa;
  scalar::ClassicalBa(frames, batch, params, begin, end, out);
}

void AdamUpdate(Isa isa, std::span<double> theta, std::span<double> m,
                std::span<double> v, std::span<const double> grad,
                const AdamCoefficients& coeff) {
  if (m.size() != theta.size() || v.size() != theta.size() ||
      grad.size() != theta.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "optimizer state does not match the parameter count");
  }
#if defined(PROBA_WITH_AVX2)
  if (isa == Isa::kAvx2) return avx2::AdamUpdate(theta, m, v, grad, coeff);
#endif
  (void)isa;
  scalar::AdamUpdate(theta, m, v, grad, coeff);
}

}  // namespace proba::kernels

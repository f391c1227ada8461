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

// Batched per-correspondence loss and gradient kernels.
//
// Inputs are structure-of-arrays buffers padded to a multiple of kLanes;
// padded slots carry weight 0 and valid frame indices. Every kernel writes
// one value per field per correspondence, never accumulating across slots,
// so results do not depend on how the range is split across workers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace proba::kernels {

inline constexpr std::size_t kLanes = 4;

enum class Isa { kScalar, kAvx2 };

const char* IsaName(Isa isa);
bool IsaAvailable(Isa isa);
// Best available ISA unless PROBA_SIMD=scalar|avx2 overrides it.
Isa ActiveIsa();

// Decoded per-frame quantities.
struct FrameTable {
  enum Field {
    kR00, kR01, kR02, kR10, kR11, kR12, kR20, kR21, kR22,
    kT0, kT1, kT2,
    kFocal, kCx, kCy,
    kNumFields
  };
  std::array<std::vector<double>, kNumFields> fields;

  void Resize(std::size_t num_frames);
  std::size_t size() const { return fields[0].size(); }
  const double* operator[](Field f) const { return fields[f].data(); }
  double* operator[](Field f) { return fields[f].data(); }
};

struct CorrespondenceBatch {
  std::vector<double> pu, pv, qu, qv;
  std::vector<double> log_depth_p, log_depth_q;
  std::vector<double> log_sigma_p, log_sigma_q;
  std::vector<double> weight;
  std::vector<std::int32_t> frame_i, frame_j;
  std::size_t count = 0;   // real correspondences
  std::size_t padded = 0;  // multiple of kLanes

  void Resize(std::size_t n);
};

struct KernelOutputs {
  enum Field {
    kReproj,
    kBha,
    kSkipped,
    kGradLogDepthP,
    kGradLogDepthQ,
    kGradRadiusP,                  // 6 slots
    kGradRadiusQ = kGradRadiusP + 6,  // 6 slots
    kHi = kGradRadiusQ + 6,         // 3 slots
    kWi = kHi + 3,                  // 3 slots
    kFocalI = kWi + 3,
    kHj,                            // 3 slots
    kWj = kHj + 3,                  // 3 slots
    kFocalJ = kWj + 3,
    kNumFields
  };

  std::vector<double> data;
  std::size_t stride = 0;

  void Resize(std::size_t padded);
  double* operator[](int field) { return data.data() + field * stride; }
  const double* operator[](int field) const {
    return data.data() + field * stride;
  }
};

struct KernelParams {
  double lambda = 1.0;
  bool symmetric = true;
  double barrier_offset = 50.0;
  double barrier_scale = 1.0;
  double depth_floor = 1e-6;
  // Added to the Bhattacharyya distance; log(2) gives the kPrinted
  // normalization in three dimensions.
  double bc_distance_offset = 0.0;
};

// Probabilistic reprojection NLL plus the Bhattacharyya overlap term, for
// isotropic radii. Processes slots [begin, end); both must be multiples of
// kLanes.
void ProbaIsotropic(Isa isa, const FrameTable& frames,
                    const CorrespondenceBatch& batch, const KernelParams& params,
                    std::size_t begin, std::size_t end, KernelOutputs* out);

// Plain squared pixel reprojection error; radius fields are zero.
void ClassicalBa(Isa isa, const FrameTable& frames,
                 const CorrespondenceBatch& batch, const KernelParams& params,
                 std::size_t begin, std::size_t end, KernelOutputs* out);

struct AdamCoefficients {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  double bias_correction1 = 1.0;  // 1 - beta1^t
  double bias_correction2 = 1.0;  // 1 - beta2^t
};

// Decoupled-weight-decay Adam update over one parameter group.
void AdamUpdate(Isa isa, std::span<double> theta, std::span<double> m,
                std::span<double> v, std::span<const double> grad,
                const AdamCoefficients& coeff);

}  // namespace proba::kernels

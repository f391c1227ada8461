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

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "proba/kernels/kernel.h"
#include "proba/problem.h"
#include "proba/uncertainty.h"

namespace proba {

enum class LossMode { kProba, kClassicalBa, kPoseBaseline, kExposeBaseline };

const char* LossModeName(LossMode mode);
// Accepts "proba", "ba", "pose", "expose" (and the long forms).
LossMode ParseLossMode(const std::string& name);

struct LossConfig {
  LossMode mode = LossMode::kProba;
  // Weight of the Bhattacharyya term; 0 gives the NLL-only variant.
  double lambda = 1.0;
  // Reproject both endpoints (i->j with d_p and j->i with d_q).
  bool symmetric = true;
  // pOSE blend weight between the object-space and affine residuals.
  double eta = 0.05;
  // Weight of the exponential depth regularizer of the expOSE baseline.
  double expose_eta = 0.01;
  // Multiply every residual by the match confidence instead of 1.
  bool use_confidence = false;
  BcNormalization bc_normalization = BcNormalization::kStandard;
  // Residuals whose point falls behind the target camera contribute
  // barrier_offset + barrier_scale * (depth_floor - z)^2.
  double barrier_offset = 50.0;
  double barrier_scale = 1.0;
};

struct LossReport {
  double total = 0.0;
  double reproj = 0.0;
  double bha = 0.0;  // unweighted by lambda
  int skipped = 0;
  // Filled on request: per-correspondence reprojection and overlap parts.
  std::vector<double> per_correspondence_reproj;
  std::vector<double> per_correspondence_bha;
};

// --- Reference evaluations -------------------------------------------------
// Straightforward per-correspondence evaluations built from the geometry and
// uncertainty primitives. They are independent of the batched kernels and
// serve as oracles for them.

// Sum of 1/2 |q_hat - q|^2_{Sigma^-1} + 1/2 log det Sigma, with Sigma the
// projected covariance at the reprojected point. Anisotropic layouts use the
// full J C J^T propagation.
LossReport ReprojNll(const SceneProblem& problem, const ParameterBlock& params,
                     const LossConfig& config = {});

// Same quantity written in object space:
//   Z^2/(2 f^2 s^2) (q - q_hat)^T A^-1 (q - q_hat) + 2 log(f s)
//     + 1/2 log det A - 2 log Z.
// Isotropic layouts only.
double ReprojObjectSpace(const SceneProblem& problem,
                         const ParameterBlock& params,
                         const LossConfig& config = {});

// Sum over correspondences of -w BC^2 between the two world Gaussians.
double BhaLoss(const SceneProblem& problem, const ParameterBlock& params,
               const LossConfig& config = {});

double ClassicalBaLoss(const SceneProblem& problem, const ParameterBlock& params,
                       const LossConfig& config = {});

// pOSE: per residual r = [sqrt(1-eta) (P_12 X - m p_3^T X); sqrt(eta) (P_12 X - m)]
// with P = K_j [R_j | t_j] and X the homogeneous backprojected point.
double PoseBaselineLoss(const SceneProblem& problem,
                        const ParameterBlock& params, double eta,
                        const LossConfig& config = {});

// expOSE-style objective: object-space residual in normalized coordinates
// plus expose_eta * exp(-b^T x), where b is the unit bearing of the
// measurement and x the point in the target camera.
double ExposeBaselineLoss(const SceneProblem& problem,
                          const ParameterBlock& params,
                          const LossConfig& config = {});

// --- Batched objective -----------------------------------------------------

struct ObjectiveOptions {
  kernels::Isa isa = kernels::ActiveIsa();
  // Use the Eigen per-correspondence path even where a batched kernel exists.
  bool force_general = false;
  // 0 reads PROBA_NUM_WORKERS.
  int workers = 0;
  // Correspondences per task; a multiple of kernels::kLanes. Fixed so that
  // results do not depend on the worker count.
  std::size_t chunk = 256;
};

class WorkerPool;

// Loss and exact gradient with respect to the packed parameter vector.
// Per-correspondence terms are computed independently and reduced in index
// order, so results are bit-identical for any worker count.
class Objective {
 public:
  Objective(const SceneProblem& problem, const LossConfig& config,
            const ObjectiveOptions& options = {});
  ~Objective();

  const SceneProblem& problem() const { return problem_; }
  const LossConfig& config() const { return config_; }
  // True when the batched SIMD-capable kernel handles this configuration.
  bool UsesBatchedKernel() const;

  // grad may be empty for a value-only evaluation; otherwise it must have
  // the layout size and is overwritten.
  LossReport Evaluate(std::span<const double> params, std::span<double> grad,
                      bool per_correspondence = false);

 private:
  void Prepare(std::span<const double> params);

  const SceneProblem& problem_;
  LossConfig config_;
  ObjectiveOptions options_;
  ParameterLayout layout_;
  std::unique_ptr<WorkerPool> pool_;
  kernels::FrameTable frames_;
  kernels::CorrespondenceBatch batch_;
  kernels::KernelOutputs outputs_;
  std::vector<double> scratch_params_;
};

// Convenience wrapper: one Objective evaluation.
LossReport TotalLoss(const SceneProblem& problem, const ParameterBlock& params,
                     const LossConfig& config = {});

// Exact gradient of TotalLoss.
std::vector<double> Gradient(const SceneProblem& problem,
                             const ParameterBlock& params,
                             const LossConfig& config = {});

namespace detail {

// Per-correspondence Eigen evaluation writing the same fields as the batched
// kernels; handles every mode and both radius layouts.
void EvaluateGeneral(const SceneProblem& problem, const ParameterLayout& layout,
                     std::span<const double> params,
                     const kernels::FrameTable& frames,
                     const LossConfig& config, std::size_t begin,
                     std::size_t end, kernels::KernelOutputs* out);

}  // namespace detail

}  // namespace proba

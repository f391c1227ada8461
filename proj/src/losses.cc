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

#include "proba/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "proba/error.h"
#include "proba/parallel.h"

namespace proba {
namespace {

double WeightOf(const Correspondence& c, const LossConfig& config) {
  return config.use_confidence ? c.confidence : 1.0;
}

double Barrier(const LossConfig& config, double z) {
  const double gap = kDepthFloor - z;
  return config.barrier_offset + config.barrier_scale * gap * gap;
}

// One reprojection direction: the endpoint living in `src` at `depth`,
// carried into `dst` and compared with `meas`.
struct Direction {
  int src, dst;
  Pixel from, meas;
  double depth;
  Radius radius;
};

template <class Fn>
void ForEachDirection(const SceneProblem& problem, const ParameterBlock& params,
                      const LossConfig& config, Fn&& fn) {
  const auto& corr = problem.correspondences();
  for (int c = 0; c < static_cast<int>(corr.size()); ++c) {
    const Correspondence& k = corr[c];
    fn(c, Direction{k.frame_i, k.frame_j, k.p, k.q, params.DepthP(c),
                    params.RadiusP(c)});
    if (config.symmetric) {
      fn(c, Direction{k.frame_j, k.frame_i, k.q, k.p, params.DepthQ(c),
                      params.RadiusQ(c)});
    }
  }
}

double CheckedSum(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s += v;
  if (!std::isfinite(s)) {
    throw Error(ErrorCode::kNonFiniteLoss, "loss is not finite");
  }
  return s;
}

// Pairwise summation in a fixed tree shape.
double PairwiseSum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += x[k];
    return s;
  }
  const std::size_t half = n / 2;
  return PairwiseSum(x, half) + PairwiseSum(x + half, n - half);
}

}  // namespace

const char* LossModeName(LossMode mode) {
  switch (mode) {
    case LossMode::kProba: return "proba";
    case LossMode::kClassicalBa: return "classical_ba";
    case LossMode::kPoseBaseline: return "pose_baseline";
    case LossMode::kExposeBaseline: return "expose_baseline";
  }
  return "unknown";
}

LossMode ParseLossMode(const std::string& name) {
  if (name == "proba") return LossMode::kProba;
  if (name == "ba" || name == "classical_ba") return LossMode::kClassicalBa;
  if (name == "pose" || name == "pose_baseline" || name == "pOSE") {
    return LossMode::kPoseBaseline;
  }
  if (name == "expose" || name == "expose_baseline" || name == "expOSE") {
    return LossMode::kExposeBaseline;
  }
  throw Error(ErrorCode::kInvalidInput, "unknown loss mode '" + name + "'");
}

// --- Reference evaluations -------------------------------------------------

LossReport ReprojNll(const SceneProblem& problem, const ParameterBlock& params,
                     const LossConfig& config) {
  LossReport report;
  const auto& corr = problem.correspondences();
  report.per_correspondence_reproj.assign(corr.size(), 0.0);
  ForEachDirection(problem, params, config, [&](int c, const Direction& d) {
    const double w = WeightOf(corr[c], config);
    const Intrinsics Ks = problem.IntrinsicsOf(params, d.src);
    const Intrinsics Kd = problem.IntrinsicsOf(params, d.dst);
    const Pose Td = params.PoseOf(d.dst);
    const Gaussian3 g =
        WorldGaussian(Ks, params.PoseOf(d.src), d.from, d.depth, d.radius);
    const Eigen::Vector3d x = Td.Apply(g.mean);
    double value;
    if (x.z() <= kDepthFloor) {
      value = Barrier(config, x.z());
      ++report.skipped;
    } else {
      Eigen::Matrix2d sigma;
      if (g.isotropic) {
        sigma = ProjectedCovariance(Kd, x, g.sigma);
      } else {
        const Eigen::Matrix3d R = Td.Rotation();
        sigma = ProjectedCovariance(Kd, x, R * g.covariance * R.transpose());
      }
      const Eigen::Vector2d r = Project(Kd, x).vec() - d.meas.vec();
      value = 0.5 * r.dot(sigma.inverse() * r) +
              0.5 * std::log(sigma.determinant());
    }
    report.per_correspondence_reproj[c] += w * value;
  });
  report.reproj = CheckedSum(report.per_correspondence_reproj);
  report.total = report.reproj;
  return report;
}

double ReprojObjectSpace(const SceneProblem& problem,
                         const ParameterBlock& params,
                         const LossConfig& config) {
  if (params.layout.options().anisotropic) {
    throw Error(ErrorCode::kInvalidInput,
                "object-space form needs isotropic radii");
  }
  const auto& corr = problem.correspondences();
  std::vector<double> terms(corr.size(), 0.0);
  ForEachDirection(problem, params, config, [&](int c, const Direction& d) {
    const double w = WeightOf(corr[c], config);
    const Intrinsics Ks = problem.IntrinsicsOf(params, d.src);
    const Intrinsics Kd = problem.IntrinsicsOf(params, d.dst);
    const CameraPoint xs = Backproject(Ks, d.from, d.depth);
    const Pose rel = RelativePose(params.PoseOf(d.src), params.PoseOf(d.dst));
    const Eigen::Vector3d x = rel.Apply(xs);
    const double z = x.z();
    if (z <= kDepthFloor) {
      terms[c] += w * Barrier(config, z);
      return;
    }
    const double sigma = std::get<double>(d.radius);
    const double f = Kd.Focal();
    const Eigen::Matrix2d A = PropagationMatrixA(x);
    const Eigen::Vector2d r = d.meas.vec() - Project(Kd, x).vec();
    const double quad = z * z / (2.0 * f * f * sigma * sigma) *
                        r.dot(A.inverse() * r);
    terms[c] += w * (quad + 2.0 * std::log(f * sigma) +
                     0.5 * std::log(A.determinant()) - 2.0 * std::log(z));
  });
  return CheckedSum(terms);
}

double BhaLoss(const SceneProblem& problem, const ParameterBlock& params,
               const LossConfig& config) {
  const auto& corr = problem.correspondences();
  std::vector<double> terms(corr.size(), 0.0);
  for (int c = 0; c < static_cast<int>(corr.size()); ++c) {
    const Correspondence& k = corr[c];
    const Gaussian3 gp =
        WorldGaussian(problem.IntrinsicsOf(params, k.frame_i),
                      params.PoseOf(k.frame_i), k.p, params.DepthP(c),
                      params.RadiusP(c));
    const Gaussian3 gq =
        WorldGaussian(problem.IntrinsicsOf(params, k.frame_j),
                      params.PoseOf(k.frame_j), k.q, params.DepthQ(c),
                      params.RadiusQ(c));
    const double bc = BhattacharyyaCoefficient(gp, gq, config.bc_normalization);
    terms[c] = -WeightOf(k, config) * bc * bc;
  }
  return CheckedSum(terms);
}

namespace {

// Shared skeleton of the radius-free objectives. `term` receives the
// target-camera point and returns the unweighted value.
template <class Term>
double GeometricLoss(const SceneProblem& problem, const ParameterBlock& params,
                     const LossConfig& config, bool barrier, Term&& term) {
  const auto& corr = problem.correspondences();
  std::vector<double> terms(corr.size(), 0.0);
  ForEachDirection(problem, params, config, [&](int c, const Direction& d) {
    const Intrinsics Ks = problem.IntrinsicsOf(params, d.src);
    const Intrinsics Kd = problem.IntrinsicsOf(params, d.dst);
    const CameraPoint xs = Backproject(Ks, d.from, d.depth);
    const Pose rel = RelativePose(params.PoseOf(d.src), params.PoseOf(d.dst));
    const Eigen::Vector3d x = rel.Apply(xs);
    const double w = WeightOf(corr[c], config);
    if (barrier && x.z() <= kDepthFloor) {
      terms[c] += w * Barrier(config, x.z());
    } else {
      terms[c] += w * term(Kd, x, d.meas);
    }
  });
  return CheckedSum(terms);
}

}  // namespace

double ClassicalBaLoss(const SceneProblem& problem, const ParameterBlock& params,
                       const LossConfig& config) {
  return GeometricLoss(
      problem, params, config, true,
      [](const Intrinsics& K, const Eigen::Vector3d& x, const Pixel& m) {
        return 0.5 * (Project(K, x).vec() - m.vec()).squaredNorm();
      });
}

double PoseBaselineLoss(const SceneProblem& problem,
                        const ParameterBlock& params, double eta,
                        const LossConfig& config) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "pOSE eta must lie in (0, 1)");
  }
  return GeometricLoss(
      problem, params, config, false,
      [eta](const Intrinsics& K, const Eigen::Vector3d& x, const Pixel& m) {
        const Eigen::Vector3d px = K.K() * x;  // P X with P = K [R | t]
        const Eigen::Vector2d ose = px.head<2>() - m.vec() * px.z();
        const Eigen::Vector2d affine = px.head<2>() - m.vec();
        return 0.5 * ((1.0 - eta) * ose.squaredNorm() +
                      eta * affine.squaredNorm());
      });
}

double ExposeBaselineLoss(const SceneProblem& problem,
                          const ParameterBlock& params,
                          const LossConfig& config) {
  const double eta = config.expose_eta;
  return GeometricLoss(
      problem, params, config, false,
      [eta](const Intrinsics& K, const Eigen::Vector3d& x, const Pixel& m) {
        const double f = K.Focal();
        const Eigen::Vector3d bearing((m.u - K.Cx()) / f, (m.v - K.Cy()) / f,
                                      1.0);
        const Eigen::Vector2d ose(x.x() - bearing.x() * x.z(),
                                  x.y() - bearing.y() * x.z());
        return 0.5 * ose.squaredNorm() +
               eta * std::exp(-bearing.normalized().dot(x));
      });
}

// --- Batched objective -----------------------------------------------------

Objective::Objective(const SceneProblem& problem, const LossConfig& config,
                     const ObjectiveOptions& options)
    : problem_(problem),
      config_(config),
      options_(options),
      layout_(problem.Layout()) {
  if (config_.lambda < 0.0) {
    throw Error(ErrorCode::kOutOfRange, "lambda must be non-negative");
  }
  if (config_.mode == LossMode::kPoseBaseline &&
      !(config_.eta > 0.0 && config_.eta < 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "pOSE eta must lie in (0, 1)");
  }
  if (options_.chunk == 0 || options_.chunk % kernels::kLanes != 0) {
    throw Error(ErrorCode::kInvalidInput,
                "chunk must be a positive multiple of the lane count");
  }
  if (!kernels::IsaAvailable(options_.isa)) options_.isa = kernels::Isa::kScalar;
  const int workers =
      options_.workers > 0 ? options_.workers : WorkersFromEnvironment();
  pool_ = std::make_unique<WorkerPool>(workers);

  const auto& corr = problem_.correspondences();
  batch_.Resize(corr.size());
  for (std::size_t c = 0; c < corr.size(); ++c) {
    batch_.pu[c] = corr[c].p.u;
    batch_.pv[c] = corr[c].p.v;
    batch_.qu[c] = corr[c].q.u;
    batch_.qv[c] = corr[c].q.v;
    batch_.frame_i[c] = corr[c].frame_i;
    batch_.frame_j[c] = corr[c].frame_j;
    batch_.weight[c] = WeightOf(corr[c], config_);
  }
  // Padded slots reproject a unit-depth point at frame 0's principal point
  // into frame 0 itself; their weight is zero and they are never reduced.
  const auto& f0 = problem_.frames().front();
  for (std::size_t c = corr.size(); c < batch_.padded; ++c) {
    batch_.pu[c] = batch_.qu[c] = 0.5 * f0.width;
    batch_.pv[c] = batch_.qv[c] = 0.5 * f0.height;
  }
  frames_.Resize(problem_.num_frames());
  outputs_.Resize(batch_.padded);
}

Objective::~Objective() = default;

bool Objective::UsesBatchedKernel() const {
  if (options_.force_general) return false;
  if (config_.mode == LossMode::kClassicalBa) return true;
  return config_.mode == LossMode::kProba && !layout_.options().anisotropic;
}

void Objective::Prepare(std::span<const double> params) {
  if (params.size() != layout_.Size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "parameter vector has " + std::to_string(params.size()) +
                    " entries, layout expects " +
                    std::to_string(layout_.Size()));
  }
  for (int k = 0; k < problem_.num_frames(); ++k) {
    const std::size_t o = layout_.PoseOffset(k);
    const Eigen::Vector3d r(params[o], params[o + 1], params[o + 2]);
    const Eigen::Matrix3d R = RotationMatrix(r);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        frames_[kernels::FrameTable::Field(kernels::FrameTable::kR00 + 3 * a +
                                           b)][k] = R(a, b);
      }
      frames_[kernels::FrameTable::Field(kernels::FrameTable::kT0 + a)][k] =
          params[o + 3 + a];
    }
    Intrinsics K;
    K.fov_deg = params[layout_.FovIndex(k)];
    K.width = problem_.frames()[k].width;
    K.height = problem_.frames()[k].height;
    frames_[kernels::FrameTable::kFocal][k] = K.Focal();
    frames_[kernels::FrameTable::kCx][k] = K.Cx();
    frames_[kernels::FrameTable::kCy][k] = K.Cy();
  }
  const std::size_t C = batch_.count;
  for (std::size_t c = 0; c < C; ++c) {
    batch_.log_depth_p[c] = params[layout_.DepthP(c)];
    batch_.log_depth_q[c] = params[layout_.DepthQ(c)];
    if (!layout_.options().anisotropic) {
      batch_.log_sigma_p[c] = params[layout_.RadiusP(c)];
      batch_.log_sigma_q[c] = params[layout_.RadiusQ(c)];
    }
  }
}

LossReport Objective::Evaluate(std::span<const double> params,
                               std::span<double> grad,
                               bool per_correspondence) {
  if (!grad.empty() && grad.size() != layout_.Size()) {
    throw Error(ErrorCode::kLengthMismatch, "gradient buffer has wrong size");
  }
  Prepare(params);

  kernels::KernelParams kp;
  kp.lambda = config_.lambda;
  kp.symmetric = config_.symmetric;
  kp.barrier_offset = config_.barrier_offset;
  kp.barrier_scale = config_.barrier_scale;
  kp.depth_floor = kDepthFloor;
  kp.bc_distance_offset =
      config_.bc_normalization == BcNormalization::kPrinted ? std::log(2.0)
                                                            : 0.0;

  const std::size_t padded = batch_.padded;
  const std::size_t chunk = options_.chunk;
  const std::size_t tasks = (padded + chunk - 1) / chunk;
  const bool batched = UsesBatchedKernel();
  pool_->Run(tasks, [&](std::size_t t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(padded, begin + chunk);
    if (!batched) {
      detail::EvaluateGeneral(problem_, layout_, params, frames_, config_,
                              begin, end, &outputs_);
    } else if (config_.mode == LossMode::kProba) {
      kernels::ProbaIsotropic(options_.isa, frames_, batch_, kp, begin, end,
                              &outputs_);
    } else {
      kernels::ClassicalBa(options_.isa, frames_, batch_, kp, begin, end,
                           &outputs_);
    }
  });

  using O = kernels::KernelOutputs;
  const std::size_t C = batch_.count;
  LossReport report;
  report.reproj = PairwiseSum(outputs_[O::kReproj], C);
  report.bha = PairwiseSum(outputs_[O::kBha], C);
  double skipped = 0.0;
  for (std::size_t c = 0; c < C; ++c) skipped += outputs_[O::kSkipped][c];
  report.skipped = static_cast<int>(skipped);
  report.total = config_.mode == LossMode::kProba
                     ? report.reproj + config_.lambda * report.bha
                     : report.reproj;
  if (!std::isfinite(report.total)) {
    throw Error(ErrorCode::kNonFiniteLoss, "loss is not finite");
  }
  if (per_correspondence) {
    report.per_correspondence_reproj.assign(outputs_[O::kReproj],
                                            outputs_[O::kReproj] + C);
    report.per_correspondence_bha.assign(outputs_[O::kBha],
                                         outputs_[O::kBha] + C);
  }
  if (grad.empty()) return report;

  std::fill(grad.begin(), grad.end(), 0.0);
  const int F = problem_.num_frames();
  std::vector<Eigen::Vector3d> H(F, Eigen::Vector3d::Zero());
  std::vector<Eigen::Vector3d> W(F, Eigen::Vector3d::Zero());
  std::vector<double> dfocal(F, 0.0);
  const std::size_t rdim = layout_.RadiusDim();
  for (std::size_t c = 0; c < C; ++c) {
    const int i = batch_.frame_i[c];
    const int j = batch_.frame_j[c];
    for (int a = 0; a < 3; ++a) {
      H[i][a] += outputs_[O::kHi + a][c];
      W[i][a] += outputs_[O::kWi + a][c];
      H[j][a] += outputs_[O::kHj + a][c];
      W[j][a] += outputs_[O::kWj + a][c];
    }
    dfocal[i] += outputs_[O::kFocalI][c];
    dfocal[j] += outputs_[O::kFocalJ][c];
    grad[layout_.DepthP(c)] = outputs_[O::kGradLogDepthP][c];
    grad[layout_.DepthQ(c)] = outputs_[O::kGradLogDepthQ][c];
    for (std::size_t k = 0; k < rdim; ++k) {
      grad[layout_.RadiusP(c) + k] = outputs_[O::kGradRadiusP + k][c];
      grad[layout_.RadiusQ(c) + k] = outputs_[O::kGradRadiusQ + k][c];
    }
  }
  for (int k = 0; k < F; ++k) {
    const std::size_t o = layout_.PoseOffset(k);
    const Eigen::Vector3d r(params[o], params[o + 1], params[o + 2]);
    const Eigen::Vector3d gr = RightJacobianSO3(r).transpose() * W[k];
    const Eigen::Vector3d gt = RotationMatrix(r) * H[k];
    for (int a = 0; a < 3; ++a) {
      grad[o + a] = gr[a];
      grad[o + 3 + a] = gt[a];
    }
    Intrinsics K;
    K.fov_deg = params[layout_.FovIndex(k)];
    K.width = problem_.frames()[k].width;
    K.height = problem_.frames()[k].height;
    grad[layout_.FovIndex(k)] += dfocal[k] * K.FocalDerivative();
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw Error(ErrorCode::kNonFiniteGradient, "gradient is not finite");
    }
  }
  return report;
}

LossReport TotalLoss(const SceneProblem& problem, const ParameterBlock& params,
                     const LossConfig& config) {
  ObjectiveOptions options;
  options.workers = 1;
  Objective objective(problem, config, options);
  return objective.Evaluate(params.values, {}, true);
}

std::vector<double> Gradient(const SceneProblem& problem,
                             const ParameterBlock& params,
                             const LossConfig& config) {
  ObjectiveOptions options;
  options.workers = 1;
  Objective objective(problem, config, options);
  std::vector<double> grad(params.values.size());
  objective.Evaluate(params.values, grad);
  return grad;
}

}  // namespace proba

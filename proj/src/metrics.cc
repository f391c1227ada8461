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

#include "proba/metrics.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "proba/error.h"

namespace proba {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

double RotationAngleDeg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const Eigen::Matrix3d M = a.transpose() * b;
  const Eigen::Vector3d axis(M(2, 1) - M(1, 2), M(0, 2) - M(2, 0),
                             M(1, 0) - M(0, 1));
  const double s = 0.5 * axis.norm();
  const double c = 0.5 * (M.trace() - 1.0);
  return std::atan2(s, c) * kRadToDeg;
}

double VectorAngleDeg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b)) * kRadToDeg;
}

std::vector<PairError> RelativePoseErrors(const std::vector<Pose>& est,
                                          const std::vector<Pose>& gt) {
  if (gt.size() < 2 || est.size() != gt.size()) {
    throw Error(ErrorCode::kMissingGroundTruth,
                "need ground-truth poses for every frame (at least 2)");
  }
  std::vector<PairError> errors;
  const int n = static_cast<int>(gt.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Pose e = RelativePose(est[i], est[j]);
      const Pose g = RelativePose(gt[i], gt[j]);
      PairError pe;
      pe.i = i;
      pe.j = j;
      pe.rot_err = RotationAngleDeg(e.Rotation(), g.Rotation());
      if (g.translation.norm() < 1e-9) {
        pe.trans_err = 0.0;
      } else if (e.translation.norm() < 1e-12 * (1.0 + g.translation.norm())) {
        pe.trans_err = 180.0;
      } else {
        pe.trans_err = VectorAngleDeg(e.translation, g.translation);
      }
      errors.push_back(pe);
    }
  }
  return errors;
}

Accuracy AccuracyAt(const std::vector<PairError>& errors, double tau) {
  Accuracy acc;
  if (errors.empty()) return acc;
  int r = 0, t = 0, m = 0;
  for (const PairError& e : errors) {
    r += e.rot_err < tau;
    t += e.trans_err < tau;
    m += std::max(e.rot_err, e.trans_err) < tau;
  }
  const double scale = 100.0 / static_cast<double>(errors.size());
  acc.rra = r * scale;
  acc.rta = t * scale;
  acc.maa = m * scale;
  return acc;
}

double FovError(double est_fov, double gt_fov) { return std::abs(est_fov - gt_fov); }

MetricSummary Summarize(const std::vector<PairError>& errors, double fov_error) {
  MetricSummary s;
  for (std::size_t k = 0; k < kThresholds.size(); ++k) {
    const Accuracy a = AccuracyAt(errors, kThresholds[k]);
    s.rra[k] = a.rra;
    s.rta[k] = a.rta;
    s.maa[k] = a.maa;
  }
  s.fov_error = fov_error;
  return s;
}

MetricSummary EvaluateMetrics(const SceneProblem& problem,
                              const ParameterBlock& params) {
  if (!problem.HasGroundTruth()) {
    throw Error(ErrorCode::kMissingGroundTruth,
                "scene has no ground-truth poses and fov");
  }
  std::vector<Pose> est, gt;
  double fov_err = 0.0;
  int with_fov = 0;
  for (const Frame& f : problem.frames()) {
    est.push_back(params.PoseOf(f.id));
    gt.push_back(*f.gt_pose);
    if (f.gt_fov) {
      fov_err += FovError(params.Fov(f.id), *f.gt_fov);
      ++with_fov;
    }
  }
  if (with_fov > 0) fov_err /= with_fov;
  return Summarize(RelativePoseErrors(est, gt), fov_err);
}

}  // namespace proba

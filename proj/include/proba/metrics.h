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

#include <array>
#include <vector>

#include "proba/geometry.h"
#include "proba/problem.h"

namespace proba {

inline constexpr std::array<double, 3> kThresholds = {5.0, 10.0, 15.0};

struct PairError {
  int i = 0;
  int j = 0;
  double rot_err = 0.0;    // degrees
  double trans_err = 0.0;  // degrees
};

struct Accuracy {
  double rra = 0.0;  // percent
  double rta = 0.0;
  double maa = 0.0;
};

// Accuracies at 5, 10 and 15 degrees, in that order.
struct MetricSummary {
  std::array<double, 3> rra{};
  std::array<double, 3> rta{};
  std::array<double, 3> maa{};
  double fov_error = 0.0;
};

// Errors of every unordered pair i < j, comparing relative poses
// T_j * T_i^-1. Translation errors compare directions only; pairs whose
// ground-truth relative translation is shorter than 1e-9 score 0, and a
// vanishing estimated translation scores 180.
std::vector<PairError> RelativePoseErrors(const std::vector<Pose>& est,
                                          const std::vector<Pose>& gt);

// Angle of R_a^T R_b in degrees, via atan2 so it stays accurate near 0.
double RotationAngleDeg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);
// Angle between two vectors in degrees.
double VectorAngleDeg(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

// Percentages of pairs under tau; mAA uses max(rot_err, trans_err) < tau.
Accuracy AccuracyAt(const std::vector<PairError>& errors, double tau);

double FovError(double est_fov, double gt_fov);

MetricSummary Summarize(const std::vector<PairError>& errors, double fov_error);

// Full summary of a parameter block against the ground truth stored in the
// problem's frames. The fov error is averaged over frames that carry a
// ground-truth fov (0 if none do). Throws MissingGroundTruth.
MetricSummary EvaluateMetrics(const SceneProblem& problem,
                              const ParameterBlock& params);

}  // namespace proba

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

#include <variant>

#include <Eigen/Core>

#include "proba/geometry.h"

namespace proba {

// Gaussian in scene space. Isotropic instances remember their standard
// deviation so that covariance == sigma^2 I holds exactly.
struct Gaussian3 {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();
  bool isotropic = false;
  double sigma = 0.0;

  static Gaussian3 Isotropic(const Eigen::Vector3d& mean, double sigma);
  static Gaussian3 General(const Eigen::Vector3d& mean,
                           const Eigen::Matrix3d& covariance);
};

// Gaussian on the image plane.
struct Gaussian2 {
  Pixel mean;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
};

// Oriented ellipsoid R diag(sigma_k^2) R^T, stored as an axis-angle rotation
// and log standard deviations so any real vector is a valid radius.
struct AnisotropicRadius {
  Eigen::Vector3d rotation = Eigen::Vector3d::Zero();
  Eigen::Vector3d log_sigmas = Eigen::Vector3d::Zero();
};

// Either an isotropic standard deviation or an oriented ellipsoid.
using Radius = std::variant<double, AnisotropicRadius>;

enum class BcNormalization {
  // Mixture covariance (S1 + S2) / 2; BC(g, g) == 1.
  kStandard,
  // Log-det ratio det(S1 + S2) / (2 sqrt(det S1 det S2)) without the mixture; in three
  // dimensions this equals kStandard / 2. Kept for ablations only.
  kPrinted,
};

// Bhattacharyya coefficient of two Gaussians, in (0, 1] for kStandard.
// Throws SingularCovariance for (near) singular inputs.
double BhattacharyyaCoefficient(const Gaussian3& g1, const Gaussian3& g2,
                                BcNormalization norm = BcNormalization::kStandard);

// Natural log of the coefficient above, for callers that need the exponent.
double LogBhattacharyyaCoefficient(const Gaussian3& g1, const Gaussian3& g2,
                                   BcNormalization norm = BcNormalization::kStandard);

Eigen::Matrix3d RealizeCovariance(const AnisotropicRadius& radius);

// Backprojects p at depth d in the camera with world-to-camera pose T and
// carries the result to world coordinates. Isotropic covariances are left
// untouched; anisotropic ones are defined in the camera frame and rotated.
Gaussian3 WorldGaussian(const Intrinsics& K, const Pose& T, const Pixel& p,
                        double depth, const Radius& radius);

}  // namespace proba

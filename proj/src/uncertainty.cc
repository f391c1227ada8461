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

#include "proba/uncertainty.h"

#include <cmath>

#include <Eigen/Dense>

#include "proba/error.h"

namespace proba {
namespace {

constexpr double kMinDeterminant = 1e-300;

void CheckSymmetric(const Eigen::Matrix3d& S) {
  if (!S.allFinite() || (S - S.transpose()).cwiseAbs().maxCoeff() >
                            1e-12 * (1.0 + S.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kSingularCovariance,
                "covariance must be finite and symmetric");
  }
}

}  // namespace

Gaussian3 Gaussian3::Isotropic(const Eigen::Vector3d& mean, double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kNonPositiveRadius, "radius must be positive");
  }
  Gaussian3 g;
  g.mean = mean;
  g.covariance = (sigma * sigma) * Eigen::Matrix3d::Identity();
  g.isotropic = true;
  g.sigma = sigma;
  return g;
}

Gaussian3 Gaussian3::General(const Eigen::Vector3d& mean,
                             const Eigen::Matrix3d& covariance) {
  Gaussian3 g;
  g.mean = mean;
  g.covariance = covariance;
  return g;
}

double LogBhattacharyyaCoefficient(const Gaussian3& g1, const Gaussian3& g2,
                                   BcNormalization norm) {
  CheckSymmetric(g1.covariance);
  CheckSymmetric(g2.covariance);
  const double det1 = g1.covariance.determinant();
  const double det2 = g2.covariance.determinant();
  if (!(det1 > kMinDeterminant) || !(det2 > kMinDeterminant)) {
    throw Error(ErrorCode::kSingularCovariance,
                "covariance determinant is not positive");
  }
  const Eigen::Matrix3d sum = g1.covariance + g2.covariance;
  const Eigen::LLT<Eigen::Matrix3d> llt(sum);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance,
                "sum of covariances is not positive definite");
  }
  const Eigen::Vector3d delta = g1.mean - g2.mean;
  // delta^T (S1 + S2)^-1 delta; the mixture form uses (S1 + S2) / 2 with 1/8.
  const double quad = delta.dot(llt.solve(delta));
  const Eigen::Matrix3d L = llt.matrixL();
  const double log_det_sum = 2.0 * (std::log(L(0, 0)) + std::log(L(1, 1)) +
                                    std::log(L(2, 2)));
  const double log_root = 0.5 * (std::log(det1) + std::log(det2));

  double distance = 0.0;
  switch (norm) {
    case BcNormalization::kStandard:
      distance = 0.25 * quad +
                 0.5 * (log_det_sum - 3.0 * std::log(2.0) - log_root);
      break;
    case BcNormalization::kPrinted:
      distance = 0.25 * quad +
                 0.5 * (log_det_sum - std::log(2.0) - log_root);
      break;
  }
  return -distance;
}

double BhattacharyyaCoefficient(const Gaussian3& g1, const Gaussian3& g2,
                                BcNormalization norm) {
  return std::exp(LogBhattacharyyaCoefficient(g1, g2, norm));
}

Eigen::Matrix3d RealizeCovariance(const AnisotropicRadius& radius) {
  const Eigen::Matrix3d R = RotationMatrix(radius.rotation);
  const Eigen::Vector3d variances = (2.0 * radius.log_sigmas).array().exp();
  return R * variances.asDiagonal() * R.transpose();
}

Gaussian3 WorldGaussian(const Intrinsics& K, const Pose& T, const Pixel& p,
                        double depth, const Radius& radius) {
  const CameraPoint x_cam = Backproject(K, p, depth);
  const Eigen::Matrix3d R = T.Rotation();
  const Eigen::Vector3d mean = R.transpose() * (x_cam - T.translation);
  if (const double* sigma = std::get_if<double>(&radius)) {
    return Gaussian3::Isotropic(mean, *sigma);
  }
  const Eigen::Matrix3d body = RealizeCovariance(std::get<AnisotropicRadius>(radius));
  Eigen::Matrix3d world = R.transpose() * body * R;
  world = 0.5 * (world + world.transpose());
  return Gaussian3::General(mean, world);
}

}  // namespace proba

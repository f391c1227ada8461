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

#include "proba/geometry.h"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "proba/error.h"

namespace proba {
namespace {

constexpr double kSmallAngle = 1e-4;

// sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3 with series near zero.
void RodriguesCoefficients(double theta, double* a, double* b, double* c) {
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    *a = 1.0 - t2 / 6.0;
    *b = 0.5 - t2 / 24.0;
    if (c) *c = 1.0 / 6.0 - t2 / 120.0;
    return;
  }
  const double s = std::sin(theta);
  const double co = std::cos(theta);
  *a = s / theta;
  *b = (1.0 - co) / (theta * theta);
  if (c) *c = (theta - s) / (theta * theta * theta);
}

}  // namespace

Eigen::Matrix3d Skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d RotationMatrix(const Eigen::Vector3d& rotation) {
  double a, b;
  RodriguesCoefficients(rotation.norm(), &a, &b, nullptr);
  const Eigen::Matrix3d K = Skew(rotation);
  return Eigen::Matrix3d::Identity() + a * K + b * K * K;
}

Eigen::Vector3d RotationLog(const Eigen::Matrix3d& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

Eigen::Matrix3d RightJacobianSO3(const Eigen::Vector3d& rotation) {
  double a, b, c;
  RodriguesCoefficients(rotation.norm(), &a, &b, &c);
  const Eigen::Matrix3d K = Skew(rotation);
  return Eigen::Matrix3d::Identity() - b * K + c * K * K;
}

Pose Pose::FromMatrix(const Eigen::Matrix<double, 3, 4>& Rt) {
  Pose pose;
  pose.rotation = RotationLog(Rt.leftCols<3>());
  pose.translation = Rt.col(3);
  return pose;
}

Eigen::Matrix<double, 3, 4> Pose::Matrix() const {
  Eigen::Matrix<double, 3, 4> Rt;
  Rt.leftCols<3>() = Rotation();
  Rt.col(3) = translation;
  return Rt;
}

Eigen::Vector3d Pose::Apply(const Eigen::Vector3d& x) const {
  return Rotation() * x + translation;
}

Pose Pose::Inverse() const {
  Pose inv;
  inv.rotation = -rotation;
  inv.translation = -(RotationMatrix(inv.rotation) * translation);
  return inv;
}

Eigen::Vector3d Pose::Center() const {
  return -(Rotation().transpose() * translation);
}

Pose Compose(const Pose& a, const Pose& b) {
  const Eigen::Matrix3d Ra = a.Rotation();
  Pose out;
  out.rotation = RotationLog(Ra * b.Rotation());
  out.translation = Ra * b.translation + a.translation;
  return out;
}

Pose RelativePose(const Pose& from_i, const Pose& to_j) {
  return Compose(to_j, from_i.Inverse());
}

Intrinsics::Intrinsics(double fov_deg, double width, double height)
    : fov_deg(fov_deg), width(width), height(height) {
  if (!(fov_deg > 1.0 && fov_deg < 179.0)) {
    throw Error(ErrorCode::kOutOfRange,
                "field of view must lie in (1, 179) degrees, got " +
                    std::to_string(fov_deg));
  }
  if (!(width > 0.0 && height > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "image size must be positive");
  }
}

Intrinsics Intrinsics::FromFocal(double focal, double width, double height) {
  const double fov =
      2.0 * std::atan(0.5 * width / focal) * 180.0 / std::numbers::pi;
  return Intrinsics(fov, width, height);
}

double Intrinsics::Focal() const {
  const double half = 0.5 * fov_deg * std::numbers::pi / 180.0;
  return 0.5 * width / std::tan(half);
}

double Intrinsics::FocalDerivative() const {
  const double half = 0.5 * fov_deg * std::numbers::pi / 180.0;
  const double s = std::sin(half);
  return -0.25 * width / (s * s) * std::numbers::pi / 180.0;
}

Eigen::Matrix3d Intrinsics::K() const {
  const double f = Focal();
  Eigen::Matrix3d K;
  K << f, 0.0, Cx(),
       0.0, f, Cy(),
       0.0, 0.0, 1.0;
  return K;
}

void CheckDepth(double z) {
  if (!(z > kDepthFloor)) {
    throw Error(ErrorCode::kNonPositiveDepth,
                "depth " + std::to_string(z) + " is not in front of the camera");
  }
}

Pixel Project(const Intrinsics& K, const CameraPoint& x) {
  CheckDepth(x.z());
  const double f = K.Focal();
  return {f * x.x() / x.z() + K.Cx(), f * x.y() / x.z() + K.Cy()};
}

CameraPoint Backproject(const Intrinsics& K, const Pixel& p, double depth) {
  CheckDepth(depth);
  const double f = K.Focal();
  return {(p.u - K.Cx()) * depth / f, (p.v - K.Cy()) * depth / f, depth};
}

Eigen::Matrix<double, 2, 3> ProjectionJacobian(const Intrinsics& K,
                                               const CameraPoint& x) {
  CheckDepth(x.z());
  const double f = K.Focal();
  const double iz = 1.0 / x.z();
  Eigen::Matrix<double, 2, 3> J;
  J << f * iz, 0.0, -f * x.x() * iz * iz,
       0.0, f * iz, -f * x.y() * iz * iz;
  return J;
}

Eigen::Matrix2d PropagationMatrixA(const CameraPoint& x) {
  CheckDepth(x.z());
  const double a = x.x() / x.z();
  const double b = x.y() / x.z();
  Eigen::Matrix2d A;
  A << 1.0 + a * a, a * b,
       a * b, 1.0 + b * b;
  return A;
}

Eigen::Matrix2d ProjectedCovariance(const Intrinsics& K, const CameraPoint& x,
                                    double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kNonPositiveRadius, "radius must be positive");
  }
  const Eigen::Matrix2d A = PropagationMatrixA(x);
  const double scale = K.Focal() * sigma / x.z();
  return scale * scale * A;
}

Eigen::Matrix2d ProjectedCovariance(const Intrinsics& K, const CameraPoint& x,
                                    const Eigen::Matrix3d& covariance) {
  const Eigen::Matrix<double, 2, 3> J = ProjectionJacobian(K, x);
  return J * covariance * J.transpose();
}

}  // namespace proba

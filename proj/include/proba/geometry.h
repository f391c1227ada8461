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

#include <Eigen/Core>

namespace proba {

// Points closer to the camera plane than this are rejected by projection.
inline constexpr double kDepthFloor = 1e-6;

// Rodrigues map from an axis-angle vector (radians times unit axis).
// Smooth for |r| < pi; ill-conditioned as |r| approaches pi.
Eigen::Matrix3d RotationMatrix(const Eigen::Vector3d& rotation);

// Inverse of RotationMatrix, returning the vector with norm in [0, pi].
Eigen::Vector3d RotationLog(const Eigen::Matrix3d& R);

// Right Jacobian of SO(3): R(r + dr) ~= R(r) * Exp(J_r(r) dr).
Eigen::Matrix3d RightJacobianSO3(const Eigen::Vector3d& rotation);

Eigen::Matrix3d Skew(const Eigen::Vector3d& v);

// World-to-camera rigid transform x_cam = R(rotation) * x_world + translation.
struct Pose {
  Eigen::Vector3d rotation = Eigen::Vector3d::Zero();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose Identity() { return Pose{}; }
  static Pose FromMatrix(const Eigen::Matrix<double, 3, 4>& Rt);

  Eigen::Matrix3d Rotation() const { return RotationMatrix(rotation); }
  Eigen::Matrix<double, 3, 4> Matrix() const;
  Eigen::Vector3d Apply(const Eigen::Vector3d& x) const;
  Pose Inverse() const;
  // Camera center in world coordinates.
  Eigen::Vector3d Center() const;
};

// compose(a, b) applies b first: Compose(a, b).Apply(x) == a.Apply(b.Apply(x)).
Pose Compose(const Pose& a, const Pose& b);

// Pose of camera j relative to camera i, mapping camera-i coordinates into
// camera-j coordinates: T_j * T_i^-1.
Pose RelativePose(const Pose& from_i, const Pose& to_j);

// Pinhole camera with square pixels, zero skew and the principal point at the
// image center. The field of view is horizontal and in degrees.
struct Intrinsics {
  double fov_deg = 60.0;
  double width = 640.0;
  double height = 480.0;

  Intrinsics() = default;
  Intrinsics(double fov_deg, double width, double height);

  static Intrinsics FromFocal(double focal, double width, double height);

  double Focal() const;
  double Cx() const { return 0.5 * width; }
  double Cy() const { return 0.5 * height; }
  Eigen::Matrix3d K() const;
  // d Focal / d fov_deg.
  double FocalDerivative() const;
};

// Throws NonPositiveDepth unless x.z() > kDepthFloor.
void CheckDepth(double z);

struct Pixel {
  double u = 0.0;
  double v = 0.0;

  Eigen::Vector2d vec() const { return {u, v}; }
  bool operator==(const Pixel&) const = default;
};

using CameraPoint = Eigen::Vector3d;

Pixel Project(const Intrinsics& K, const CameraPoint& x);
CameraPoint Backproject(const Intrinsics& K, const Pixel& p, double depth);

// 2x3 Jacobian of Project with respect to the camera point.
Eigen::Matrix<double, 2, 3> ProjectionJacobian(const Intrinsics& K,
                                               const CameraPoint& x);

// A = I + [X/Z, Y/Z]^T [X/Z, Y/Z], so that J J^T = (f/Z)^2 A.
Eigen::Matrix2d PropagationMatrixA(const CameraPoint& x);

// Image covariance of an isotropic 3D Gaussian with standard deviation sigma
// centered at x: (f sigma / Z)^2 A(x).
Eigen::Matrix2d ProjectedCovariance(const Intrinsics& K, const CameraPoint& x,
                                    double sigma);

// General form J C J^T for a camera-frame covariance C.
Eigen::Matrix2d ProjectedCovariance(const Intrinsics& K, const CameraPoint& x,
                                    const Eigen::Matrix3d& covariance);

}  // namespace proba

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
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "proba/error.h"

namespace proba {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector3d RandomRotation(std::mt19937_64& rng, double max_angle = 3.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, max_angle);
  Eigen::Vector3d axis(n(rng), n(rng), n(rng));
  return axis.normalized() * u(rng);
}

Pose RandomPose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Pose p;
  p.rotation = RandomRotation(rng);
  p.translation = {u(rng), u(rng), u(rng)};
  return p;
}

double PoseDistance(const Pose& a, const Pose& b) {
  const double rot = RotationLog(a.Rotation().transpose() * b.Rotation()).norm();
  return rot + (a.translation - b.translation).norm();
}

// f = 100 on a 200 x 200 image.
Intrinsics Square100() { return Intrinsics::FromFocal(100.0, 200.0, 200.0); }

TEST(Rotation, ZeroIsIdentity) {
  EXPECT_EQ(RotationMatrix(Eigen::Vector3d::Zero()), Eigen::Matrix3d::Identity());
}

TEST(Rotation, QuarterTurnAboutZ) {
  Eigen::Matrix3d expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  const Eigen::Matrix3d R = RotationMatrix({0.0, 0.0, kPi / 2});
  EXPECT_LT((R - expected).norm(), 1e-15);
}

TEST(Rotation, OrthonormalAndInverseByNegation) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Vector3d r = RandomRotation(rng);
    const Eigen::Matrix3d R = RotationMatrix(r);
    EXPECT_LT((R.transpose() * R - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
    EXPECT_LT((R * RotationMatrix(-r) - Eigen::Matrix3d::Identity()).norm(), 1e-12);
  }
}

TEST(Rotation, LogInvertsExp) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Vector3d r = RandomRotation(rng);
    EXPECT_LT((RotationLog(RotationMatrix(r)) - r).norm(), 1e-10);
  }
  const Eigen::Vector3d tiny(1e-12, -2e-12, 3e-12);
  EXPECT_LT((RotationLog(RotationMatrix(tiny)) - tiny).norm(), 1e-20);
}

TEST(Rotation, RightJacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector3d r = RandomRotation(rng, 2.5);
    const Eigen::Matrix3d J = RightJacobianSO3(r);
    const Eigen::Matrix3d R = RotationMatrix(r);
    const double h = 1e-6;
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[c] = h;
      const Eigen::Vector3d plus =
          RotationLog(R.transpose() * RotationMatrix(r + e));
      const Eigen::Vector3d minus =
          RotationLog(R.transpose() * RotationMatrix(r - e));
      const Eigen::Vector3d fd = (plus - minus) / (2.0 * h);
      EXPECT_LT((fd - J.col(c)).norm(), 1e-7) << "sample " << k;
    }
  }
  EXPECT_LT((RightJacobianSO3(Eigen::Vector3d::Zero()) -
             Eigen::Matrix3d::Identity()).norm(), 1e-15);
}

TEST(Rotation, SkewIsCrossProduct) {
  const Eigen::Vector3d a(1, -2, 3), b(0.5, 4, -1);
  EXPECT_LT((Skew(a) * b - a.cross(b)).norm(), 1e-15);
}

TEST(Pose, IdentityApply) {
  const Eigen::Vector3d x(0.3, -1.0, 2.5);
  EXPECT_EQ(Pose::Identity().Apply(x), x);
}

TEST(Pose, GroupAxioms) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const Pose a = RandomPose(rng), b = RandomPose(rng), c = RandomPose(rng);
    const Eigen::Vector3d x(u(rng), u(rng), u(rng));
    EXPECT_LT((Compose(a, b).Apply(x) - a.Apply(b.Apply(x))).norm(), 1e-12);
    EXPECT_LT(PoseDistance(Compose(a.Inverse(), a), Pose::Identity()), 1e-12);
    EXPECT_LT(PoseDistance(Compose(a, a.Inverse()), Pose::Identity()), 1e-12);
    EXPECT_LT(PoseDistance(a.Inverse().Inverse(), a), 1e-12);
    EXPECT_LT(PoseDistance(Compose(Compose(a, b), c), Compose(a, Compose(b, c))),
              1e-11);
  }
}

TEST(Pose, RelativePoseMapsCameraIToCameraJ) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const Pose ti = RandomPose(rng), tj = RandomPose(rng);
    const Eigen::Vector3d x(0.1 * k, -0.5, 1.0);
    const Pose tij = RelativePose(ti, tj);
    EXPECT_LT((tij.Apply(ti.Apply(x)) - tj.Apply(x)).norm(), 1e-12);
  }
}

TEST(Pose, MatrixRoundTripAndCenter) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 100; ++k) {
    const Pose a = RandomPose(rng);
    EXPECT_LT(PoseDistance(Pose::FromMatrix(a.Matrix()), a), 1e-10);
    EXPECT_LT(a.Apply(a.Center()).norm(), 1e-12);
  }
}

TEST(Intrinsics, FocalFromFov) {
  const Intrinsics K(90.0, 640.0, 480.0);
  EXPECT_NEAR(K.Focal(), 320.0, 1e-12);
  EXPECT_EQ(K.Cx(), 320.0);
  EXPECT_EQ(K.Cy(), 240.0);
  const Eigen::Matrix3d M = K.K();
  EXPECT_EQ(M(0, 1), 0.0);
  EXPECT_NEAR(M(0, 0), M(1, 1), 0.0);
  EXPECT_EQ(M(2, 2), 1.0);
  EXPECT_NEAR(Square100().Focal(), 100.0, 1e-12);
}

TEST(Intrinsics, FocalDerivativeMatchesFiniteDifferences) {
  for (double fov : {20.0, 45.0, 60.0, 100.0, 150.0}) {
    const double h = 1e-5;
    const double fd = (Intrinsics(fov + h, 640, 480).Focal() -
                       Intrinsics(fov - h, 640, 480).Focal()) / (2 * h);
    const double an = Intrinsics(fov, 640, 480).FocalDerivative();
    EXPECT_NEAR(fd, an, 1e-6 * std::abs(an));
  }
}

TEST(Intrinsics, RejectsOutOfRangeFov) {
  EXPECT_THROW(Intrinsics(1.0, 640, 480), Error);
  EXPECT_THROW(Intrinsics(179.0, 640, 480), Error);
  EXPECT_THROW(Intrinsics(60.0, 0, 480), Error);
}

TEST(Projection, Examples) {
  const Intrinsics K = Square100();
  const Pixel a = Project(K, {0, 0, 2});
  EXPECT_NEAR(a.u, 100.0, 1e-12);
  EXPECT_NEAR(a.v, 100.0, 1e-12);
  const Pixel b = Project(K, {1, 0, 2});
  EXPECT_NEAR(b.u, 150.0, 1e-12);
  EXPECT_NEAR(b.v, 100.0, 1e-12);
  try {
    Project(K, {0, 0, -1});
    FAIL() << "expected NonPositiveDepth";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveDepth);
  }
  EXPECT_THROW(Project(K, {0, 0, 1e-7}), Error);
}

TEST(Backprojection, Examples) {
  const Intrinsics K = Square100();
  EXPECT_LT((Backproject(K, {100, 100}, 3) - Eigen::Vector3d(0, 0, 3)).norm(),
            1e-12);
  EXPECT_LT((Backproject(K, {150, 100}, 2) - Eigen::Vector3d(1, 0, 2)).norm(),
            1e-12);
  EXPECT_THROW(Backproject(K, {1, 1}, 0.0), Error);
}

TEST(Backprojection, RoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> fov(20, 120), px(-200, 900),
      depth(1e-3, 100);
  for (int k = 0; k < 1000; ++k) {
    const Intrinsics K(fov(rng), 640, 480);
    const Pixel p{px(rng), px(rng)};
    const Pixel back = Project(K, Backproject(K, p, depth(rng)));
    EXPECT_NEAR(back.u, p.u, 1e-12 * (1 + std::abs(p.u)));
    EXPECT_NEAR(back.v, p.v, 1e-12 * (1 + std::abs(p.v)));
  }
}

TEST(Projection, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1), z(0.5, 4);
  const Intrinsics K(55, 640, 480);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector3d x(u(rng), u(rng), z(rng));
    const Eigen::Matrix<double, 2, 3> J = ProjectionJacobian(K, x);
    for (int c = 0; c < 3; ++c) {
      const double h = 1e-6;
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[c] = h;
      const Eigen::Vector2d fd =
          (Project(K, x + e).vec() - Project(K, x - e).vec()) / (2 * h);
      EXPECT_LT((fd - J.col(c)).norm(), 1e-6 * (1 + J.col(c).norm()));
    }
  }
}

TEST(PropagationMatrix, Examples) {
  EXPECT_EQ(PropagationMatrixA({0, 0, 2}), Eigen::Matrix2d::Identity());
  Eigen::Matrix2d expected;
  expected << 2, 0, 0, 1;
  EXPECT_LT((PropagationMatrixA({2, 0, 2}) - expected).norm(), 1e-15);
  EXPECT_THROW(PropagationMatrixA({0, 0, 0}), Error);
}

TEST(PropagationMatrix, DeterminantIdentity) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2), z(0.2, 5);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Vector3d x(u(rng), u(rng), z(rng));
    const Eigen::Matrix2d A = PropagationMatrixA(x);
    const double expected =
        1.0 + (x.x() * x.x() + x.y() * x.y()) / (x.z() * x.z());
    EXPECT_NEAR(A.determinant(), expected, 1e-12 * expected);
    EXPECT_EQ(A(0, 1), A(1, 0));
  }
}

TEST(ProjectedCovariance, OnAxisExample) {
  const Eigen::Matrix2d S = ProjectedCovariance(Square100(), {0, 0, 2}, 0.1);
  EXPECT_LT((S - 25.0 * Eigen::Matrix2d::Identity()).norm(), 1e-12);
  const Eigen::Matrix2d far = ProjectedCovariance(Square100(), {0, 0, 4}, 0.1);
  EXPECT_LT((far - 0.25 * S).norm(), 1e-12);
}

TEST(ProjectedCovariance, RejectsBadInputs) {
  try {
    ProjectedCovariance(Square100(), {0, 0, 2}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveRadius);
  }
  EXPECT_THROW(ProjectedCovariance(Square100(), {0, 0, -2}, 0.1), Error);
}

TEST(ProjectedCovariance, MatchesFiniteDifferenceJacobian) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.5, 1.5), z(0.3, 5), s(0.01, 1),
      fov(30, 100);
  for (int k = 0; k < 1000; ++k) {
    const Intrinsics K(fov(rng), 640, 480);
    const Eigen::Vector3d x(u(rng), u(rng), z(rng));
    const double sigma = s(rng);
    const double h = 1e-5 * std::max(1.0, x.norm());
    Eigen::Matrix<double, 2, 3> J;
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[c] = h;
      J.col(c) = (Project(K, x + e).vec() - Project(K, x - e).vec()) / (2 * h);
    }
    const Eigen::Matrix2d fd = sigma * sigma * J * J.transpose();
    const Eigen::Matrix2d an = ProjectedCovariance(K, x, sigma);
    EXPECT_LT((fd - an).norm() / an.norm(), 1e-6);
    // Isotropic covariance overload agrees with the scalar one.
    const Eigen::Matrix2d general =
        ProjectedCovariance(K, x, sigma * sigma * Eigen::Matrix3d::Identity());
    EXPECT_LT((general - an).norm() / an.norm(), 1e-12);
  }
}

}  // namespace
}  // namespace proba

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

#include "proba/synthgen.h"

#include <cmath>
#include <set>

#include <Eigen/Dense>

#include <gtest/gtest.h>

#include "proba/error.h"
#include "proba/losses.h"
#include "proba/metrics.h"

namespace proba {
namespace {

SynthConfig Noiseless(Rig rig = Rig::kOrbit) {
  SynthConfig c;
  c.pixel_noise_std = 0.0;
  c.outlier_rate = 0.0;
  c.rig = rig;
  c.seed = 3;
  return c;
}

class NoiselessTest : public ::testing::TestWithParam<Rig> {};

TEST_P(NoiselessTest, ClassicalLossVanishesAtTruth) {
  const SyntheticScene scene = Generate(Noiseless(GetParam()));
  const ParameterBlock gt = GroundTruthBlock(scene);
  LossConfig config;
  config.mode = LossMode::kClassicalBa;
  const double loss = ClassicalBaLoss(scene.problem, gt, config);
  // Zero up to rounding in the projection chain.
  EXPECT_LT(loss, 1e-18 * scene.problem.num_correspondences());
}

TEST_P(NoiselessTest, ProbaOracleStructure) {
  const SyntheticScene scene = Generate(Noiseless(GetParam()));
  const ParameterBlock gt = GroundTruthBlock(scene, 0.1);
  LossConfig config;
  const int C = scene.problem.num_correspondences();
  // Equal radii and coincident means: BC = 1 for every correspondence.
  EXPECT_NEAR(BhaLoss(scene.problem, gt, config), -C, 1e-9 * C);
  const LossReport report = ReprojNll(scene.problem, gt, config);
  // Only the log-determinant part remains.
  double logdet = 0.0;
  for (int c = 0; c < C; ++c) {
    const Correspondence& m = scene.problem.correspondences()[c];
    for (int dir = 0; dir < 2; ++dir) {
      const int target = dir == 0 ? m.frame_j : m.frame_i;
      const double depth = dir == 0 ? scene.gt.depth_q[c] : scene.gt.depth_p[c];
      const Pixel& obs = dir == 0 ? m.q : m.p;
      const Intrinsics K = scene.problem.IntrinsicsOf(gt, target);
      const CameraPoint x = Backproject(K, obs, depth);
      logdet += 0.5 * std::log(ProjectedCovariance(K, x, 0.1).determinant());
    }
  }
  EXPECT_NEAR(report.reproj, logdet, 1e-8 * std::abs(logdet));
}

TEST_P(NoiselessTest, MetricsPerfectAtTruth) {
  const SyntheticScene scene = Generate(Noiseless(GetParam()));
  const MetricSummary m = EvaluateMetrics(scene.problem, GroundTruthBlock(scene));
  EXPECT_EQ(m.maa[0], 100.0);
  EXPECT_EQ(m.fov_error, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Rigs, NoiselessTest,
                         ::testing::Values(Rig::kOrbit, Rig::kForwardWalk));

TEST(Generate, DeterministicPerSeed) {
  SynthConfig c;
  c.seed = 11;
  const SyntheticScene a = Generate(c), b = Generate(c);
  EXPECT_EQ(a.problem.correspondences(), b.problem.correspondences());
  c.seed = 12;
  EXPECT_NE(a.problem.correspondences(), Generate(c).problem.correspondences());
}

TEST(Generate, SceneShape) {
  SynthConfig c;
  c.seed = 5;
  const SyntheticScene s = Generate(c);
  EXPECT_EQ(s.problem.num_frames(), 5);
  EXPECT_EQ(static_cast<int>(s.gt.points.size()), 200);
  const int C = s.problem.num_correspondences();
  EXPECT_EQ(static_cast<int>(s.gt.point_index.size()), C);
  std::set<int> seen(s.gt.point_index.begin(), s.gt.point_index.end());
  EXPECT_EQ(seen.size(), 200u);  // every point is co-visible somewhere
  for (const Frame& f : s.problem.frames()) {
    ASSERT_TRUE(f.gt_pose.has_value());
    ASSERT_TRUE(f.gt_fov.has_value());
    EXPECT_EQ(*f.gt_fov, 60.0);
  }
  for (int k = 0; k < C; ++k) {
    EXPECT_GT(s.gt.depth_p[k], 0.1);
    EXPECT_GT(s.gt.depth_q[k], 0.1);
  }
}

TEST(Generate, OutlierCountIsExact) {
  for (double rate : {0.0, 0.05, 0.1, 0.37}) {
    SynthConfig c;
    c.outlier_rate = rate;
    c.seed = 2;
    const SyntheticScene s = Generate(c);
    const int C = s.problem.num_correspondences();
    long count = 0;
    for (bool o : s.gt.outlier) count += o;
    EXPECT_EQ(count, std::llround(rate * C));
  }
}

TEST(Generate, OutliersStayWithinRadius) {
  SynthConfig c = Noiseless();
  c.outlier_rate = 0.2;
  const SyntheticScene s = Generate(c);
  const SyntheticScene clean = Generate(Noiseless());
  for (int k = 0; k < s.problem.num_correspondences(); ++k) {
    const Correspondence& a = s.problem.correspondences()[k];
    const Correspondence& b = clean.problem.correspondences()[k];
    EXPECT_EQ(a.p, b.p);
    const double shift = (a.q.vec() - b.q.vec()).norm();
    if (s.gt.outlier[k]) {
      EXPECT_LE(shift, c.outlier_radius);
    } else {
      EXPECT_EQ(shift, 0.0);
    }
  }
}

TEST(Generate, ValidatesConfig) {
  SynthConfig c;
  c.n_frames = 1;
  EXPECT_THROW(Generate(c), Error);
  c = {};
  c.n_points = 7;
  EXPECT_THROW(Generate(c), Error);
  c = {};
  c.outlier_rate = 1.0;
  EXPECT_THROW(Generate(c), Error);
  c = {};
  c.pixel_noise_std = -1;
  EXPECT_THROW(Generate(c), Error);
  EXPECT_THROW(ParseRig("spiral"), Error);
  EXPECT_EQ(ParseRig(RigName(Rig::kForwardWalk)), Rig::kForwardWalk);
}

TEST(Generate, DegenerateSceneIsReported) {
  SynthConfig c;
  c.n_frames = 3;
  c.n_points = 8;
  c.baseline = 90.0;
  c.fov_gt = 1.5;
  try {
    Generate(c);
    FAIL() << "expected DegenerateScene";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateScene);
  }
}

TEST(LookAt, PointsOpticalAxisAtTarget) {
  const Eigen::Vector3d center(1, 2, -3), target(0.2, -0.1, 0.5);
  const Pose pose = LookAt(center, target);
  EXPECT_LT((pose.Center() - center).norm(), 1e-12);
  const Eigen::Vector3d x = pose.Apply(target);
  EXPECT_NEAR(x.x(), 0.0, 1e-12);
  EXPECT_NEAR(x.y(), 0.0, 1e-12);
  EXPECT_GT(x.z(), 0.0);
}

TEST(PerturbGt, ZeroNoiseIsIdentity) {
  SynthConfig c;
  const ParameterBlock gt = GroundTruthBlock(Generate(c));
  EXPECT_EQ(PerturbGt(gt, 0.0, 0.0, 4).values, gt.values);
}

TEST(PerturbGt, BoundedAndDeterministic) {
  SynthConfig c;
  const SyntheticScene scene = Generate(c);
  const ParameterBlock gt = GroundTruthBlock(scene);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ParameterBlock p = PerturbGt(gt, 5.0, 0.1, seed);
    EXPECT_EQ(p.values, PerturbGt(gt, 5.0, 0.1, seed).values);
    std::vector<Pose> est, truth;
    for (int k = 0; k < scene.problem.num_frames(); ++k) {
      est.push_back(p.PoseOf(k));
      truth.push_back(gt.PoseOf(k));
      EXPECT_LE(RotationAngleDeg(est.back().Rotation(), truth.back().Rotation()),
                5.0 + 1e-9);
    }
    for (const PairError& e : RelativePoseErrors(est, truth)) {
      EXPECT_LE(e.rot_err, 10.0 + 1e-9);
    }
    for (int k = 0; k < scene.problem.num_correspondences(); ++k) {
      EXPECT_LE(std::abs(p.DepthP(k) / gt.DepthP(k) - 1.0), 0.1 + 1e-12);
    }
  }
}

}  // namespace
}  // namespace proba

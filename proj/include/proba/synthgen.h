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

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "proba/geometry.h"
#include "proba/problem.h"

namespace proba {

enum class Rig { kOrbit, kForwardWalk };

const char* RigName(Rig rig);
Rig ParseRig(const std::string& name);

struct SynthConfig {
  int n_frames = 5;
  int n_points = 200;
  double fov_gt = 60.0;
  double width = 640.0;
  double height = 480.0;
  Rig rig = Rig::kOrbit;
  // Orbit: degrees between neighboring cameras. Forward walk: the step along
  // the viewing axis is baseline / 100 scene units per frame.
  double baseline = 15.0;
  // Distance of the (first) camera from the scene center.
  double camera_distance = 2.0;
  double pixel_noise_std = 1.0;
  double outlier_rate = 0.05;
  double outlier_radius = 50.0;
  std::uint64_t seed = 0;

  // Throws OutOfRange.
  void Validate() const;
};

struct GroundTruth {
  std::vector<Pose> poses;
  double fov = 0.0;
  std::vector<Eigen::Vector3d> points;
  // Per correspondence.
  std::vector<int> point_index;
  std::vector<double> depth_p;
  std::vector<double> depth_q;
  std::vector<bool> outlier;
};

struct SyntheticScene {
  SceneProblem problem;
  GroundTruth gt;
};

// Points uniform in the unit box around the origin, cameras on the rig
// looking at the origin, every co-visible pair of observations matched.
// Throws DegenerateScene when a frame keeps fewer than 8 correspondences.
SyntheticScene Generate(const SynthConfig& config,
                        ParameterOptions options = {});

// Ground-truth parameters with constant isotropic radius `sigma` (or an
// axis-aligned ellipsoid of that size for anisotropic layouts).
ParameterBlock GroundTruthBlock(const SyntheticScene& scene, double sigma = 0.1);

// Rotates each pose by a random axis and an angle uniform in
// [0, pose_noise_deg], shifts each camera center by a uniform direction of
// length up to pose_noise_deg / 180 scene units, and scales every depth by
// (1 + u), u uniform in [-depth_noise_rel, depth_noise_rel].
ParameterBlock PerturbGt(const ParameterBlock& gt, double pose_noise_deg,
                         double depth_noise_rel, std::uint64_t seed);

// World-to-camera pose of a camera at `center` looking at `target`, with the
// camera y axis pointing along world +y as far as possible.
Pose LookAt(const Eigen::Vector3d& center, const Eigen::Vector3d& target);

}  // namespace proba

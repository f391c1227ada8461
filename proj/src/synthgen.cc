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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "proba/error.h"

namespace proba {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kMinVisibleDepth = 0.1;
constexpr int kMinCorrespondencesPerFrame = 8;

std::vector<Pose> MakeRig(const SynthConfig& config) {
  std::vector<Pose> poses;
  const int n = config.n_frames;
  for (int k = 0; k < n; ++k) {
    Eigen::Vector3d center;
    if (config.rig == Rig::kOrbit) {
      const double theta = (k - 0.5 * (n - 1)) * config.baseline * kDegToRad;
      center = config.camera_distance *
               Eigen::Vector3d(std::sin(theta), 0.0, -std::cos(theta));
      poses.push_back(LookAt(center, Eigen::Vector3d::Zero()));
    } else {
      // Slight lateral sway keeps the walk from being a pure forward motion.
      const double step = config.baseline / 100.0;
      center = Eigen::Vector3d(0.05 * std::sin(1.3 * k), 0.0,
                               -config.camera_distance + k * step);
      poses.push_back(LookAt(center, center + Eigen::Vector3d(0, 0, 1)));
    }
  }
  return poses;
}

struct Observation {
  bool visible = false;
  double depth = 0.0;
  Pixel clean;
  Pixel noisy;
};

}  // namespace

const char* RigName(Rig rig) {
  return rig == Rig::kOrbit ? "orbit" : "forward_walk";
}

Rig ParseRig(const std::string& name) {
  if (name == "orbit") return Rig::kOrbit;
  if (name == "forward_walk" || name == "forward") return Rig::kForwardWalk;
  throw Error(ErrorCode::kInvalidInput, "unknown rig '" + name + "'");
}

void SynthConfig::Validate() const {
  if (n_frames < 2) throw Error(ErrorCode::kOutOfRange, "n_frames must be >= 2");
  if (n_points < 8) throw Error(ErrorCode::kOutOfRange, "n_points must be >= 8");
  if (!(fov_gt > 1.0 && fov_gt < 179.0)) {
    throw Error(ErrorCode::kOutOfRange, "fov_gt must lie in (1, 179)");
  }
  if (!(width > 0.0) || !(height > 0.0)) {
    throw Error(ErrorCode::kOutOfRange, "image size must be positive");
  }
  if (!(pixel_noise_std >= 0.0) || !(outlier_radius >= 0.0)) {
    throw Error(ErrorCode::kOutOfRange, "noise levels must be non-negative");
  }
  if (!(outlier_rate >= 0.0 && outlier_rate < 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "outlier_rate must lie in [0, 1)");
  }
  if (!(camera_distance > 0.0)) {
    throw Error(ErrorCode::kOutOfRange, "camera_distance must be positive");
  }
}

Pose LookAt(const Eigen::Vector3d& center, const Eigen::Vector3d& target) {
  const Eigen::Vector3d z = (target - center).normalized();
  Eigen::Vector3d up(0.0, 1.0, 0.0);
  if (std::abs(z.dot(up)) > 0.999) up = Eigen::Vector3d(0.0, 0.0, 1.0);
  const Eigen::Vector3d x = up.cross(z).normalized();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d R;
  R.row(0) = x;
  R.row(1) = y;
  R.row(2) = z;
  Pose pose;
  pose.rotation = RotationLog(R);
  pose.translation = -(pose.Rotation() * center);
  return pose;
}

SyntheticScene Generate(const SynthConfig& config, ParameterOptions options) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> box(-0.5, 0.5);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::vector<Pose> poses = MakeRig(config);
  const Intrinsics K(config.fov_gt, config.width, config.height);
  const int F = config.n_frames;

  // Draw points until enough are seen by at least two cameras.
  std::vector<Eigen::Vector3d> points;
  std::vector<std::vector<Observation>> obs;
  const int max_draws = 1000 * config.n_points;
  for (int draw = 0; draw < max_draws &&
                     static_cast<int>(points.size()) < config.n_points;
       ++draw) {
    const Eigen::Vector3d X(box(rng), box(rng), box(rng));
    std::vector<Observation> row(F);
    int seen = 0;
    for (int k = 0; k < F; ++k) {
      const Eigen::Vector3d x = poses[k].Apply(X);
      if (x.z() <= kMinVisibleDepth) continue;
      const Pixel p = Project(K, x);
      if (p.u < 0.0 || p.u >= config.width || p.v < 0.0 ||
          p.v >= config.height) {
        continue;
      }
      row[k].visible = true;
      row[k].depth = x.z();
      row[k].clean = p;
      ++seen;
    }
    if (seen < 2) continue;
    for (int k = 0; k < F; ++k) {
      if (!row[k].visible) continue;
      const double du = config.pixel_noise_std * noise(rng);
      const double dv = config.pixel_noise_std * noise(rng);
      row[k].noisy = Pixel{row[k].clean.u + du, row[k].clean.v + dv};
    }
    points.push_back(X);
    obs.push_back(std::move(row));
  }

  GroundTruth gt;
  gt.poses = poses;
  gt.fov = config.fov_gt;
  gt.points = points;
  std::vector<Correspondence> corr;
  for (std::size_t n = 0; n < points.size(); ++n) {
    for (int a = 0; a < F; ++a) {
      if (!obs[n][a].visible) continue;
      for (int b = a + 1; b < F; ++b) {
        if (!obs[n][b].visible) continue;
        Correspondence c;
        c.frame_i = a;
        c.frame_j = b;
        c.p = obs[n][a].noisy;
        c.q = obs[n][b].noisy;
        corr.push_back(c);
        gt.point_index.push_back(static_cast<int>(n));
        gt.depth_p.push_back(obs[n][a].depth);
        gt.depth_q.push_back(obs[n][b].depth);
      }
    }
  }

  const std::size_t C = corr.size();
  gt.outlier.assign(C, false);
  const std::size_t n_out =
      static_cast<std::size_t>(std::llround(config.outlier_rate * C));
  std::vector<std::size_t> order(C);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t k = 0; k < n_out; ++k) {
    const std::size_t c = order[k];
    const double r = config.outlier_radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    corr[c].q.u += r * std::cos(phi);
    corr[c].q.v += r * std::sin(phi);
    gt.outlier[c] = true;
  }

  std::vector<int> per_frame(F, 0);
  for (const Correspondence& c : corr) {
    ++per_frame[c.frame_i];
    ++per_frame[c.frame_j];
  }
  for (int k = 0; k < F; ++k) {
    if (per_frame[k] < kMinCorrespondencesPerFrame) {
      throw Error(ErrorCode::kDegenerateScene,
                  "frame " + std::to_string(k) + " has only " +
                      std::to_string(per_frame[k]) + " correspondences");
    }
  }

  std::vector<Frame> frames(F);
  for (int k = 0; k < F; ++k) {
    frames[k].id = k;
    frames[k].width = config.width;
    frames[k].height = config.height;
    frames[k].gt_pose = poses[k];
    frames[k].gt_fov = config.fov_gt;
  }
  return SyntheticScene{SceneProblem(std::move(frames), std::move(corr), options),
                        std::move(gt)};
}

ParameterBlock GroundTruthBlock(const SyntheticScene& scene, double sigma) {
  const SceneProblem& problem = scene.problem;
  ParameterBlock block;
  block.layout = problem.Layout();
  Parameters p;
  p.poses = scene.gt.poses;
  p.fov_deg.assign(block.layout.NumFov(), scene.gt.fov);
  for (double d : scene.gt.depth_p) p.log_depths.push_back(std::log(d));
  for (double d : scene.gt.depth_q) p.log_depths.push_back(std::log(d));
  const std::size_t endpoints = 2 * problem.correspondences().size();
  for (std::size_t e = 0; e < endpoints; ++e) {
    if (block.layout.options().anisotropic) {
      p.radii.insert(p.radii.end(), {0.0, 0.0, 0.0});
      p.radii.insert(p.radii.end(), 3, std::log(sigma));
    } else {
      p.radii.push_back(std::log(sigma));
    }
  }
  block.values = Pack(block.layout, p);
  return block;
}

ParameterBlock PerturbGt(const ParameterBlock& gt, double pose_noise_deg,
                         double depth_noise_rel, std::uint64_t seed) {
  ParameterBlock out = gt;
  if (pose_noise_deg == 0.0 && depth_noise_rel == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_direction = [&]() {
    Eigen::Vector3d v;
    do {
      v = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
    } while (v.norm() < 1e-12);
    return v.normalized();
  };
  for (int k = 0; k < gt.layout.num_frames(); ++k) {
    const Pose pose = gt.PoseOf(k);
    const Eigen::Vector3d center = pose.Center();
    const double angle = pose_noise_deg * unit(rng) * kDegToRad;
    const Eigen::Matrix3d R =
        RotationMatrix(angle * random_direction()) * pose.Rotation();
    const Eigen::Vector3d shift =
        (pose_noise_deg / 180.0) * unit(rng) * random_direction();
    Pose noisy;
    noisy.rotation = RotationLog(R);
    noisy.translation = -(noisy.Rotation() * (center + shift));
    out.SetPose(k, noisy);
  }
  const std::size_t begin = gt.layout.DepthOffset();
  const std::size_t end = gt.layout.RadiusOffset();
  for (std::size_t k = begin; k < end; ++k) {
    const double u = depth_noise_rel * (2.0 * unit(rng) - 1.0);
    out.values[k] += std::log1p(u);
  }
  return out;
}

}  // namespace proba

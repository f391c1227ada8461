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

#include "proba/problem.h"

#include <cmath>
#include <random>
#include <string>

#include "proba/error.h"

namespace proba {

bool Frame::operator==(const Frame& other) const {
  if (id != other.id || width != other.width || height != other.height ||
      gt_fov != other.gt_fov || gt_pose.has_value() != other.gt_pose.has_value()) {
    return false;
  }
  return !gt_pose || (gt_pose->rotation == other.gt_pose->rotation &&
                      gt_pose->translation == other.gt_pose->translation);
}

const char* ParamGroupName(ParamGroup group) {
  switch (group) {
    case ParamGroup::kPose: return "pose";
    case ParamGroup::kFov: return "fov";
    case ParamGroup::kDepth: return "depth";
    case ParamGroup::kRadius: return "radius";
  }
  return "unknown";
}

ParameterLayout::ParameterLayout(int num_frames, int num_correspondences,
                                 ParameterOptions options)
    : num_frames_(num_frames),
      num_correspondences_(num_correspondences),
      options_(options) {
  if (num_frames < 1 || num_correspondences < 0) {
    throw Error(ErrorCode::kInvalidInput, "invalid parameter layout size");
  }
}

std::pair<std::size_t, std::size_t> ParameterLayout::GroupRange(
    ParamGroup group) const {
  switch (group) {
    case ParamGroup::kPose: return {0, FovOffset()};
    case ParamGroup::kFov: return {FovOffset(), DepthOffset()};
    case ParamGroup::kDepth: return {DepthOffset(), RadiusOffset()};
    case ParamGroup::kRadius: return {RadiusOffset(), Size()};
  }
  return {0, 0};
}

ParamGroup ParameterLayout::GroupOf(std::size_t index) const {
  if (index < FovOffset()) return ParamGroup::kPose;
  if (index < DepthOffset()) return ParamGroup::kFov;
  if (index < RadiusOffset()) return ParamGroup::kDepth;
  if (index < Size()) return ParamGroup::kRadius;
  throw Error(ErrorCode::kOutOfRange, "parameter index out of range");
}

std::vector<ParamGroup> ParameterLayout::GroupTags() const {
  std::vector<ParamGroup> tags(Size());
  for (ParamGroup g : {ParamGroup::kPose, ParamGroup::kFov, ParamGroup::kDepth,
                       ParamGroup::kRadius}) {
    const auto [first, last] = GroupRange(g);
    for (std::size_t i = first; i < last; ++i) tags[i] = g;
  }
  return tags;
}

std::vector<double> Pack(const ParameterLayout& layout, const Parameters& params) {
  const std::size_t C = layout.num_correspondences();
  if (params.poses.size() != std::size_t(layout.num_frames()) ||
      params.fov_deg.size() != layout.NumFov() ||
      params.log_depths.size() != 2 * C ||
      params.radii.size() != 2 * C * layout.RadiusDim()) {
    throw Error(ErrorCode::kLengthMismatch,
                "parameters do not match the layout");
  }
  std::vector<double> flat;
  flat.reserve(layout.Size());
  for (const Pose& pose : params.poses) {
    flat.insert(flat.end(), pose.rotation.data(), pose.rotation.data() + 3);
    flat.insert(flat.end(), pose.translation.data(), pose.translation.data() + 3);
  }
  flat.insert(flat.end(), params.fov_deg.begin(), params.fov_deg.end());
  flat.insert(flat.end(), params.log_depths.begin(), params.log_depths.end());
  flat.insert(flat.end(), params.radii.begin(), params.radii.end());
  return flat;
}

Parameters Unpack(const ParameterLayout& layout, std::span<const double> flat) {
  if (flat.size() != layout.Size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "expected " + std::to_string(layout.Size()) +
                    " parameters, got " + std::to_string(flat.size()));
  }
  Parameters params;
  params.poses.resize(layout.num_frames());
  for (int k = 0; k < layout.num_frames(); ++k) {
    const double* p = flat.data() + layout.PoseOffset(k);
    params.poses[k].rotation = Eigen::Vector3d(p[0], p[1], p[2]);
    params.poses[k].translation = Eigen::Vector3d(p[3], p[4], p[5]);
  }
  auto slice = [&](ParamGroup g) {
    const auto [first, last] = layout.GroupRange(g);
    return std::vector<double>(flat.begin() + first, flat.begin() + last);
  };
  params.fov_deg = slice(ParamGroup::kFov);
  params.log_depths = slice(ParamGroup::kDepth);
  params.radii = slice(ParamGroup::kRadius);
  return params;
}

Pose ParameterBlock::PoseOf(int frame) const {
  const double* p = values.data() + layout.PoseOffset(frame);
  Pose pose;
  pose.rotation = Eigen::Vector3d(p[0], p[1], p[2]);
  pose.translation = Eigen::Vector3d(p[3], p[4], p[5]);
  return pose;
}

void ParameterBlock::SetPose(int frame, const Pose& pose) {
  double* p = values.data() + layout.PoseOffset(frame);
  for (int k = 0; k < 3; ++k) {
    p[k] = pose.rotation[k];
    p[3 + k] = pose.translation[k];
  }
}

double ParameterBlock::DepthP(int c) const {
  return std::exp(values[layout.DepthP(c)]);
}

double ParameterBlock::DepthQ(int c) const {
  return std::exp(values[layout.DepthQ(c)]);
}

double ParameterBlock::SigmaP(int c) const {
  return std::exp(values[layout.RadiusP(c)]);
}

double ParameterBlock::SigmaQ(int c) const {
  return std::exp(values[layout.RadiusQ(c)]);
}

namespace {

Radius RadiusAt(const ParameterBlock& block, std::size_t offset) {
  const double* r = block.values.data() + offset;
  if (!block.layout.options().anisotropic) return std::exp(r[0]);
  AnisotropicRadius a;
  a.rotation = Eigen::Vector3d(r[0], r[1], r[2]);
  a.log_sigmas = Eigen::Vector3d(r[3], r[4], r[5]);
  return a;
}

}  // namespace

Radius ParameterBlock::RadiusP(int c) const {
  return RadiusAt(*this, layout.RadiusP(c));
}

Radius ParameterBlock::RadiusQ(int c) const {
  return RadiusAt(*this, layout.RadiusQ(c));
}

SceneProblem::SceneProblem(std::vector<Frame> frames,
                           std::vector<Correspondence> correspondences,
                           ParameterOptions options)
    : frames_(std::move(frames)),
      correspondences_(std::move(correspondences)),
      options_(options) {
  if (frames_.empty()) {
    throw Error(ErrorCode::kInvalidInput, "scene has no frames");
  }
  for (std::size_t k = 0; k < frames_.size(); ++k) {
    if (frames_[k].id != static_cast<int>(k)) {
      throw Error(ErrorCode::kInvalidInput,
                  "frame ids must be dense 0..F-1; frame " + std::to_string(k) +
                      " has id " + std::to_string(frames_[k].id));
    }
    if (!(frames_[k].width > 0.0 && frames_[k].height > 0.0)) {
      throw Error(ErrorCode::kInvalidInput,
                  "frame " + std::to_string(k) + " has non-positive size");
    }
  }
  if (correspondences_.empty()) {
    throw Error(ErrorCode::kInvalidInput, "scene has no correspondences");
  }
  const int F = num_frames();
  for (std::size_t c = 0; c < correspondences_.size(); ++c) {
    const Correspondence& m = correspondences_[c];
    if (m.frame_i < 0 || m.frame_i >= F || m.frame_j < 0 || m.frame_j >= F ||
        m.frame_i == m.frame_j) {
      throw Error(ErrorCode::kInvalidInput,
                  "correspondence " + std::to_string(c) +
                      " references invalid frames");
    }
    if (!std::isfinite(m.p.u) || !std::isfinite(m.p.v) ||
        !std::isfinite(m.q.u) || !std::isfinite(m.q.v)) {
      throw Error(ErrorCode::kInvalidInput,
                  "correspondence " + std::to_string(c) + " has non-finite pixels");
    }
  }
}

bool SceneProblem::HasGroundTruth() const {
  for (const Frame& f : frames_) {
    if (!f.gt_pose) return false;
  }
  return true;
}

Intrinsics SceneProblem::IntrinsicsOf(const ParameterBlock& params,
                                      int frame) const {
  Intrinsics K;
  K.fov_deg = params.Fov(frame);
  K.width = frames_[frame].width;
  K.height = frames_[frame].height;
  return K;
}

ParameterBlock Initialize(const SceneProblem& problem, std::uint64_t seed,
                          const InitOptions& options) {
  ParameterBlock block;
  block.layout = problem.Layout();
  block.values.assign(block.layout.Size(), 0.0);

  const auto [fov_first, fov_last] = block.layout.GroupRange(ParamGroup::kFov);
  for (std::size_t i = fov_first; i < fov_last; ++i) {
    block.values[i] = options.fov_deg;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> depth(options.depth_mean, options.depth_std);
  const auto [d_first, d_last] = block.layout.GroupRange(ParamGroup::kDepth);
  for (std::size_t i = d_first; i < d_last; ++i) {
    block.values[i] = std::log(std::max(depth(rng), options.depth_clamp));
  }

  const double log_sigma = std::log(options.sigma);
  const std::size_t dim = block.layout.RadiusDim();
  const auto [r_first, r_last] = block.layout.GroupRange(ParamGroup::kRadius);
  for (std::size_t i = r_first; i < r_last; i += dim) {
    if (dim == 1) {
      block.values[i] = log_sigma;
    } else {
      // Zero orientation, equal axes.
      for (std::size_t k = 3; k < 6; ++k) block.values[i + k] = log_sigma;
    }
  }
  return block;
}

}  // namespace proba

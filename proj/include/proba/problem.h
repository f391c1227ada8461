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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "proba/geometry.h"
#include "proba/uncertainty.h"

namespace proba {

struct Frame {
  int id = 0;
  double width = 0.0;
  double height = 0.0;
  // Evaluation only.
  std::optional<Pose> gt_pose;
  std::optional<double> gt_fov;

  bool operator==(const Frame& other) const;
};

// A matched pixel pair: p lives in frame_i, q in frame_j. Each endpoint owns
// a depth and a radius in the parameter block; see ParameterLayout.
struct Correspondence {
  int frame_i = 0;
  int frame_j = 0;
  Pixel p;
  Pixel q;
  double confidence = 1.0;

  bool operator==(const Correspondence&) const = default;
};

enum class ParamGroup : std::uint8_t { kPose, kFov, kDepth, kRadius };

const char* ParamGroupName(ParamGroup group);

struct ParameterOptions {
  // One fov per frame instead of a single shared one.
  bool per_frame_fov = false;
  // Six radius values per endpoint (axis-angle + log sigmas) instead of one.
  bool anisotropic = false;

  bool operator==(const ParameterOptions&) const = default;
};

// Offsets into the packed parameter vector:
//   [ poses: 6F | fov: 1 or F | depths: d_p x C, d_q x C | radii: 2C x dim ]
// Depths are stored as log depth, isotropic radii as log sigma.
class ParameterLayout {
 public:
  ParameterLayout() = default;
  ParameterLayout(int num_frames, int num_correspondences,
                  ParameterOptions options = {});

  int num_frames() const { return num_frames_; }
  int num_correspondences() const { return num_correspondences_; }
  const ParameterOptions& options() const { return options_; }

  std::size_t PoseOffset(int frame) const { return 6 * std::size_t(frame); }
  std::size_t FovOffset() const { return 6 * std::size_t(num_frames_); }
  std::size_t NumFov() const { return options_.per_frame_fov ? num_frames_ : 1; }
  std::size_t FovIndex(int frame) const {
    return FovOffset() + (options_.per_frame_fov ? frame : 0);
  }
  std::size_t DepthOffset() const { return FovOffset() + NumFov(); }
  std::size_t DepthP(int c) const { return DepthOffset() + c; }
  std::size_t DepthQ(int c) const {
    return DepthOffset() + num_correspondences_ + c;
  }
  std::size_t RadiusDim() const { return options_.anisotropic ? 6 : 1; }
  std::size_t RadiusOffset() const {
    return DepthOffset() + 2 * std::size_t(num_correspondences_);
  }
  std::size_t RadiusP(int c) const { return RadiusOffset() + c * RadiusDim(); }
  std::size_t RadiusQ(int c) const {
    return RadiusOffset() + (num_correspondences_ + c) * RadiusDim();
  }
  std::size_t Size() const {
    return RadiusOffset() + 2 * num_correspondences_ * RadiusDim();
  }

  // Half-open index range [first, second) of a group.
  std::pair<std::size_t, std::size_t> GroupRange(ParamGroup group) const;
  ParamGroup GroupOf(std::size_t index) const;
  std::vector<ParamGroup> GroupTags() const;

  bool operator==(const ParameterLayout&) const = default;

 private:
  int num_frames_ = 0;
  int num_correspondences_ = 0;
  ParameterOptions options_;
};

// Structured view of the packed vector.
struct Parameters {
  std::vector<Pose> poses;
  std::vector<double> fov_deg;
  std::vector<double> log_depths;  // layout order: all d_p, then all d_q
  std::vector<double> radii;       // layout order, RadiusDim() per endpoint
};

std::vector<double> Pack(const ParameterLayout& layout, const Parameters& params);
// Throws LengthMismatch when the vector does not match the layout.
Parameters Unpack(const ParameterLayout& layout, std::span<const double> flat);

// The flat vector the optimizer updates, with typed accessors.
struct ParameterBlock {
  ParameterLayout layout;
  std::vector<double> values;

  Pose PoseOf(int frame) const;
  void SetPose(int frame, const Pose& pose);
  double Fov(int frame) const { return values[layout.FovIndex(frame)]; }
  double DepthP(int c) const;
  double DepthQ(int c) const;
  // Isotropic sigma of an endpoint; only valid for isotropic layouts.
  double SigmaP(int c) const;
  double SigmaQ(int c) const;
  Radius RadiusP(int c) const;
  Radius RadiusQ(int c) const;
};

class SceneProblem {
 public:
  SceneProblem() = default;
  // Validates frame ids (dense 0..F-1), sizes and correspondence references.
  SceneProblem(std::vector<Frame> frames,
               std::vector<Correspondence> correspondences,
               ParameterOptions options = {});

  const std::vector<Frame>& frames() const { return frames_; }
  const std::vector<Correspondence>& correspondences() const {
    return correspondences_;
  }
  const ParameterOptions& options() const { return options_; }
  int num_frames() const { return static_cast<int>(frames_.size()); }
  int num_correspondences() const {
    return static_cast<int>(correspondences_.size());
  }
  ParameterLayout Layout() const {
    return ParameterLayout(num_frames(), num_correspondences(), options_);
  }
  bool HasGroundTruth() const;

  Intrinsics IntrinsicsOf(const ParameterBlock& params, int frame) const;

 private:
  std::vector<Frame> frames_;
  std::vector<Correspondence> correspondences_;
  ParameterOptions options_;
};

struct InitOptions {
  double fov_deg = 60.0;
  double depth_mean = 1.0;
  double depth_std = 0.5;
  double depth_clamp = 0.05;
  double sigma = 0.1;
};

// Identity poses, depths ~ Normal(mean, std^2) clamped from below, constant
// radii. Deterministic in the seed.
ParameterBlock Initialize(const SceneProblem& problem, std::uint64_t seed,
                          const InitOptions& options = {});

}  // namespace proba

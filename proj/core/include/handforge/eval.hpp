// Copyright 2026 The HandForge Authors
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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "handforge/depth.hpp"
#include "handforge/handsynth.hpp"

namespace handforge {

/// Camera rotations within radius_rad (geodesic angle) of axis are held out.
struct ViewpointCone {
  Eigen::Vector4d axis_wxyz{1.0, 0.0, 0.0, 0.0};
  double radius_rad = 0.5;
};

struct ArticulationBound {
  int index = 0;  // into the 45-d articulation vector
  double lo = 0.0;
  double hi = 0.0;
};

/// A frame falls in the region when any bound contains its articulation value.
struct ArticulationRegion {
  std::vector<ArticulationBound> bounds;
};

/// Explicit hold-out rule separating extrapolation from interpolation frames.
struct SplitSpec {
  std::vector<ViewpointCone> cones;
  std::vector<ArticulationRegion> regions;
  std::vector<int> shape_ids;  // held-out subjects
  std::uint64_t seed = 0;

  void validate() const;
};

SplitSpec load_split_spec(const std::filesystem::path& path);
void save_split_spec(const std::filesystem::path& path, const SplitSpec& spec);

/// Geodesic angle between two rotations given as unit quaternions.
double rotation_angle_between(const Eigen::Vector4d& a_wxyz, const Eigen::Vector4d& b_wxyz);

struct FrameTags {
  bool interpolation = false;
  bool extrapolation = false;
  bool articulation_only = false;  // held-out articulation, seen viewpoint and shape
  bool viewpoint_only = false;
  bool shape_only = false;

  friend bool operator==(const FrameTags&, const FrameTags&) = default;
};

FrameTags tag_frame(const HandParams& params, const SplitSpec& spec);
std::vector<FrameTags> tag_frames(std::span<const HandParams> params, const SplitSpec& spec);

/// Mean Euclidean joint distance over all frames and joints, mm.
double mean_joint_error(std::span<const Pose> preds, std::span<const Pose> gts);

struct AxisScore {
  std::optional<double> error_mm;  // absent when no frame carries the tag
  std::size_t frames = 0;
};

struct AxisReport {
  AxisScore overall;
  AxisScore extrapolation;
  AxisScore interpolation;
  AxisScore articulation;
  AxisScore viewpoint;
  AxisScore shape;
};

AxisReport axis_scores(std::span<const Pose> preds, std::span<const Pose> gts, std::span<const FrameTags> tags);

std::string report_json(const AxisReport& report, const std::string& config_digest);
std::string report_text(const AxisReport& report);

}  // namespace handforge

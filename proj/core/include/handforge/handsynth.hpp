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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "handforge/depth.hpp"

namespace handforge {

inline constexpr int kCameraDims = 8;
inline constexpr int kArticulationDims = 45;
inline constexpr int kShapeDims = 10;
inline constexpr int kParamDims = kCameraDims + kArticulationDims + kShapeDims;
inline constexpr int kArticulatedSegments = 15;

inline constexpr double kShapeMin = 0.5;
inline constexpr double kShapeMax = 2.0;

/// Hand generation parameters: 8-d camera, 45-d articulation, 10-d shape.
///
/// The flat 63-vector layout is
///   [0] scale, [1..3] translation (mm), [4..7] rotation quaternion (w, x, y, z),
///   [8..52] articulation (axis-angle per segment, radians),
///   [53..57] per-finger length scale, [58..62] per-finger thickness scale.
/// `subject` identifies the hand the shape came from; it is metadata for
/// split rules, not one of the 63 dimensions.
struct HandParams {
  double cam_scale = 1.0;
  Vec3 cam_translation{0.0, 0.0, 500.0};
  Eigen::Vector4d cam_rotation{1.0, 0.0, 0.0, 0.0};
  std::array<double, kArticulationDims> articulation{};
  std::array<double, kShapeDims> shape{1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  int subject = -1;

  /// Throws DomainError on a violated invariant.
  void validate() const;

  Eigen::Quaterniond rotation() const {
    return Eigen::Quaterniond(cam_rotation[0], cam_rotation[1], cam_rotation[2], cam_rotation[3]);
  }
  double length_scale(int finger) const { return shape[static_cast<std::size_t>(finger)]; }
  double thickness_scale(int finger) const { return shape[static_cast<std::size_t>(5 + finger)]; }

  std::array<double, kParamDims> to_vector() const;
  static HandParams from_vector(std::span<const double, kParamDims> v, int subject = -1);

  friend bool operator==(const HandParams&, const HandParams&) = default;
};

/// Kinematic tree of the capsule hand. Joints are stored in topological order
/// (parent index smaller than child). Bone j connects parent[j] to j.
struct SkeletonTopology {
  std::vector<std::string> names;
  std::vector<int> parent;       // -1 for the root
  std::vector<Vec3> offsets;     // rest offset from the parent joint, canonical frame, mm
  std::vector<double> radius;    // capsule radius of the bone ending at this joint, mm
  std::vector<int> finger;       // 0..4, -1 for the palm root
  std::vector<int> segment;      // articulation segment driven at this joint, -1 if rigid

  std::size_t joint_count() const { return parent.size(); }
  std::size_t bone_count() const;
  void validate() const;

  friend bool operator==(const SkeletonTopology&, const SkeletonTopology&) = default;
};

/// Rest skeleton built from average adult hand bone lengths (see data/hand_skeleton.json).
const SkeletonTopology& default_topology();

SkeletonTopology load_topology(const std::filesystem::path& path);
void save_topology(const std::filesystem::path& path, const SkeletonTopology& topo);

/// Parameter corpus as JSON lines, one HandParams object per line.
std::vector<HandParams> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, std::span<const HandParams> corpus);

/// Joint positions in the canonical hand frame: palm root at the origin,
/// fingers along -y, palm facing -z.
Pose forward_kinematics(const HandParams& params, const SkeletonTopology& topo);

/// p -> scale * R(q) * p + t for every joint.
Pose apply_camera(const Pose& pose, double scale, const Eigen::Vector4d& quat_wxyz, const Vec3& translation);
Pose apply_camera(const Pose& pose, const HandParams& params);

/// Canonical FK followed by the camera transform.
Pose camera_pose(const HandParams& params, const SkeletonTopology& topo);

struct Capsule {
  Vec3 a;
  Vec3 b;
  double radius = 0.0;
};

/// Nearest positive ray parameter at which origin + t * dir enters the capsule,
/// or +inf. With dir.z() == 1 the parameter equals camera-frame depth.
double ray_capsule_depth(const Vec3& dir, const Capsule& capsule);

/// Z-buffered depth render of capsules; pixel centers sit at integer (u, v).
DepthImage render_capsules(std::span<const Capsule> capsules, const CameraIntrinsics& k, int width, int height);

std::vector<Capsule> hand_capsules(const Pose& pose, const SkeletonTopology& topo,
                                   std::span<const double, kShapeDims> shape, double radius_gain = 1.0);

/// Depth image of the capsule hand. pose must be in the camera frame with z > 0.
DepthImage render_depth(const Pose& pose, const SkeletonTopology& topo, std::span<const double, kShapeDims> shape,
                        const CameraIntrinsics& k, int width, int height);

/// Clean synthetic render of a parameter record: FK, camera, render.
DepthImage render_params(const HandParams& params, const SkeletonTopology& topo, const CameraIntrinsics& k,
                         int width, int height);

enum class NoiseSubset { kCamera, kArticulation, kShape, kAll };

const char* to_string(NoiseSubset subset);
NoiseSubset noise_subset_from_string(const std::string& name);

/// Per-dimension mean and sample standard deviation over a parameter corpus.
struct ParamStats {
  std::array<double, kParamDims> mean{};
  std::array<double, kParamDims> stddev{};
  std::size_t count = 0;
};

ParamStats compute_param_stats(std::span<const HandParams> corpus);

/// base + N(0, (noise_scale * sigma_d)^2) on every dimension of `subset`,
/// quaternion renormalized, out-of-range values clamped. Deterministic in seed.
HandParams sample_noised_params(const HandParams& base, const ParamStats& stats, NoiseSubset subset,
                                double noise_scale, std::uint64_t seed);

}  // namespace handforge

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

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace handforge {

using Vec3 = Eigen::Vector3d;

/// Largest depth that fits the 16-bit on-disk format, in millimeters.
inline constexpr double kMaxDepthMm = 65535.0;

/// Row-major depth map in millimeters. 0 marks invalid / background.
class DepthImage {
 public:
  DepthImage() = default;
  DepthImage(int width, int height);
  DepthImage(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  double at(int x, int y) const { return data_[index(x, y)]; }
  void set(int x, int y, double depth_mm);

  std::span<const double> data() const { return data_; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::size_t valid_count() const;

  friend bool operator==(const DepthImage&, const DepthImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

struct CameraIntrinsics {
  double fx = 475.0;
  double fy = 475.0;
  double cx = 160.0;
  double cy = 120.0;

  void validate() const;
  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Pixel position plus the depth it was projected from.
struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double z = 0.0;
};

PixelDepth project(const Vec3& point, const CameraIntrinsics& k);
Vec3 backproject(double u, double v, double z, const CameraIntrinsics& k);

/// Canonical 21-joint layout: palm, then thumb/index/middle/ring/pinky with
/// four joints each ordered from the knuckle outwards (MCP, PIP, DIP, TIP;
/// CMC, MCP, IP, TIP for the thumb).
namespace joints {
inline constexpr int kPalm = 0;
inline constexpr int kFingerCount = 5;
inline constexpr int kJointsPerFinger = 4;
inline constexpr int kCanonicalCount = 21;
inline constexpr int kReducedCount = 14;
inline constexpr int finger_base(int finger) { return 1 + finger * kJointsPerFinger; }
inline constexpr int kThumbBase = finger_base(0);
inline constexpr int kIndexMcp = finger_base(1);
inline constexpr int kMiddleMcp = finger_base(2);
inline constexpr int kRingMcp = finger_base(3);
inline constexpr int kPinkyMcp = finger_base(4);
inline constexpr int tip(int finger) { return finger_base(finger) + 3; }
}  // namespace joints

/// Ordered 3D joint positions in millimeters, camera frame unless noted.
/// Geometry helpers accept any joint count; model and file boundaries
/// require one of the canonical counts (see is_canonical()).
struct Pose {
  std::vector<Vec3> joints;

  Pose() = default;
  explicit Pose(std::vector<Vec3> j) : joints(std::move(j)) {}

  std::size_t size() const { return joints.size(); }
  bool empty() const { return joints.empty(); }
  bool is_canonical() const {
    return size() == joints::kCanonicalCount || size() == joints::kReducedCount;
  }
  bool all_finite() const;

  /// x0 y0 z0 x1 y1 z1 ...
  std::vector<double> flatten() const;
  static Pose from_flat(std::span<const double> xyz);

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Marks invalid pixels in a normalized patch. Outside [-1, 1] on purpose.
inline constexpr double kInvalidPatchValue = -2.0;
/// What the regressor sees for an invalid pixel.
inline constexpr double kInvalidNetworkInput = -1.0;
/// Crop cube side used when a recipe does not specify one, in millimeters.
inline constexpr double kDefaultCubeSizeMm = 250.0;

/// Square depth patch normalized around a 3D center.
///
/// A valid value v corresponds to the metric depth center3d.z() + v * cube_size / 2.
struct Patch {
  int resolution = 0;
  std::vector<double> values;
  Vec3 center3d = Vec3::Zero();
  double cube_size = kDefaultCubeSizeMm;
  CameraIntrinsics intrinsics;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * resolution + x]; }
  bool valid(int x, int y) const { return at(x, y) != kInvalidPatchValue; }
  std::size_t valid_count() const;

  /// Metric depth of a normalized value; invalid maps to 0.
  double depth_of(double value) const;
  /// Normalized joint coordinates to metric and back.
  Vec3 to_metric(const Vec3& normalized) const;
  Vec3 to_normalized(const Vec3& metric) const;
};

/// Image-plane rectangle covered by a crop cube, in continuous pixel units.
struct CropWindow {
  double u0, v0, u1, v1;
};
CropWindow crop_window(const Vec3& center3d, double cube_size, const CameraIntrinsics& k);

/// Crops the image region subtended by the cube of side cube_size centered at
/// center3d, nearest-neighbor resampled to out_res x out_res. Depths outside
/// center.z +- cube_size/2 become kInvalidPatchValue. Throws EmptyPatchError
/// when the cube projects entirely outside the image.
Patch crop_patch(const DepthImage& img, const Vec3& center3d, double cube_size,
                 const CameraIntrinsics& k, int out_res);

/// Nearest-neighbor resample of patch values to a smaller square grid.
/// Invalid pixels become kInvalidNetworkInput.
std::vector<double> network_input(const Patch& patch, int input_res);

}  // namespace handforge

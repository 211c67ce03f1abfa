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

#include "handforge/depth.hpp"

namespace handforge {

struct Interval {
  double min = 0.0;
  double max = 0.0;

  double extent() const { return max - min; }
  double center() const { return 0.5 * (min + max); }
  bool contains(double v) const { return v >= min && v <= max; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned 3D box in millimeters, camera frame.
struct CropBox {
  Interval x, y, z;

  void validate() const;
  bool contains(const Vec3& p) const { return x.contains(p.x()) && y.contains(p.y()) && z.contains(p.z()); }
  Vec3 center() const { return {x.center(), y.center(), z.center()}; }
  double max_extent() const;
  friend bool operator==(const CropBox&, const CropBox&) = default;
};

/// Expansion margins for the stage-2 box. z_thickness widens only the near
/// side, where skin sits in front of the skeleton.
struct RefineConfig {
  double x_offset = 30.0;
  double y_offset = 30.0;
  double z_offset = 30.0;
  double z_thickness = 20.0;

  void validate() const;
  friend bool operator==(const RefineConfig&, const RefineConfig&) = default;
};

/// Tight bounding box of the joints.
CropBox pose_bbox(const Pose& pose);

/// [x_min - x_offset, x_max + x_offset] x [y_min - y_offset, y_max + y_offset]
///   x [z_min - z_offset - z_thickness, z_max + z_offset]
CropBox expand_bbox(const CropBox& box, const RefineConfig& cfg);

/// Zeroes every pixel whose back-projection falls outside box.
DepthImage filter_to_box(const DepthImage& img, const CropBox& box, const CameraIntrinsics& k);

/// Stage-2 patch: removes pixels outside the expanded pose box, then crops
/// centered on the box with cube side equal to its largest extent. Throws
/// EmptyPatchError when no pixel survives.
Patch refine_patch(const DepthImage& img, const Pose& pose1, const RefineConfig& cfg, const CameraIntrinsics& k,
                   int out_res);

/// Synthetic pixel where it is positive, real pixel elsewhere.
DepthImage blend(const DepthImage& synthetic, const DepthImage& real);

}  // namespace handforge

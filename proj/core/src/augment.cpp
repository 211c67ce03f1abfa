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

#include "handforge/augment.hpp"

#include <algorithm>
#include <cmath>

#include "handforge/error.hpp"

namespace handforge {

void CropBox::validate() const {
  require(x.min <= x.max && y.min <= y.max && z.min <= z.max, "crop box intervals must be non-empty");
}

double CropBox::max_extent() const { return std::max({x.extent(), y.extent(), z.extent()}); }

void RefineConfig::validate() const {
  require(x_offset >= 0.0 && y_offset >= 0.0 && z_offset >= 0.0 && z_thickness >= 0.0,
          "refine offsets must be non-negative");
}

CropBox pose_bbox(const Pose& pose) {
  if (pose.empty()) throw DomainError("bounding box of an empty pose");
  const Vec3& first = pose.joints.front();
  CropBox box{{first.x(), first.x()}, {first.y(), first.y()}, {first.z(), first.z()}};
  for (const Vec3& p : pose.joints) {
    box.x.min = std::min(box.x.min, p.x());
    box.x.max = std::max(box.x.max, p.x());
    box.y.min = std::min(box.y.min, p.y());
    box.y.max = std::max(box.y.max, p.y());
    box.z.min = std::min(box.z.min, p.z());
    box.z.max = std::max(box.z.max, p.z());
  }
  return box;
}

CropBox expand_bbox(const CropBox& box, const RefineConfig& cfg) {
  box.validate();
  cfg.validate();
  return {{box.x.min - cfg.x_offset, box.x.max + cfg.x_offset},
          {box.y.min - cfg.y_offset, box.y.max + cfg.y_offset},
          {box.z.min - cfg.z_offset - cfg.z_thickness, box.z.max + cfg.z_offset}};
}

DepthImage filter_to_box(const DepthImage& img, const CropBox& box, const CameraIntrinsics& k) {
  k.validate();
  std::vector<double> out(img.data().begin(), img.data().end());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double& d = out[img.index(x, y)];
      if (d <= 0.0) continue;
      if (!box.contains(backproject(x, y, d, k))) d = 0.0;
    }
  }
  return DepthImage(img.width(), img.height(), std::move(out));
}

Patch refine_patch(const DepthImage& img, const Pose& pose1, const RefineConfig& cfg, const CameraIntrinsics& k,
                   int out_res) {
  require(!img.empty(), "refinement needs a non-empty image");
  require(pose1.all_finite(), "stage-1 pose must be finite");
  const CropBox box = expand_bbox(pose_bbox(pose1), cfg);
  if (!(box.z.max > 0.0)) throw EmptyPatchError("expanded pose box lies behind the camera");
  const DepthImage filtered = filter_to_box(img, box, k);
  if (filtered.valid_count() == 0) throw EmptyPatchError("no pixel survives the expanded pose box");
  const double cube = box.max_extent();
  if (!(cube > 0.0) || !(box.center().z() > 0.0)) throw EmptyPatchError("degenerate refinement box");
  Patch patch = crop_patch(filtered, box.center(), cube, k, out_res);
  if (patch.valid_count() == 0) throw EmptyPatchError("refined patch has no valid pixels");
  return patch;
}

DepthImage blend(const DepthImage& synthetic, const DepthImage& real) {
  if (synthetic.width() != real.width() || synthetic.height() != real.height()) {
    throw DomainError("blend inputs must have equal dimensions");
  }
  std::vector<double> out(synthetic.data().size());
  const auto s = synthetic.data();
  const auto r = real.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s[i] > 0.0 ? s[i] : r[i];
  return DepthImage(synthetic.width(), synthetic.height(), std::move(out));
}

}  // namespace handforge

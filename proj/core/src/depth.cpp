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

#include "handforge/depth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "handforge/error.hpp"

namespace handforge {

namespace {

void check_depth(double d) {
  if (!(d >= 0.0 && d <= kMaxDepthMm)) {
    std::ostringstream os;
    os << "depth " << d << " mm outside [0, " << kMaxDepthMm << "]";
    throw DomainError(os.str());
  }
}

}  // namespace

DepthImage::DepthImage(int width, int height)
    : width_(width), height_(height) {
  require(width >= 0 && height >= 0, "image dimensions must be non-negative");
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
}

DepthImage::DepthImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  require(width >= 0 && height >= 0, "image dimensions must be non-negative");
  require(data_.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
          "image data length must equal width * height");
  for (double d : data_) check_depth(d);
}

void DepthImage::set(int x, int y, double depth_mm) {
  require(contains(x, y), "pixel outside image");
  check_depth(depth_mm);
  data_[index(x, y)] = depth_mm;
}

std::size_t DepthImage::valid_count() const {
  return static_cast<std::size_t>(std::count_if(data_.begin(), data_.end(), [](double d) { return d > 0.0; }));
}

void CameraIntrinsics::validate() const {
  require(fx > 0.0 && fy > 0.0, "focal lengths must be positive");
  require(std::isfinite(cx) && std::isfinite(cy), "principal point must be finite");
}

PixelDepth project(const Vec3& point, const CameraIntrinsics& k) {
  if (!(point.z() > 0.0)) throw DomainError("cannot project a point with non-positive z");
  return {k.fx * point.x() / point.z() + k.cx, k.fy * point.y() / point.z() + k.cy, point.z()};
}

Vec3 backproject(double u, double v, double z, const CameraIntrinsics& k) {
  if (!(z > 0.0)) throw DomainError("cannot backproject with non-positive depth");
  return {(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z};
}

bool Pose::all_finite() const {
  return std::all_of(joints.begin(), joints.end(), [](const Vec3& p) { return p.allFinite(); });
}

std::vector<double> Pose::flatten() const {
  std::vector<double> out;
  out.reserve(joints.size() * 3);
  for (const Vec3& p : joints) {
    out.push_back(p.x());
    out.push_back(p.y());
    out.push_back(p.z());
  }
  return out;
}

Pose Pose::from_flat(std::span<const double> xyz) {
  require(xyz.size() % 3 == 0, "flat pose length must be a multiple of 3");
  Pose pose;
  pose.joints.reserve(xyz.size() / 3);
  for (std::size_t i = 0; i < xyz.size(); i += 3) pose.joints.emplace_back(xyz[i], xyz[i + 1], xyz[i + 2]);
  return pose;
}

std::size_t Patch::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](double v) { return v != kInvalidPatchValue; }));
}

double Patch::depth_of(double value) const {
  if (value == kInvalidPatchValue) return 0.0;
  return center3d.z() + value * (cube_size / 2.0);
}

Vec3 Patch::to_metric(const Vec3& normalized) const { return center3d + normalized * (cube_size / 2.0); }

Vec3 Patch::to_normalized(const Vec3& metric) const { return (metric - center3d) / (cube_size / 2.0); }

CropWindow crop_window(const Vec3& center3d, double cube_size, const CameraIntrinsics& k) {
  const double half = cube_size / 2.0;
  const double z = center3d.z();
  return {k.fx * (center3d.x() - half) / z + k.cx, k.fy * (center3d.y() - half) / z + k.cy,
          k.fx * (center3d.x() + half) / z + k.cx, k.fy * (center3d.y() + half) / z + k.cy};
}

Patch crop_patch(const DepthImage& img, const Vec3& center3d, double cube_size, const CameraIntrinsics& k,
                 int out_res) {
  k.validate();
  require(center3d.allFinite(), "crop center must be finite");
  require(center3d.z() > 0.0, "crop center must lie in front of the camera");
  require(cube_size > 0.0, "cube size must be positive");
  require(out_res > 0, "patch resolution must be positive");

  const CropWindow win = crop_window(center3d, cube_size, k);
  if (win.u1 < -0.5 || win.v1 < -0.5 || win.u0 > img.width() - 0.5 || win.v0 > img.height() - 0.5) {
    throw EmptyPatchError("crop cube projects entirely outside the image");
  }

  Patch patch;
  patch.resolution = out_res;
  patch.center3d = center3d;
  patch.cube_size = cube_size;
  patch.intrinsics = k;
  patch.values.assign(static_cast<std::size_t>(out_res) * out_res, kInvalidPatchValue);

  const double half = cube_size / 2.0;
  const double step_u = (win.u1 - win.u0) / out_res;
  const double step_v = (win.v1 - win.v0) / out_res;
  for (int r = 0; r < out_res; ++r) {
    const int sy = static_cast<int>(std::floor(win.v0 + (r + 0.5) * step_v + 0.5));
    if (sy < 0 || sy >= img.height()) continue;
    for (int c = 0; c < out_res; ++c) {
      const int sx = static_cast<int>(std::floor(win.u0 + (c + 0.5) * step_u + 0.5));
      if (sx < 0 || sx >= img.width()) continue;
      const double d = img.at(sx, sy);
      if (d <= 0.0) continue;
      const double offset = d - center3d.z();
      if (offset < -half || offset > half) continue;
      patch.values[static_cast<std::size_t>(r) * out_res + c] = offset / half;
    }
  }
  return patch;
}

std::vector<double> network_input(const Patch& patch, int input_res) {
  require(input_res > 0 && input_res <= patch.resolution, "network input resolution must be in (0, patch resolution]");
  std::vector<double> out(static_cast<std::size_t>(input_res) * input_res);
  const double scale = static_cast<double>(patch.resolution) / input_res;
  for (int r = 0; r < input_res; ++r) {
    const int sy = std::min(patch.resolution - 1, static_cast<int>(std::floor((r + 0.5) * scale)));
    for (int c = 0; c < input_res; ++c) {
      const int sx = std::min(patch.resolution - 1, static_cast<int>(std::floor((c + 0.5) * scale)));
      const double v = patch.at(sx, sy);
      out[static_cast<std::size_t>(r) * input_res + c] = v == kInvalidPatchValue ? kInvalidNetworkInput : v;
    }
  }
  return out;
}

}  // namespace handforge

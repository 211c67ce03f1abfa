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

#include "handforge/handsynth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "handforge/error.hpp"

namespace handforge {

namespace {

constexpr double kQuatTolerance = 1e-6;

void check_unit_quaternion(const Eigen::Vector4d& q) {
  if (!q.allFinite() || std::abs(q.norm() - 1.0) > kQuatTolerance) {
    std::ostringstream os;
    os << "camera rotation must be a unit quaternion (norm " << q.norm() << ")";
    throw DomainError(os.str());
  }
}

Eigen::Matrix3d axis_angle_matrix(double x, double y, double z) {
  const Vec3 axis(x, y, z);
  const double angle = axis.norm();
  if (angle == 0.0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, axis / angle).toRotationMatrix();
}

SkeletonTopology build_default_topology() {
  SkeletonTopology t;
  auto add = [&t](std::string name, int parent, Vec3 offset, double radius, int finger, int segment) {
    t.names.push_back(std::move(name));
    t.parent.push_back(parent);
    t.offsets.push_back(offset);
    t.radius.push_back(radius);
    t.finger.push_back(finger);
    t.segment.push_back(segment);
  };

  add("palm", -1, Vec3::Zero(), 0.0, -1, -1);

  // Thumb: metacarpal, proximal and distal phalanx along a splayed axis.
  const Vec3 thumb_dir = Vec3(0.55, -0.8, -0.2).normalized();
  add("thumb_cmc", 0, Vec3(22.0, -25.0, -8.0), 13.0, 0, 0);
  add("thumb_mcp", 1, thumb_dir * 46.0, 11.0, 0, 1);
  add("thumb_ip", 2, thumb_dir * 31.0, 9.5, 0, 2);
  add("thumb_tip", 3, thumb_dir * 26.0, 8.5, 0, -1);

  struct FingerRest {
    const char* name;
    double mcp_x, mcp_y;
    double proximal, middle, distal;
    double r_meta, r_prox, r_mid, r_dist;
  };
  // Phalanx lengths follow published adult averages; distal includes the fingertip pad.
  const FingerRest fingers[] = {
      {"index", 25.0, -88.0, 40.0, 22.0, 20.0, 12.0, 9.5, 8.5, 7.5},
      {"middle", 5.0, -90.0, 45.0, 26.0, 21.0, 12.0, 10.0, 9.0, 8.0},
      {"ring", -14.0, -84.0, 41.0, 26.0, 21.0, 11.5, 9.5, 8.5, 7.5},
      {"pinky", -31.0, -76.0, 33.0, 18.0, 19.0, 11.0, 8.5, 7.5, 7.0},
  };
  for (int f = 1; f <= 4; ++f) {
    const FingerRest& r = fingers[f - 1];
    const int base = joints::finger_base(f);
    const std::string n = r.name;
    add(n + "_mcp", 0, Vec3(r.mcp_x, r.mcp_y, 0.0), r.r_meta, f, f * 3);
    add(n + "_pip", base, Vec3(0.0, -r.proximal, 0.0), r.r_prox, f, f * 3 + 1);
    add(n + "_dip", base + 1, Vec3(0.0, -r.middle, 0.0), r.r_mid, f, f * 3 + 2);
    add(n + "_tip", base + 2, Vec3(0.0, -r.distal, 0.0), r.r_dist, f, -1);
  }
  return t;
}

}  // namespace

void HandParams::validate() const {
  require(std::isfinite(cam_scale) && cam_scale > 0.0, "camera scale must be positive");
  require(cam_translation.allFinite(), "camera translation must be finite");
  check_unit_quaternion(cam_rotation);
  for (double a : articulation) {
    require(std::isfinite(a) && a >= -std::numbers::pi && a <= std::numbers::pi,
            "articulation components must lie in [-pi, pi]");
  }
  for (double s : shape) {
    require(std::isfinite(s) && s > kShapeMin && s < kShapeMax, "shape multipliers must lie in (0.5, 2.0)");
  }
}

std::array<double, kParamDims> HandParams::to_vector() const {
  std::array<double, kParamDims> v{};
  v[0] = cam_scale;
  for (int i = 0; i < 3; ++i) v[1 + i] = cam_translation[i];
  for (int i = 0; i < 4; ++i) v[4 + i] = cam_rotation[i];
  std::copy(articulation.begin(), articulation.end(), v.begin() + kCameraDims);
  std::copy(shape.begin(), shape.end(), v.begin() + kCameraDims + kArticulationDims);
  return v;
}

HandParams HandParams::from_vector(std::span<const double, kParamDims> v, int subject) {
  HandParams p;
  p.cam_scale = v[0];
  p.cam_translation = Vec3(v[1], v[2], v[3]);
  p.cam_rotation = Eigen::Vector4d(v[4], v[5], v[6], v[7]);
  std::copy(v.begin() + kCameraDims, v.begin() + kCameraDims + kArticulationDims, p.articulation.begin());
  std::copy(v.begin() + kCameraDims + kArticulationDims, v.end(), p.shape.begin());
  p.subject = subject;
  return p;
}

std::size_t SkeletonTopology::bone_count() const {
  return static_cast<std::size_t>(std::count_if(parent.begin(), parent.end(), [](int p) { return p >= 0; }));
}

void SkeletonTopology::validate() const {
  const std::size_t n = parent.size();
  require(names.size() == n && offsets.size() == n && radius.size() == n && finger.size() == n &&
              segment.size() == n,
          "skeleton topology arrays must have equal length");
  for (std::size_t j = 0; j < n; ++j) {
    require(parent[j] < static_cast<int>(j), "skeleton joints must be listed parents-first");
    require(parent[j] >= 0 || j == 0, "only joint 0 may be a root");
    require(radius[j] >= 0.0 && std::isfinite(radius[j]), "capsule radii must be non-negative");
    require(offsets[j].allFinite(), "rest offsets must be finite");
    require(finger[j] >= -1 && finger[j] < joints::kFingerCount, "finger index out of range");
    require(segment[j] >= -1 && segment[j] < kArticulatedSegments, "articulation segment out of range");
  }
}

const SkeletonTopology& default_topology() {
  static const SkeletonTopology topo = build_default_topology();
  return topo;
}

Pose forward_kinematics(const HandParams& params, const SkeletonTopology& topo) {
  params.validate();
  topo.validate();
  const std::size_t n = topo.joint_count();
  std::vector<Vec3> pos(n, Vec3::Zero());
  std::vector<Eigen::Matrix3d> world(n, Eigen::Matrix3d::Identity());
  for (std::size_t j = 0; j < n; ++j) {
    const int p = topo.parent[j];
    Eigen::Matrix3d parent_rot = Eigen::Matrix3d::Identity();
    if (p >= 0) {
      const double len = topo.finger[j] >= 0 ? params.length_scale(topo.finger[j]) : 1.0;
      pos[j] = pos[static_cast<std::size_t>(p)] + world[static_cast<std::size_t>(p)] * (topo.offsets[j] * len);
      parent_rot = world[static_cast<std::size_t>(p)];
    } else {
      pos[j] = topo.offsets[j];
    }
    if (topo.segment[j] >= 0) {
      const std::size_t s = static_cast<std::size_t>(topo.segment[j]) * 3;
      world[j] = parent_rot * axis_angle_matrix(params.articulation[s], params.articulation[s + 1],
                                                params.articulation[s + 2]);
    } else {
      world[j] = parent_rot;
    }
  }
  return Pose(std::move(pos));
}

Pose apply_camera(const Pose& pose, double scale, const Eigen::Vector4d& quat_wxyz, const Vec3& translation) {
  check_unit_quaternion(quat_wxyz);
  const Eigen::Matrix3d rot =
      Eigen::Quaterniond(quat_wxyz[0], quat_wxyz[1], quat_wxyz[2], quat_wxyz[3]).toRotationMatrix();
  Pose out;
  out.joints.reserve(pose.size());
  for (const Vec3& p : pose.joints) out.joints.push_back(scale * (rot * p) + translation);
  return out;
}

Pose apply_camera(const Pose& pose, const HandParams& params) {
  return apply_camera(pose, params.cam_scale, params.cam_rotation, params.cam_translation);
}

Pose camera_pose(const HandParams& params, const SkeletonTopology& topo) {
  return apply_camera(forward_kinematics(params, topo), params);
}

double ray_capsule_depth(const Vec3& dir, const Capsule& capsule) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double r2 = capsule.radius * capsule.radius;
  const double dd = dir.squaredNorm();
  double best = kInf;

  auto sphere = [&](const Vec3& center) {
    // |t*dir - center|^2 = r^2
    const Vec3 oc = -center;
    const double b = dir.dot(oc);
    const double c = oc.squaredNorm() - r2;
    const double h = b * b - dd * c;
    if (h < 0.0) return;
    const double t = (-b - std::sqrt(h)) / dd;
    if (t > 0.0) best = std::min(best, t);
  };

  const Vec3 ba = capsule.b - capsule.a;
  const double baba = ba.squaredNorm();
  if (baba > 0.0) {
    const Vec3 oa = -capsule.a;
    const double bard = ba.dot(dir);
    const double baoa = ba.dot(oa);
    const double rdoa = dir.dot(oa);
    const double a = baba * dd - bard * bard;
    const double b = baba * rdoa - baoa * bard;
    const double c = baba * oa.squaredNorm() - baoa * baoa - r2 * baba;
    const double h = b * b - a * c;
    if (a > 0.0 && h >= 0.0) {
      const double t = (-b - std::sqrt(h)) / a;
      const double y = baoa + t * bard;
      if (t > 0.0 && y > 0.0 && y < baba) best = std::min(best, t);
    }
    sphere(capsule.b);
  }
  sphere(capsule.a);
  return best;
}

DepthImage render_capsules(std::span<const Capsule> capsules, const CameraIntrinsics& k, int width, int height) {
  k.validate();
  require(width >= 0 && height >= 0, "render size must be non-negative");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> zbuf(static_cast<std::size_t>(width) * height, kInf);

  for (const Capsule& cap : capsules) {
    if (!(cap.radius > 0.0)) continue;
    const Vec3 lo = cap.a.cwiseMin(cap.b) - Vec3::Constant(cap.radius);
    const Vec3 hi = cap.a.cwiseMax(cap.b) + Vec3::Constant(cap.radius);
    int x0 = 0, y0 = 0, x1 = width - 1, y1 = height - 1;
    if (lo.z() > 0.0) {
      double umin = kInf, umax = -kInf, vmin = kInf, vmax = -kInf;
      for (int corner = 0; corner < 8; ++corner) {
        const Vec3 p((corner & 1) ? hi.x() : lo.x(), (corner & 2) ? hi.y() : lo.y(), (corner & 4) ? hi.z() : lo.z());
        const PixelDepth px = project(p, k);
        umin = std::min(umin, px.u);
        umax = std::max(umax, px.u);
        vmin = std::min(vmin, px.v);
        vmax = std::max(vmax, px.v);
      }
      x0 = std::max(0, static_cast<int>(std::floor(umin)));
      y0 = std::max(0, static_cast<int>(std::floor(vmin)));
      x1 = std::min(width - 1, static_cast<int>(std::ceil(umax)));
      y1 = std::min(height - 1, static_cast<int>(std::ceil(vmax)));
    } else if (hi.z() <= 0.0) {
      continue;
    }
    for (int y = y0; y <= y1; ++y) {
      const double dy = (y - k.cy) / k.fy;
      for (int x = x0; x <= x1; ++x) {
        const Vec3 dir((x - k.cx) / k.fx, dy, 1.0);
        const double t = ray_capsule_depth(dir, cap);
        double& z = zbuf[static_cast<std::size_t>(y) * width + x];
        if (t < z) z = t;
      }
    }
  }
  for (double& z : zbuf) {
    if (z == kInf) z = 0.0;
    z = std::min(z, kMaxDepthMm);
  }
  return DepthImage(width, height, std::move(zbuf));
}

std::vector<Capsule> hand_capsules(const Pose& pose, const SkeletonTopology& topo,
                                   std::span<const double, kShapeDims> shape, double radius_gain) {
  require(pose.size() == topo.joint_count(), "pose and topology joint counts differ");
  std::vector<Capsule> caps;
  caps.reserve(topo.bone_count());
  for (std::size_t j = 0; j < topo.joint_count(); ++j) {
    const int p = topo.parent[j];
    if (p < 0) continue;
    const double thickness = topo.finger[j] >= 0 ? shape[static_cast<std::size_t>(5 + topo.finger[j])] : 1.0;
    caps.push_back({pose.joints[static_cast<std::size_t>(p)], pose.joints[j], topo.radius[j] * thickness * radius_gain});
  }
  return caps;
}

DepthImage render_depth(const Pose& pose, const SkeletonTopology& topo, std::span<const double, kShapeDims> shape,
                        const CameraIntrinsics& k, int width, int height) {
  topo.validate();
  for (const Vec3& p : pose.joints) {
    if (!(p.z() > 0.0)) throw DomainError("cannot render a joint at or behind the camera plane");
  }
  const std::vector<Capsule> caps = hand_capsules(pose, topo, shape);
  return render_capsules(caps, k, width, height);
}

DepthImage render_params(const HandParams& params, const SkeletonTopology& topo, const CameraIntrinsics& k,
                         int width, int height) {
  return render_depth(camera_pose(params, topo), topo, params.shape, k, width, height);
}

const char* to_string(NoiseSubset subset) {
  switch (subset) {
    case NoiseSubset::kCamera:
      return "camera";
    case NoiseSubset::kArticulation:
      return "articulation";
    case NoiseSubset::kShape:
      return "shape";
    case NoiseSubset::kAll:
      return "all";
  }
  return "all";
}

NoiseSubset noise_subset_from_string(const std::string& name) {
  if (name == "camera") return NoiseSubset::kCamera;
  if (name == "articulation") return NoiseSubset::kArticulation;
  if (name == "shape") return NoiseSubset::kShape;
  if (name == "all") return NoiseSubset::kAll;
  throw DomainError("unknown noise subset '" + name + "'");
}

ParamStats compute_param_stats(std::span<const HandParams> corpus) {
  if (corpus.size() < 2) throw DomainError("parameter statistics need at least two corpus entries");
  ParamStats stats;
  stats.count = corpus.size();
  for (const HandParams& p : corpus) {
    const auto v = p.to_vector();
    for (int d = 0; d < kParamDims; ++d) stats.mean[d] += v[d];
  }
  for (double& m : stats.mean) m /= static_cast<double>(corpus.size());
  for (const HandParams& p : corpus) {
    const auto v = p.to_vector();
    for (int d = 0; d < kParamDims; ++d) {
      const double e = v[d] - stats.mean[d];
      stats.stddev[d] += e * e;
    }
  }
  for (double& s : stats.stddev) s = std::sqrt(s / static_cast<double>(corpus.size() - 1));
  return stats;
}

HandParams sample_noised_params(const HandParams& base, const ParamStats& stats, NoiseSubset subset,
                                double noise_scale, std::uint64_t seed) {
  if (stats.count < 2) throw DomainError("noise statistics come from an empty or single-entry corpus");
  require(noise_scale >= 0.0 && std::isfinite(noise_scale), "noise scale must be non-negative");
  base.validate();
  if (noise_scale == 0.0) return base;

  int lo = 0;
  int hi = kParamDims;
  switch (subset) {
    case NoiseSubset::kCamera:
      hi = kCameraDims;
      break;
    case NoiseSubset::kArticulation:
      lo = kCameraDims;
      hi = kCameraDims + kArticulationDims;
      break;
    case NoiseSubset::kShape:
      lo = kCameraDims + kArticulationDims;
      break;
    case NoiseSubset::kAll:
      break;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto v = base.to_vector();
  for (int d = 0; d < kParamDims; ++d) {
    const double eps = normal(rng);  // drawn for every dimension so subsets share one stream layout
    if (d >= lo && d < hi) v[d] += eps * noise_scale * stats.stddev[d];
  }

  HandParams out = HandParams::from_vector(v, base.subject);
  if (lo < kCameraDims) {
    out.cam_scale = std::max(out.cam_scale, 1e-3);
    const double norm = out.cam_rotation.norm();
    out.cam_rotation = norm > 0.0 ? Eigen::Vector4d(out.cam_rotation / norm) : Eigen::Vector4d(1, 0, 0, 0);
  }
  for (double& a : out.articulation) a = std::clamp(a, -std::numbers::pi, std::numbers::pi);
  const double smin = std::nextafter(kShapeMin, kShapeMax);
  const double smax = std::nextafter(kShapeMax, kShapeMin);
  for (double& s : out.shape) s = std::clamp(s, smin, smax);
  return out;
}

}  // namespace handforge

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

#include "handforge/eval.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "handforge/error.hpp"
#include "json_util.hpp"

namespace handforge {

using detail::at;
using detail::Json;

void SplitSpec::validate() const {
  for (const ViewpointCone& c : cones) {
    require(c.axis_wxyz.allFinite() && std::abs(c.axis_wxyz.norm() - 1.0) <= 1e-6, "cone axis must be a unit quaternion");
    require(c.radius_rad > 0.0 && c.radius_rad < std::numbers::pi, "cone radius must lie in (0, pi)");
  }
  for (const ArticulationRegion& r : regions) {
    for (const ArticulationBound& b : r.bounds) {
      require(b.index >= 0 && b.index < kArticulationDims, "articulation index out of range");
      require(b.lo <= b.hi && b.lo >= -std::numbers::pi && b.hi <= std::numbers::pi,
              "articulation interval must lie within [-pi, pi]");
    }
  }
}

SplitSpec load_split_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split spec '" + path.string() + "'");
  SplitSpec spec;
  try {
    Json j;
    in >> j;
    for (const Json& c : j.value("viewpoint_cones", Json::array())) {
      const auto q = at(c, "axis_wxyz").get<std::vector<double>>();
      if (q.size() != 4) throw ConfigError("cone axis needs 4 components");
      spec.cones.push_back({Eigen::Vector4d(q[0], q[1], q[2], q[3]), at(c, "radius_rad").get<double>()});
    }
    for (const Json& r : j.value("articulation_regions", Json::array())) {
      ArticulationRegion region;
      for (const Json& b : at(r, "bounds")) {
        region.bounds.push_back({at(b, "index").get<int>(), at(b, "lo").get<double>(), at(b, "hi").get<double>()});
      }
      spec.regions.push_back(std::move(region));
    }
    spec.shape_ids = j.value("shape_ids", std::vector<int>{});
    spec.seed = j.value("seed", std::uint64_t{0});
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return spec;
}

void save_split_spec(const std::filesystem::path& path, const SplitSpec& spec) {
  Json cones = Json::array();
  for (const ViewpointCone& c : spec.cones) {
    cones.push_back({{"axis_wxyz", {c.axis_wxyz[0], c.axis_wxyz[1], c.axis_wxyz[2], c.axis_wxyz[3]}},
                     {"radius_rad", c.radius_rad}});
  }
  Json regions = Json::array();
  for (const ArticulationRegion& r : spec.regions) {
    Json bounds = Json::array();
    for (const ArticulationBound& b : r.bounds) bounds.push_back({{"index", b.index}, {"lo", b.lo}, {"hi", b.hi}});
    regions.push_back({{"bounds", bounds}});
  }
  const Json j{{"viewpoint_cones", cones}, {"articulation_regions", regions}, {"shape_ids", spec.shape_ids},
               {"seed", spec.seed}};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write split spec '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

double rotation_angle_between(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  // Relative rotation conj(a) * b; atan2 keeps precision near zero and pi.
  const Eigen::Vector3d va = a.tail<3>(), vb = b.tail<3>();
  const double w = a[0] * b[0] + va.dot(vb);
  const Eigen::Vector3d v = a[0] * vb - b[0] * va - va.cross(vb);
  return 2.0 * std::atan2(v.norm(), std::abs(w));
}

FrameTags tag_frame(const HandParams& params, const SplitSpec& spec) {
  bool view = false;
  for (const ViewpointCone& c : spec.cones) {
    if (rotation_angle_between(params.cam_rotation, c.axis_wxyz) <= c.radius_rad) view = true;
  }
  bool art = false;
  for (const ArticulationRegion& r : spec.regions) {
    for (const ArticulationBound& b : r.bounds) {
      const double a = params.articulation[static_cast<std::size_t>(b.index)];
      if (a >= b.lo && a <= b.hi) art = true;
    }
  }
  bool shape = false;
  for (int id : spec.shape_ids) {
    if (params.subject == id) shape = true;
  }
  FrameTags t;
  t.extrapolation = view || art || shape;
  t.interpolation = !t.extrapolation;
  t.viewpoint_only = view && !art && !shape;
  t.articulation_only = art && !view && !shape;
  t.shape_only = shape && !view && !art;
  return t;
}

std::vector<FrameTags> tag_frames(std::span<const HandParams> params, const SplitSpec& spec) {
  spec.validate();
  std::vector<FrameTags> tags;
  tags.reserve(params.size());
  for (const HandParams& p : params) tags.push_back(tag_frame(p, spec));
  return tags;
}

namespace {

void check_pairs(std::span<const Pose> preds, std::span<const Pose> gts) {
  if (preds.size() != gts.size()) throw DomainError("prediction and ground-truth frame counts differ");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].size() != gts[i].size()) throw DomainError("prediction and ground-truth joint counts differ");
    if (preds[i].empty()) throw DomainError("frame without joints");
  }
}

// Sum of joint distances of one frame.
double frame_error_sum(const Pose& pred, const Pose& gt) {
  double s = 0.0;
  for (std::size_t j = 0; j < pred.size(); ++j) s += (pred.joints[j] - gt.joints[j]).norm();
  return s;
}

}  // namespace

double mean_joint_error(std::span<const Pose> preds, std::span<const Pose> gts) {
  check_pairs(preds, gts);
  if (preds.empty()) throw DomainError("mean joint error of zero frames");
  double total = 0.0;
  std::size_t joints = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    total += frame_error_sum(preds[i], gts[i]);
    joints += preds[i].size();
  }
  return total / static_cast<double>(joints);
}

AxisReport axis_scores(std::span<const Pose> preds, std::span<const Pose> gts, std::span<const FrameTags> tags) {
  check_pairs(preds, gts);
  if (tags.size() != preds.size()) throw DomainError("tag count differs from frame count");

  struct Acc {
    double sum = 0.0;
    std::size_t joints = 0;
    std::size_t frames = 0;
    void add(double s, std::size_t n) {
      sum += s;
      joints += n;
      ++frames;
    }
    AxisScore score() const {
      AxisScore a;
      a.frames = frames;
      if (joints > 0) a.error_mm = sum / static_cast<double>(joints);
      return a;
    }
  };
  Acc overall, extra, inter, art, view, shape;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double s = frame_error_sum(preds[i], gts[i]);
    const std::size_t n = preds[i].size();
    overall.add(s, n);
    if (tags[i].extrapolation) extra.add(s, n);
    if (tags[i].interpolation) inter.add(s, n);
    if (tags[i].articulation_only) art.add(s, n);
    if (tags[i].viewpoint_only) view.add(s, n);
    if (tags[i].shape_only) shape.add(s, n);
  }
  return {overall.score(), extra.score(), inter.score(), art.score(), view.score(), shape.score()};
}

namespace {

struct NamedAxis {
  const char* name;
  const AxisScore* score;
};

std::vector<NamedAxis> named_axes(const AxisReport& r) {
  return {{"overall", &r.overall},           {"extrapolation", &r.extrapolation},
          {"interpolation", &r.interpolation}, {"articulation", &r.articulation},
          {"viewpoint", &r.viewpoint},       {"shape", &r.shape}};
}

}  // namespace

std::string report_json(const AxisReport& report, const std::string& config_digest) {
  Json axes = Json::object();
  for (const NamedAxis& a : named_axes(report)) {
    axes[a.name] = {{"error_mm", a.score->error_mm ? Json(*a.score->error_mm) : Json(nullptr)},
                    {"frames", a.score->frames}};
  }
  const Json j{{"axes", axes}, {"config_digest", config_digest}, {"metric", "mean_3d_joint_error_mm"}};
  return j.dump(2) + "\n";
}

std::string report_text(const AxisReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "axis" << std::right << std::setw(12) << "error_mm" << std::setw(10)
     << "frames" << "\n";
  for (const NamedAxis& a : named_axes(report)) {
    os << std::left << std::setw(16) << a.name << std::right << std::setw(12);
    if (a.score->error_mm) {
      os << std::fixed << std::setprecision(2) << *a.score->error_mm;
    } else {
      os << "absent";
    }
    os << std::setw(10) << a.score->frames << "\n";
  }
  return os.str();
}

}  // namespace handforge

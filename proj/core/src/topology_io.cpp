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

#include <fstream>
#include <sstream>

#include "handforge/error.hpp"
#include "handforge/handsynth.hpp"
#include "json_util.hpp"

namespace handforge {

namespace detail {

const Json& at(const Json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing field '" + key + "'");
  return j.at(key);
}

Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json to_json(const CameraIntrinsics& k) { return Json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}}; }

CameraIntrinsics intrinsics_from_json(const Json& j) {
  CameraIntrinsics k;
  k.fx = at(j, "fx").get<double>();
  k.fy = at(j, "fy").get<double>();
  k.cx = at(j, "cx").get<double>();
  k.cy = at(j, "cy").get<double>();
  return k;
}

Json to_json(const HandParams& p) {
  Json j;
  j["cam_scale"] = p.cam_scale;
  j["cam_translation"] = to_json(p.cam_translation);
  j["cam_rotation"] = Json::array({p.cam_rotation[0], p.cam_rotation[1], p.cam_rotation[2], p.cam_rotation[3]});
  j["articulation"] = p.articulation;
  j["shape"] = p.shape;
  j["subject"] = p.subject;
  return j;
}

HandParams params_from_json(const Json& j) {
  HandParams p;
  try {
    p.cam_scale = at(j, "cam_scale").get<double>();
    p.cam_translation = vec3_from_json(at(j, "cam_translation"));
    const auto q = at(j, "cam_rotation").get<std::vector<double>>();
    if (q.size() != 4) throw ConfigError("cam_rotation must have 4 components");
    p.cam_rotation = Eigen::Vector4d(q[0], q[1], q[2], q[3]);
    const auto a = at(j, "articulation").get<std::vector<double>>();
    if (a.size() != kArticulationDims) throw ConfigError("articulation must have 45 components");
    std::copy(a.begin(), a.end(), p.articulation.begin());
    const auto s = at(j, "shape").get<std::vector<double>>();
    if (s.size() != kShapeDims) throw ConfigError("shape must have 10 components");
    std::copy(s.begin(), s.end(), p.shape.begin());
    p.subject = j.value("subject", -1);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed hand parameters: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace detail

SkeletonTopology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open skeleton file '" + path.string() + "'");
  detail::Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  SkeletonTopology t;
  for (const auto& joint : detail::at(j, "joints")) {
    t.names.push_back(detail::at(joint, "name").get<std::string>());
    t.parent.push_back(detail::at(joint, "parent").get<int>());
    t.offsets.push_back(detail::vec3_from_json(detail::at(joint, "offset_mm")));
    t.radius.push_back(detail::at(joint, "radius_mm").get<double>());
    t.finger.push_back(detail::at(joint, "finger").get<int>());
    t.segment.push_back(detail::at(joint, "segment").get<int>());
  }
  t.validate();
  return t;
}

void save_topology(const std::filesystem::path& path, const SkeletonTopology& topo) {
  topo.validate();
  detail::Json joints = detail::Json::array();
  for (std::size_t i = 0; i < topo.joint_count(); ++i) {
    joints.push_back({{"name", topo.names[i]},
                      {"parent", topo.parent[i]},
                      {"offset_mm", detail::to_json(topo.offsets[i])},
                      {"radius_mm", topo.radius[i]},
                      {"finger", topo.finger[i]},
                      {"segment", topo.segment[i]}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write skeleton file '" + path.string() + "'");
  out << detail::Json{{"joints", joints}}.dump(2) << "\n";
}

std::vector<HandParams> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open parameter corpus '" + path.string() + "'");
  std::vector<HandParams> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      corpus.push_back(detail::params_from_json(detail::Json::parse(line)));
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": " << e.what();
      throw ConfigError(os.str());
    }
  }
  return corpus;
}

void save_corpus(const std::filesystem::path& path, std::span<const HandParams> corpus) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write parameter corpus '" + path.string() + "'");
  for (const HandParams& p : corpus) out << detail::to_json(p).dump() << "\n";
}

}  // namespace handforge

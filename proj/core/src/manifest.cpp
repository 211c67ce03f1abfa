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

#include "handforge/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "handforge/augment.hpp"
#include "handforge/error.hpp"
#include "handforge/parallel.hpp"
#include "handforge/pgm.hpp"
#include "handforge/seed.hpp"
#include "json_util.hpp"

namespace handforge {

using detail::Json;

namespace {

constexpr std::uint64_t kNoiseStream = 0x4E44ull;

Json entry_to_json(const ManifestEntry& e) {
  Json j;
  j["image"] = e.image;
  j["pose"] = e.pose.flatten();
  j["params"] = e.params ? detail::to_json(*e.params) : Json(nullptr);
  j["strategy"] = to_string(e.strategy);
  j["splits"] = e.splits;
  j["camera"] = detail::to_json(e.camera);
  return j;
}

ManifestEntry entry_from_json(const Json& j) {
  ManifestEntry e;
  e.image = detail::at(j, "image").get<std::string>();
  const auto flat = detail::at(j, "pose").get<std::vector<double>>();
  e.pose = Pose::from_flat(flat);
  if (!e.pose.is_canonical()) throw ConfigError("manifest pose must hold 14 or 21 joints");
  if (!e.pose.all_finite()) throw ConfigError("manifest pose has non-finite coordinates");
  if (j.contains("params") && !j.at("params").is_null()) e.params = detail::params_from_json(j.at("params"));
  e.strategy = strategy_from_string(detail::at(j, "strategy").get<std::string>());
  e.splits = j.value("splits", std::vector<std::string>{});
  e.camera = detail::intrinsics_from_json(detail::at(j, "camera"));
  return e;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kRD:
      return "RD";
    case Strategy::kSD:
      return "SD";
    case Strategy::kMD:
      return "MD";
    case Strategy::kND:
      return "ND";
  }
  return "RD";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "RD") return Strategy::kRD;
  if (name == "SD") return Strategy::kSD;
  if (name == "MD") return Strategy::kMD;
  if (name == "ND") return Strategy::kND;
  throw ConfigError("unknown dataset strategy '" + name + "' (expected RD, SD, MD or ND)");
}

bool ManifestEntry::has_split(const std::string& tag) const {
  return std::find(splits.begin(), splits.end(), tag) != splits.end();
}

DatasetManifest DatasetManifest::select(std::span<const Strategy> strategies) const {
  DatasetManifest out;
  out.root = root;
  for (const ManifestEntry& e : entries) {
    if (std::find(strategies.begin(), strategies.end(), e.strategy) != strategies.end()) out.entries.push_back(e);
  }
  return out;
}

std::map<std::string, std::size_t> DatasetManifest::strategy_histogram() const {
  std::map<std::string, std::size_t> h;
  for (const ManifestEntry& e : entries) ++h[to_string(e.strategy)];
  return h;
}

std::map<std::string, std::size_t> DatasetManifest::split_histogram() const {
  std::map<std::string, std::size_t> h;
  for (const ManifestEntry& e : entries) {
    for (const std::string& s : e.splits) ++h[s];
  }
  return h;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  for (const ManifestEntry& e : manifest.entries) out << entry_to_json(e).dump() << "\n";
  if (!out) throw IoError("write failed for manifest '" + path.string() + "'");
}

DatasetManifest load_manifest(const std::filesystem::path& path, bool check_images) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  DatasetManifest m;
  m.root = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      m.entries.push_back(entry_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": " << e.what();
      throw ConfigError(os.str());
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": " << e.what();
      throw ConfigError(os.str());
    }
    if (check_images && !std::filesystem::exists(m.image_path(m.entries.back()))) {
      throw IoError("manifest image not found: '" + m.image_path(m.entries.back()).string() + "'");
    }
  }
  return m;
}

std::string noise_split_tag(NoiseSubset subset) { return std::string("noise:") + to_string(subset); }

DatasetManifest build_dataset(Strategy strategy, const BuildRequest& req) {
  const SkeletonTopology& topo = req.topology ? *req.topology : default_topology();
  const bool needs_real = strategy == Strategy::kRD || strategy == Strategy::kMD;
  if (req.count > 0 && req.corpus.empty()) throw DomainError("dataset build needs a non-empty parameter corpus");
  if (needs_real && req.count > 0 && !req.real_image) {
    throw DomainError(std::string(to_string(strategy)) + " needs real images paired with the corpus");
  }
  ParamStats stats;
  if (strategy == Strategy::kND && req.count > 0) {
    if (req.noise.subsets.empty()) throw DomainError("ND needs at least one noise subset");
    stats = compute_param_stats(req.corpus);
  }

  DatasetManifest manifest;
  manifest.root = req.out_dir;
  manifest.entries.resize(req.count);
  const std::string prefix = req.prefix.empty() ? std::string(to_string(strategy)) : req.prefix;

  parallel_for(req.count, [&](std::size_t i) {
    const HandParams& base = req.corpus[i % req.corpus.size()];
    ManifestEntry& e = manifest.entries[i];
    e.strategy = strategy;
    e.camera = req.camera;
    e.splits = req.splits;
    HandParams params = base;
    DepthImage img;
    switch (strategy) {
      case Strategy::kRD:
        img = req.real_image(i % req.corpus.size());
        break;
      case Strategy::kSD:
        img = render_params(params, topo, req.camera, req.width, req.height);
        break;
      case Strategy::kMD: {
        const DepthImage real = req.real_image(i % req.corpus.size());
        img = blend(render_params(params, topo, req.camera, req.width, req.height), real);
        break;
      }
      case Strategy::kND: {
        const std::size_t block = i * req.noise.subsets.size() / req.count;
        const NoiseSubset subset = req.noise.subsets[block];
        params = sample_noised_params(base, stats, subset, req.noise.scale, derive_seed(req.seed, kNoiseStream, i));
        e.splits.push_back(noise_split_tag(subset));
        img = render_params(params, topo, req.camera, req.width, req.height);
        break;
      }
    }
    e.params = params;
    e.pose = camera_pose(params, topo);
    std::ostringstream name;
    name << "images/" << prefix << "_" << i << ".pgm";
    e.image = name.str();
    write_pgm(req.out_dir / e.image, img);
  });
  return manifest;
}

}  // namespace handforge

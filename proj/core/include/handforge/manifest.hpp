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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "handforge/depth.hpp"
#include "handforge/handsynth.hpp"

namespace handforge {

/// Real, synthetic, mixed (synthetic over real) and parameter-noised synthetic data.
enum class Strategy { kRD, kSD, kMD, kND };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct ManifestEntry {
  std::string image;  // relative to the manifest directory
  Pose pose;          // ground truth, camera frame, mm
  std::optional<HandParams> params;
  Strategy strategy = Strategy::kRD;
  std::vector<std::string> splits;
  CameraIntrinsics camera;

  bool has_split(const std::string& tag) const;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;

  std::filesystem::path image_path(const ManifestEntry& e) const { return root / e.image; }
  DatasetManifest select(std::span<const Strategy> strategies) const;
  std::map<std::string, std::size_t> strategy_histogram() const;
  std::map<std::string, std::size_t> split_histogram() const;
};

/// One JSON object per line. Loading checks that every image path resolves.
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& path, bool check_images = true);

/// Split tag carried by ND entries, e.g. "noise:articulation".
std::string noise_split_tag(NoiseSubset subset);

struct NoiseConfig {
  double scale = 0.1;
  std::vector<NoiseSubset> subsets{NoiseSubset::kCamera, NoiseSubset::kArticulation, NoiseSubset::kShape,
                                   NoiseSubset::kAll};
};

/// Everything build_dataset needs besides the strategy.
struct BuildRequest {
  std::span<const HandParams> corpus;
  /// Real capture paired with corpus[i]; required by RD and MD.
  std::function<DepthImage(std::size_t)> real_image;
  std::size_t count = 0;
  NoiseConfig noise;
  std::uint64_t seed = 0;
  const SkeletonTopology* topology = nullptr;  // default_topology() when null
  CameraIntrinsics camera;
  int width = 320;
  int height = 240;
  std::filesystem::path out_dir;
  std::string prefix;                 // file-name prefix, defaults to the strategy tag
  std::vector<std::string> splits;    // tags added to every entry
};

/// Renders entries and writes their images under out_dir/images. Entry i uses
/// corpus[i % corpus.size()]; ND entries are spread evenly over the noise
/// subsets in contiguous blocks. Deterministic in (seed, request).
DatasetManifest build_dataset(Strategy strategy, const BuildRequest& request);

}  // namespace handforge

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
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "handforge/augment.hpp"
#include "handforge/depth.hpp"
#include "handforge/manifest.hpp"
#include "handforge/regressor.hpp"

namespace handforge {

/// Pixel rectangle [u0, u1] x [v0, v1], inclusive.
struct BoxHint {
  double u0 = 0.0, v0 = 0.0, u1 = 0.0, v1 = 0.0;
};

/// Where to put the stage-1 crop: a known 3D MCP location or a 2D hand box.
using Hint = std::variant<Vec3, BoxHint>;

/// Box hint: center pixel back-projected at the median valid depth inside the
/// box. Throws InferenceError when the box holds no valid depth.
Vec3 resolve_hint(const DepthImage& img, const Hint& hint, const CameraIntrinsics& k);

/// Box around the projected joints, grown by margin_px and shifted by up to
/// jitter_px per edge. Stands in for detector-provided boxes.
BoxHint box_hint_from_pose(const Pose& pose, const CameraIntrinsics& k, double margin_px, double jitter_px,
                           std::uint64_t seed);

/// Preprocessing shared by training and inference.
struct Recipe {
  double cube_size = kDefaultCubeSizeMm;
  int patch_res = 224;
  int input_res = 32;
  int joint_count = 21;
  bool box_hints = true;       // false: crop on the ground-truth middle MCP
  double hint_margin_px = 6.0;
  double hint_jitter_px = 6.0;
  std::uint64_t hint_seed = 0;

  void validate() const;
  friend bool operator==(const Recipe&, const Recipe&) = default;
};

/// Hint for a dataset frame under the recipe; deterministic in the image path.
Hint dataset_hint(const ManifestEntry& entry, const Recipe& recipe);

struct TwoStageModel {
  RegressorParams net1;
  std::optional<RegressorParams> net2;  // absent for single-stage models
  RefineConfig refine;
  Recipe recipe;
  WingConfig wing{0.4, 7.5};
  bool fine_tuned = true;

  bool two_stage() const { return net2.has_value(); }
  void validate() const;
};

/// Normalized 3N prediction -> camera-frame millimeters in the patch's cube frame.
Pose denormalize_pose(std::span<const double> pred, const Patch& patch);
std::vector<double> normalize_pose(const Pose& pose, const Patch& patch);

struct InferenceResult {
  Pose pose;     // final estimate
  Pose stage1;   // Net1 estimate
  Patch patch1;
  std::optional<Patch> patch2;
  bool refine_fallback = false;  // refinement left nothing; stage 2 ran on patch1
};

InferenceResult infer_two_stage(const TwoStageModel& model, const DepthImage& img, const Hint& hint,
                                const CameraIntrinsics& k);

struct TwoStageTrainConfig {
  TrainConfig stage1;
  TrainConfig stage2;
  bool two_stage = true;
  bool fine_tune = true;  // false: Net2 starts from a fresh initialization
  Recipe recipe;
  RefineConfig refine;
  std::uint64_t seed = 0;
};

struct TwoStageTrainResult {
  TwoStageModel model;
  std::vector<EpochStats> trace1;
  std::vector<EpochStats> trace2;
  std::size_t skipped_frames = 0;
};

/// Stage-1 training samples: patch around the recipe hint, targets normalized in that patch.
TrainingSet stage1_training_set(const DatasetManifest& data, const Recipe& recipe, std::size_t* skipped = nullptr);
/// Stage-2 samples: refined patches cut around net1's own predictions.
TrainingSet stage2_training_set(const DatasetManifest& data, const RegressorParams& net1, const Recipe& recipe,
                                const RefineConfig& refine, std::size_t* skipped = nullptr);

/// Net1 only; the result is a single-stage model.
TwoStageTrainResult train_stage1(const DatasetManifest& data, const TwoStageTrainConfig& cfg);
/// Adds Net2, fine-tuned from Net1 or freshly initialized, to a single-stage result.
TwoStageTrainResult add_stage2(TwoStageTrainResult stage1, const DatasetManifest& data,
                               const TwoStageTrainConfig& cfg);

/// Net1 on stage-1 data, then Net2 fine-tuned from Net1 (or freshly
/// initialized) on stage-2 patches derived from Net1's predictions.
TwoStageTrainResult train_two_stage(const DatasetManifest& stage1_data, const DatasetManifest& stage2_data,
                                    const TwoStageTrainConfig& cfg);

/// Final poses for every manifest frame, using dataset_hint() for the crop.
std::vector<Pose> predict_manifest(const TwoStageModel& model, const DatasetManifest& data);

/// Model bundle directory: net1.bin, optional net2.bin, model.json, loss traces.
struct BundleInfo {
  std::string config_digest;
  std::uint64_t seed = 0;
  std::vector<EpochStats> trace1;
  std::vector<EpochStats> trace2;
};
void save_bundle(const std::filesystem::path& dir, const TwoStageModel& model, const BundleInfo& info);
TwoStageModel load_bundle(const std::filesystem::path& dir);
/// model.json verbatim.
std::string bundle_metadata(const std::filesystem::path& dir);

}  // namespace handforge

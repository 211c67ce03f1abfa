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

#include "handforge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "handforge/error.hpp"
#include "handforge/parallel.hpp"
#include "handforge/pgm.hpp"
#include "handforge/seed.hpp"

namespace handforge {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

struct Sample {
  std::vector<double> input;
  std::vector<double> target;
};

TrainingSet assemble(std::vector<std::optional<Sample>>& samples, int input_size, int output_size,
                     std::size_t* skipped) {
  const auto kept = static_cast<Eigen::Index>(std::count_if(samples.begin(), samples.end(), [](const auto& s) {
    return s.has_value();
  }));
  if (skipped) *skipped = samples.size() - static_cast<std::size_t>(kept);
  TrainingSet set{Eigen::MatrixXd(input_size, kept), Eigen::MatrixXd(output_size, kept)};
  Eigen::Index col = 0;
  for (auto& s : samples) {
    if (!s) continue;
    set.inputs.col(col) = Eigen::Map<const Eigen::VectorXd>(s->input.data(), input_size);
    set.targets.col(col) = Eigen::Map<const Eigen::VectorXd>(s->target.data(), output_size);
    ++col;
    s.reset();
  }
  return set;
}

Patch stage1_patch(const DepthImage& img, const Hint& hint, const Recipe& recipe, const CameraIntrinsics& k) {
  const Vec3 center = resolve_hint(img, hint, k);
  return crop_patch(img, center, recipe.cube_size, k, recipe.patch_res);
}

}  // namespace

Vec3 resolve_hint(const DepthImage& img, const Hint& hint, const CameraIntrinsics& k) {
  if (const Vec3* mcp = std::get_if<Vec3>(&hint)) {
    if (!mcp->allFinite() || !(mcp->z() > 0.0)) throw InferenceError("MCP hint must be finite with positive depth");
    return *mcp;
  }
  const BoxHint& box = std::get<BoxHint>(hint);
  if (!(box.u0 <= box.u1 && box.v0 <= box.v1)) throw InferenceError("bounding-box hint is inverted");
  const int x0 = std::max(0, static_cast<int>(std::ceil(box.u0)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(box.v0)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::floor(box.u1)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::floor(box.v1)));
  std::vector<double> depths;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double d = img.at(x, y);
      if (d > 0.0) depths.push_back(d);
    }
  }
  if (depths.empty()) throw InferenceError("bounding-box hint contains no valid depth");
  auto mid = depths.begin() + static_cast<std::ptrdiff_t>((depths.size() - 1) / 2);
  std::nth_element(depths.begin(), mid, depths.end());
  return backproject(0.5 * (box.u0 + box.u1), 0.5 * (box.v0 + box.v1), *mid, k);
}

BoxHint box_hint_from_pose(const Pose& pose, const CameraIntrinsics& k, double margin_px, double jitter_px,
                           std::uint64_t seed) {
  require(!pose.empty(), "box hint needs joints");
  BoxHint box{1e300, 1e300, -1e300, -1e300};
  for (const Vec3& p : pose.joints) {
    const PixelDepth px = project(p, k);
    box.u0 = std::min(box.u0, px.u);
    box.v0 = std::min(box.v0, px.v);
    box.u1 = std::max(box.u1, px.u);
    box.v1 = std::max(box.v1, px.v);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-jitter_px, jitter_px);
  box.u0 -= margin_px - jitter(rng);
  box.v0 -= margin_px - jitter(rng);
  box.u1 += margin_px + jitter(rng);
  box.v1 += margin_px + jitter(rng);
  if (box.u0 > box.u1) std::swap(box.u0, box.u1);
  if (box.v0 > box.v1) std::swap(box.v0, box.v1);
  return box;
}

void Recipe::validate() const {
  require(cube_size > 0.0, "cube size must be positive");
  require(patch_res > 0 && input_res > 0 && input_res <= patch_res, "need 0 < input_res <= patch_res");
  require(joint_count == joints::kCanonicalCount || joint_count == joints::kReducedCount,
          "joint count must be 14 or 21");
  require(hint_margin_px >= 0.0 && hint_jitter_px >= 0.0, "hint margin and jitter must be non-negative");
}

Hint dataset_hint(const ManifestEntry& entry, const Recipe& recipe) {
  if (!recipe.box_hints) {
    require(entry.pose.size() == joints::kCanonicalCount, "MCP hints need the 21-joint layout");
    return entry.pose.joints[joints::kMiddleMcp];
  }
  return box_hint_from_pose(entry.pose, entry.camera, recipe.hint_margin_px, recipe.hint_jitter_px,
                            derive_seed(recipe.hint_seed, fnv1a(entry.image), 0));
}

void TwoStageModel::validate() const {
  recipe.validate();
  refine.validate();
  wing.validate();
  net1.validate();
  const int in = recipe.input_res * recipe.input_res;
  const int out = 3 * recipe.joint_count;
  require(net1.input_size() == in && net1.output_size() == out, "Net1 shape does not match the recipe");
  if (net2) {
    net2->validate();
    require(net2->input_size() == in && net2->output_size() == out, "Net2 shape does not match the recipe");
  }
}

Pose denormalize_pose(std::span<const double> pred, const Patch& patch) {
  Pose pose = Pose::from_flat(pred);
  for (Vec3& p : pose.joints) p = patch.to_metric(p);
  return pose;
}

std::vector<double> normalize_pose(const Pose& pose, const Patch& patch) {
  Pose out = pose;
  for (Vec3& p : out.joints) p = patch.to_normalized(p);
  return out.flatten();
}

InferenceResult infer_two_stage(const TwoStageModel& model, const DepthImage& img, const Hint& hint,
                                const CameraIntrinsics& k) {
  InferenceResult r;
  try {
    r.patch1 = stage1_patch(img, hint, model.recipe, k);
  } catch (const EmptyPatchError& e) {
    throw InferenceError(std::string("stage-1 crop failed: ") + e.what());
  }
  const Eigen::VectorXd out1 = forward(model.net1, r.patch1);
  r.stage1 = denormalize_pose({out1.data(), static_cast<std::size_t>(out1.size())}, r.patch1);
  if (!model.net2) {
    r.pose = r.stage1;
    return r;
  }
  try {
    r.patch2 = refine_patch(img, r.stage1, model.refine, k, model.recipe.patch_res);
  } catch (const EmptyPatchError&) {
    r.patch2 = r.patch1;
    r.refine_fallback = true;
  }
  const Eigen::VectorXd out2 = forward(*model.net2, *r.patch2);
  r.pose = denormalize_pose({out2.data(), static_cast<std::size_t>(out2.size())}, *r.patch2);
  return r;
}

TrainingSet stage1_training_set(const DatasetManifest& data, const Recipe& recipe, std::size_t* skipped) {
  recipe.validate();
  std::vector<std::optional<Sample>> samples(data.entries.size());
  parallel_for(data.entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = data.entries[i];
    if (static_cast<int>(e.pose.size()) != recipe.joint_count) throw DomainError("manifest joint count mismatch");
    const DepthImage img = read_pgm(data.image_path(e));
    try {
      const Patch patch = stage1_patch(img, dataset_hint(e, recipe), recipe, e.camera);
      samples[i] = Sample{network_input(patch, recipe.input_res), normalize_pose(e.pose, patch)};
    } catch (const EmptyPatchError&) {
    } catch (const InferenceError&) {
    }
  });
  return assemble(samples, recipe.input_res * recipe.input_res, 3 * recipe.joint_count, skipped);
}

TrainingSet stage2_training_set(const DatasetManifest& data, const RegressorParams& net1, const Recipe& recipe,
                                const RefineConfig& refine, std::size_t* skipped) {
  recipe.validate();
  std::vector<std::optional<Sample>> samples(data.entries.size());
  parallel_for(data.entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = data.entries[i];
    if (static_cast<int>(e.pose.size()) != recipe.joint_count) throw DomainError("manifest joint count mismatch");
    const DepthImage img = read_pgm(data.image_path(e));
    try {
      const Patch patch1 = stage1_patch(img, dataset_hint(e, recipe), recipe, e.camera);
      const Eigen::VectorXd out1 = forward(net1, patch1);
      const Pose pose1 = denormalize_pose({out1.data(), static_cast<std::size_t>(out1.size())}, patch1);
      Patch patch2;
      try {
        patch2 = refine_patch(img, pose1, refine, e.camera, recipe.patch_res);
      } catch (const EmptyPatchError&) {
        patch2 = patch1;
      }
      samples[i] = Sample{network_input(patch2, recipe.input_res), normalize_pose(e.pose, patch2)};
    } catch (const EmptyPatchError&) {
    } catch (const InferenceError&) {
    }
  });
  return assemble(samples, recipe.input_res * recipe.input_res, 3 * recipe.joint_count, skipped);
}

TwoStageTrainResult train_stage1(const DatasetManifest& data, const TwoStageTrainConfig& cfg) {
  cfg.recipe.validate();
  cfg.refine.validate();
  if (data.entries.empty()) throw DomainError("stage-1 training data is empty");

  TwoStageTrainResult result;
  TwoStageModel& model = result.model;
  model.recipe = cfg.recipe;
  model.refine = cfg.refine;
  model.wing = cfg.stage1.wing;
  model.fine_tuned = false;

  const std::vector<int> sizes = default_layer_sizes(cfg.recipe.input_res, cfg.recipe.joint_count);
  std::size_t skipped = 0;
  const TrainingSet set1 = stage1_training_set(data, cfg.recipe, &skipped);
  if (set1.size() == 0) throw TrainingError("no usable stage-1 training frames");
  TrainResult r1 = train(init_regressor(sizes, derive_seed(cfg.seed, 1, 0)), set1, cfg.stage1);
  model.net1 = std::move(r1.params);
  result.trace1 = std::move(r1.trace);
  result.skipped_frames = skipped;
  return result;
}

TwoStageTrainResult add_stage2(TwoStageTrainResult stage1, const DatasetManifest& data,
                               const TwoStageTrainConfig& cfg) {
  if (data.entries.empty()) throw DomainError("stage-2 training data is empty");
  TwoStageTrainResult result = std::move(stage1);
  TwoStageModel& model = result.model;
  if (model.two_stage()) throw DomainError("model already has a second stage");
  if (!(model.recipe == cfg.recipe) || !(model.refine == cfg.refine)) {
    throw DomainError("stage-2 config disagrees with the stage-1 recipe");
  }
  model.fine_tuned = cfg.fine_tune;

  std::size_t skipped = 0;
  const TrainingSet set2 = stage2_training_set(data, model.net1, cfg.recipe, cfg.refine, &skipped);
  if (set2.size() == 0) throw TrainingError("no usable stage-2 training frames");
  const RegressorParams start =
      cfg.fine_tune ? model.net1
                    : init_regressor(default_layer_sizes(cfg.recipe.input_res, cfg.recipe.joint_count),
                                     derive_seed(cfg.seed, 2, 0));
  TrainResult r2 = fine_tune(start, set2, cfg.stage2);
  model.net2 = std::move(r2.params);
  result.trace2 = std::move(r2.trace);
  result.skipped_frames += skipped;
  return result;
}

TwoStageTrainResult train_two_stage(const DatasetManifest& stage1_data, const DatasetManifest& stage2_data,
                                    const TwoStageTrainConfig& cfg) {
  if (cfg.two_stage && stage2_data.entries.empty()) throw DomainError("stage-2 training data is empty");
  TwoStageTrainResult result = train_stage1(stage1_data, cfg);
  if (!cfg.two_stage) return result;
  return add_stage2(std::move(result), stage2_data, cfg);
}

std::vector<Pose> predict_manifest(const TwoStageModel& model, const DatasetManifest& data) {
  model.validate();
  std::vector<Pose> out(data.entries.size());
  parallel_for(data.entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = data.entries[i];
    const DepthImage img = read_pgm(data.image_path(e));
    out[i] = infer_two_stage(model, img, dataset_hint(e, model.recipe), e.camera).pose;
  });
  return out;
}

}  // namespace handforge

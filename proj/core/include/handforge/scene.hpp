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

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "handforge/depth.hpp"
#include "handforge/handsynth.hpp"

namespace handforge {

/// Ranges for drawing plausible hand parameter records.
struct CorpusConfig {
  int subjects = 10;
  double depth_min_mm = 420.0;
  double depth_max_mm = 620.0;
  double lateral_mm = 45.0;
  double max_roll_rad = 0.9;   // about the optical axis
  double max_pitch_rad = 0.5;
  double max_yaw_rad = 0.6;
  double max_curl = 1.0;       // 0 = open hand, 1 = fist-like curl
  double scale_jitter = 0.05;
};

/// Per-subject shape vectors, deterministic in seed.
std::vector<std::array<double, kShapeDims>> generate_subject_shapes(int subjects, std::uint64_t seed);

/// Draws `count` parameter records. When `accept` is given, rejected draws are
/// redrawn from the next sub-seed, so the result is deterministic in seed.
std::vector<HandParams> generate_corpus(std::size_t count, std::uint64_t seed, const CorpusConfig& cfg,
                                        const std::function<bool(const HandParams&)>& accept = {});

/// The simulated depth sensor used for "real" captures: the hand plus a
/// forearm, background surface, clutter objects, sensor noise and dropout.
struct SceneConfig {
  int width = 320;
  int height = 240;
  CameraIntrinsics camera;
  bool forearm = true;
  double forearm_length_mm = 260.0;
  double forearm_radius_mm = 27.0;
  int clutter_min = 2;
  int clutter_max = 4;
  double clutter_distance_min_mm = 85.0;
  double clutter_distance_max_mm = 150.0;
  double clutter_depth_min_mm = -10.0;   // relative to the hand center
  double clutter_depth_max_mm = 110.0;
  bool background = true;
  double background_min_mm = 180.0;      // behind the hand center
  double background_max_mm = 450.0;
  double depth_noise_mm = 1.5;
  double dropout = 0.01;
  double skin_gain_min = 1.0;            // real skin vs. model capsule radius
  double skin_gain_max = 1.12;
};

DepthImage simulate_capture(const HandParams& params, const SkeletonTopology& topo, const SceneConfig& cfg,
                            std::uint64_t seed);

}  // namespace handforge

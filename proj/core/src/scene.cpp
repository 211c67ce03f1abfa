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

#include "handforge/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "handforge/error.hpp"
#include "handforge/seed.hpp"

namespace handforge {

namespace {

constexpr std::uint64_t kShapeStream = 0x5348415045ull;
constexpr std::uint64_t kCorpusStream = 0xC0A9ull;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

HandParams draw_hand(std::mt19937_64& rng, const CorpusConfig& cfg,
                     const std::vector<std::array<double, kShapeDims>>& shapes) {
  HandParams p;
  p.subject = std::uniform_int_distribution<int>(0, static_cast<int>(shapes.size()) - 1)(rng);
  p.shape = shapes[static_cast<std::size_t>(p.subject)];

  // Curl drives flexion about the local x axis; MCPs also abduct about z.
  const double global_curl = uniform(rng, 0.0, cfg.max_curl);
  for (int f = 1; f < joints::kFingerCount; ++f) {
    const double curl = std::clamp(global_curl + uniform(rng, -0.35, 0.35), -0.1, 1.2);
    const std::size_t s = static_cast<std::size_t>(f) * 9;
    p.articulation[s + 0] = curl * 1.3 * uniform(rng, 0.8, 1.1);
    p.articulation[s + 2] = uniform(rng, -0.18, 0.18);
    p.articulation[s + 3] = curl * 1.6 * uniform(rng, 0.8, 1.1);
    p.articulation[s + 6] = curl * 1.0 * uniform(rng, 0.7, 1.1);
  }
  const double thumb = uniform(rng, 0.0, 1.0);
  p.articulation[0] = thumb * 0.4;
  p.articulation[2] = uniform(rng, -0.3, 0.3);
  p.articulation[3] = thumb * 0.6 * uniform(rng, 0.7, 1.2);
  p.articulation[5] = uniform(rng, -0.2, 0.2);
  p.articulation[6] = thumb * 0.9 * uniform(rng, 0.7, 1.2);

  const Eigen::Quaterniond q = Eigen::AngleAxisd(uniform(rng, -cfg.max_roll_rad, cfg.max_roll_rad), Vec3::UnitZ()) *
                               Eigen::AngleAxisd(uniform(rng, -cfg.max_pitch_rad, cfg.max_pitch_rad), Vec3::UnitX()) *
                               Eigen::AngleAxisd(uniform(rng, -cfg.max_yaw_rad, cfg.max_yaw_rad), Vec3::UnitY());
  const Eigen::Quaterniond qn = q.normalized();
  p.cam_rotation = Eigen::Vector4d(qn.w(), qn.x(), qn.y(), qn.z());
  p.cam_scale = 1.0 + uniform(rng, -cfg.scale_jitter, cfg.scale_jitter);

  // Place the middle MCP near the optical axis.
  const Vec3 mcp_canonical(5.0, -90.0, 0.0);
  const Vec3 target(uniform(rng, -cfg.lateral_mm, cfg.lateral_mm), uniform(rng, -cfg.lateral_mm, cfg.lateral_mm),
                    uniform(rng, cfg.depth_min_mm, cfg.depth_max_mm));
  p.cam_translation = target - p.cam_scale * (qn.toRotationMatrix() * mcp_canonical);
  return p;
}

}  // namespace

std::vector<std::array<double, kShapeDims>> generate_subject_shapes(int subjects, std::uint64_t seed) {
  require(subjects >= 1, "need at least one subject");
  std::vector<std::array<double, kShapeDims>> shapes;
  for (int s = 0; s < subjects; ++s) {
    std::mt19937_64 rng(derive_seed(seed, kShapeStream, static_cast<std::uint64_t>(s)));
    const double length = uniform(rng, 0.86, 1.14);
    const double thick = uniform(rng, 0.85, 1.18);
    std::array<double, kShapeDims> shape{};
    for (int f = 0; f < 5; ++f) shape[f] = length * (1.0 + uniform(rng, -0.05, 0.05));
    for (int f = 0; f < 5; ++f) shape[5 + f] = thick * (1.0 + uniform(rng, -0.06, 0.06));
    shapes.push_back(shape);
  }
  return shapes;
}

std::vector<HandParams> generate_corpus(std::size_t count, std::uint64_t seed, const CorpusConfig& cfg,
                                        const std::function<bool(const HandParams&)>& accept) {
  const auto shapes = generate_subject_shapes(cfg.subjects, seed);
  std::vector<HandParams> corpus;
  corpus.reserve(count);
  constexpr int kMaxAttempts = 10000;
  for (std::size_t i = 0; i < count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      std::mt19937_64 rng(derive_seed(seed, kCorpusStream + static_cast<std::uint64_t>(attempt), i));
      HandParams p = draw_hand(rng, cfg, shapes);
      if (!accept || accept(p)) {
        corpus.push_back(p);
        placed = true;
      }
    }
    if (!placed) throw DomainError("corpus acceptance rule rejects every draw");
  }
  return corpus;
}

DepthImage simulate_capture(const HandParams& params, const SkeletonTopology& topo, const SceneConfig& cfg,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Pose pose = camera_pose(params, topo);
  for (const Vec3& p : pose.joints) {
    if (!(p.z() > 0.0)) throw DomainError("cannot capture a hand behind the camera");
  }

  std::vector<Capsule> caps = hand_capsules(pose, topo, params.shape, uniform(rng, cfg.skin_gain_min, cfg.skin_gain_max));

  Vec3 center = Vec3::Zero();
  for (const Vec3& p : pose.joints) center += p;
  center /= static_cast<double>(pose.size());

  if (cfg.forearm) {
    const Pose arm = apply_camera(
        Pose({Vec3(0.0, 12.0, 3.0), Vec3(uniform(rng, -20.0, 20.0), 12.0 + cfg.forearm_length_mm, 8.0)}), params);
    caps.push_back({arm.joints[0], arm.joints[1], cfg.forearm_radius_mm * params.cam_scale});
  }

  const int clutter = std::uniform_int_distribution<int>(cfg.clutter_min, std::max(cfg.clutter_min, cfg.clutter_max))(rng);
  for (int c = 0; c < clutter; ++c) {
    const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double dist = uniform(rng, cfg.clutter_distance_min_mm, cfg.clutter_distance_max_mm);
    const Vec3 a = center + Vec3(dist * std::cos(angle), dist * std::sin(angle),
                                 uniform(rng, cfg.clutter_depth_min_mm, cfg.clutter_depth_max_mm));
    const Vec3 b = a + Vec3(uniform(rng, -60.0, 60.0), uniform(rng, -60.0, 60.0), uniform(rng, -20.0, 20.0));
    caps.push_back({a, b, uniform(rng, 12.0, 32.0)});
  }

  DepthImage scene = render_capsules(caps, cfg.camera, cfg.width, cfg.height);
  std::vector<double> data(scene.data().begin(), scene.data().end());

  if (cfg.background) {
    const double base = center.z() + uniform(rng, cfg.background_min_mm, cfg.background_max_mm);
    const double gx = uniform(rng, -0.4, 0.4);
    const double gy = uniform(rng, -0.4, 0.4);
    for (int y = 0; y < cfg.height; ++y) {
      for (int x = 0; x < cfg.width; ++x) {
        double& d = data[static_cast<std::size_t>(y) * cfg.width + x];
        if (d == 0.0) d = std::max(1.0, base + gx * (x - cfg.camera.cx) + gy * (y - cfg.camera.cy));
      }
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& d : data) {
    const double n = noise(rng);
    const double drop = unit(rng);
    if (d == 0.0) continue;
    if (drop < cfg.dropout) {
      d = 0.0;
    } else {
      d = std::clamp(d + cfg.depth_noise_mm * n, 1.0, kMaxDepthMm);
    }
  }
  return DepthImage(cfg.width, cfg.height, std::move(data));
}

}  // namespace handforge

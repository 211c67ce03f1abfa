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

#include <gtest/gtest.h>

#include <random>

#include "handforge/augment.hpp"
#include "handforge/error.hpp"
#include "test_support.hpp"

namespace handforge {
namespace {

const CameraIntrinsics kCam64{70.0, 70.0, 31.5, 31.5};

CropBox to_crop_box(const testing::OracleBox& b) {
  return {{b.lo[0], b.hi[0]}, {b.lo[1], b.hi[1]}, {b.lo[2], b.hi[2]}};
}

// 64x64 frame with a hand-sized blob near the pose, clutter and background.
DepthImage random_frame(std::mt19937_64& rng, const Pose& pose) {
  std::uniform_real_distribution<double> jitter(-40, 40), far(600, 900), u01(0, 1);
  std::vector<double> d(64 * 64, 0.0);
  const Vec3 c = pose.joints.front();
  for (int v = 0; v < 64; ++v) {
    for (int u = 0; u < 64; ++u) {
      const double roll = u01(rng);
      double& px = d[static_cast<std::size_t>(v) * 64 + u];
      if (roll < 0.1) {
        px = 0.0;
      } else if (roll < 0.6) {
        px = c.z() + jitter(rng);
      } else {
        px = far(rng);
      }
    }
  }
  return DepthImage(64, 64, d);
}

TEST(PoseBbox, TightAroundJoints) {
  std::mt19937_64 rng(1);
  const Pose pose = testing::random_pose(rng, 21);
  const CropBox box = pose_bbox(pose);
  const auto o = testing::oracle_pose_box(pose);
  EXPECT_EQ(box, to_crop_box(o));
  for (const Vec3& j : pose.joints) EXPECT_TRUE(box.contains(j));
  EXPECT_THROW(pose_bbox(Pose{}), DomainError);
}

TEST(ExpandBbox, MatchesFormulasOnRandomBoxes) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pos(-300, 300), ext(0, 200), off(0, 60);
  for (int i = 0; i < 1000; ++i) {
    const double x0 = pos(rng), y0 = pos(rng), z0 = 400 + pos(rng);
    const CropBox box{{x0, x0 + ext(rng)}, {y0, y0 + ext(rng)}, {z0, z0 + ext(rng)}};
    const RefineConfig cfg{off(rng), off(rng), off(rng), off(rng)};
    const testing::OracleBox o{{box.x.min, box.y.min, box.z.min}, {box.x.max, box.y.max, box.z.max}};
    const auto e = testing::oracle_expand(o, cfg.x_offset, cfg.y_offset, cfg.z_offset, cfg.z_thickness);
    ASSERT_EQ(expand_bbox(box, cfg), to_crop_box(e));
  }
}

TEST(ExpandBbox, PublishedOffsets) {
  const CropBox box{{-10, 10}, {-20, 20}, {480, 520}};
  const CropBox e = expand_bbox(box, RefineConfig{});
  EXPECT_EQ(e, (CropBox{{-40, 40}, {-50, 50}, {430, 550}}));
  EXPECT_THROW(expand_bbox(box, RefineConfig{-1, 0, 0, 0}), DomainError);
}

TEST(FilterToBox, EqualsPerPixelOracle) {
  std::mt19937_64 rng(3);
  for (int frame = 0; frame < 50; ++frame) {
    const Pose pose = testing::random_pose(rng, 21, 50.0, 500.0);
    const DepthImage img = random_frame(rng, pose);
    const RefineConfig cfg{};
    const auto ob = testing::oracle_expand(testing::oracle_pose_box(pose), 30, 30, 30, 20);
    const auto expect = testing::oracle_filter(img, ob, kCam64.fx, kCam64.fy, kCam64.cx, kCam64.cy);
    const DepthImage got = filter_to_box(img, expand_bbox(pose_bbox(pose), cfg), kCam64);
    int mismatches = 0;
    for (std::size_t i = 0; i < expect.size(); ++i) mismatches += got.data()[i] != expect[i];
    ASSERT_EQ(mismatches, 0) << "frame " << frame;
  }
}

TEST(RefinePatch, CropsOracleFilteredImageAtBoxCenter) {
  std::mt19937_64 rng(4);
  const Pose pose = testing::random_pose(rng, 21, 50.0, 500.0);
  const DepthImage img = random_frame(rng, pose);
  const Patch p = refine_patch(img, pose, RefineConfig{}, kCam64, 32);
  const auto ob = testing::oracle_expand(testing::oracle_pose_box(pose), 30, 30, 30, 20);
  const Vec3 center(0.5 * (ob.lo[0] + ob.hi[0]), 0.5 * (ob.lo[1] + ob.hi[1]), 0.5 * (ob.lo[2] + ob.hi[2]));
  const double cube = std::max({ob.hi[0] - ob.lo[0], ob.hi[1] - ob.lo[1], ob.hi[2] - ob.lo[2]});
  EXPECT_TRUE(p.center3d.isApprox(center, 1e-12));
  EXPECT_DOUBLE_EQ(p.cube_size, cube);
  const DepthImage filtered(64, 64, testing::oracle_filter(img, ob, kCam64.fx, kCam64.fy, kCam64.cx, kCam64.cy));
  EXPECT_EQ(p.values, crop_patch(filtered, center, cube, kCam64, 32).values);
}

TEST(RefinePatch, RemovesClutterOutsideTheBox) {
  // Hand plane at 500 mm, a wall at 800 mm, a box-shaped obstacle at 420 mm.
  DepthImage img(64, 64);
  for (int v = 0; v < 64; ++v) {
    for (int u = 0; u < 64; ++u) img.set(u, v, 800.0);
  }
  for (int v = 20; v < 44; ++v) {
    for (int u = 20; u < 44; ++u) img.set(u, v, 500.0);
  }
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 8; ++u) img.set(u, v, 420.0);
  }
  Pose pose;
  for (int i = 0; i < 21; ++i) pose.joints.emplace_back(-40 + 4.0 * i, -30 + 3.0 * i, 505.0);
  const Patch p = refine_patch(img, pose, RefineConfig{}, kCam64, 32);
  for (double v : p.values) {
    if (v == kInvalidPatchValue) continue;
    EXPECT_NEAR(p.depth_of(v), 500.0, 1e-9);
  }
  EXPECT_GT(p.valid_count(), 0u);
}

TEST(RefinePatch, EmptyWhenNothingSurvives) {
  const DepthImage img(64, 64, std::vector<double>(64 * 64, 900.0));
  Pose pose;
  for (int i = 0; i < 21; ++i) pose.joints.emplace_back(i, i, 500.0);
  EXPECT_THROW(refine_patch(img, pose, RefineConfig{}, kCam64, 32), EmptyPatchError);
}

TEST(Blend, PerPixelOracleOnRandomPairs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> depth(1, 2000);
  std::bernoulli_distribution hole(0.4);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> s(40 * 30), r(40 * 30);
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] = hole(rng) ? 0.0 : depth(rng);
      r[k] = hole(rng) ? 0.0 : depth(rng);
    }
    const DepthImage out = blend(DepthImage(40, 30, s), DepthImage(40, 30, r));
    const auto expect = testing::oracle_blend(s, r);
    ASSERT_TRUE(std::equal(expect.begin(), expect.end(), out.data().begin()));
  }
}

TEST(Blend, DegenerateCasesBitExact) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> depth(1, 2000);
  std::vector<double> s(50 * 20), r(50 * 20);
  for (auto& v : s) v = depth(rng);
  for (auto& v : r) v = depth(rng);
  const DepthImage real(50, 20, r);
  const DepthImage syn(50, 20, s);
  EXPECT_EQ(blend(DepthImage(50, 20), real), real);
  EXPECT_EQ(blend(syn, real), syn);
  EXPECT_THROW(blend(DepthImage(2, 2), DepthImage(2, 3)), DomainError);
}

}  // namespace
}  // namespace handforge

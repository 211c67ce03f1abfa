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

#include "handforge/depth.hpp"
#include "handforge/error.hpp"
#include "test_support.hpp"

namespace handforge {
namespace {

using testing::rel_error;

const CameraIntrinsics kCam{475.0, 475.0, 160.0, 120.0};

TEST(Project, OpticalAxisHitsPrincipalPoint) {
  const PixelDepth p = project({0, 0, 500}, kCam);
  EXPECT_DOUBLE_EQ(p.u, 160.0);
  EXPECT_DOUBLE_EQ(p.v, 120.0);
  EXPECT_DOUBLE_EQ(p.z, 500.0);
}

TEST(Project, LateralPoint) {
  // u = 475 * 100 / 500 + 160
  const PixelDepth p = project({100, 0, 500}, kCam);
  EXPECT_DOUBLE_EQ(p.u, 255.0);
  EXPECT_DOUBLE_EQ(p.v, 120.0);
}

TEST(Project, RejectsNonPositiveDepth) {
  EXPECT_THROW(project({0, 0, 0}, kCam), DomainError);
  EXPECT_THROW(project({1, 2, -5}, kCam), DomainError);
  EXPECT_THROW(backproject(10, 10, 0, kCam), DomainError);
}

TEST(Backproject, InvertsExamples) {
  EXPECT_TRUE(backproject(160, 120, 500, kCam).isApprox(Vec3(0, 0, 500)));
  EXPECT_TRUE(backproject(255, 120, 500, kCam).isApprox(Vec3(100, 0, 500)));
}

TEST(Backproject, RandomRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xy(-400, 400), z(50, 3000), f(200, 900), c(50, 400);
  for (int i = 0; i < 1000; ++i) {
    const CameraIntrinsics k{f(rng), f(rng), c(rng), c(rng)};
    const Vec3 pt(xy(rng), xy(rng), z(rng));
    const PixelDepth p = project(pt, k);
    double u = 0, v = 0;
    testing::oracle_project(pt.x(), pt.y(), pt.z(), k.fx, k.fy, k.cx, k.cy, u, v);
    ASSERT_LE(rel_error(p.u, u), 1e-12);
    ASSERT_LE(rel_error(p.v, v), 1e-12);
    const Vec3 back = backproject(p.u, p.v, p.z, k);
    for (int a = 0; a < 3; ++a) ASSERT_LE(rel_error(back[a], pt[a]), 1e-9) << i;
  }
}

TEST(CameraIntrinsics, ValidateRejectsBadFocal) {
  EXPECT_THROW((CameraIntrinsics{0, 1, 0, 0}.validate()), DomainError);
  EXPECT_THROW((CameraIntrinsics{1, -1, 0, 0}.validate()), DomainError);
  EXPECT_NO_THROW(kCam.validate());
}

TEST(DepthImage, InvariantsAreChecked) {
  EXPECT_THROW(DepthImage(3, 2, std::vector<double>(5, 0.0)), DomainError);
  EXPECT_THROW(DepthImage(1, 1, std::vector<double>{-1.0}), DomainError);
  EXPECT_THROW(DepthImage(1, 1, std::vector<double>{70000.0}), DomainError);
  DepthImage img(3, 2);
  img.set(2, 1, 400.0);
  EXPECT_EQ(img.valid_count(), 1u);
  EXPECT_EQ(img.at(2, 1), 400.0);
  EXPECT_THROW(img.set(0, 0, -3.0), DomainError);
}

TEST(Pose, FlattenRoundTripAndLayout) {
  std::mt19937_64 rng(3);
  const Pose p = testing::random_pose(rng, joints::kCanonicalCount);
  EXPECT_TRUE(p.is_canonical());
  EXPECT_EQ(Pose::from_flat(p.flatten()), p);
  EXPECT_EQ(joints::kMiddleMcp, 9);
  EXPECT_EQ(joints::tip(4), 20);
  EXPECT_FALSE(testing::random_pose(rng, 5).is_canonical());
}

// 4x4 image, principal point at the grid center and fx chosen so the 250 mm
// cube at z = 500 spans exactly the image: fx * 125 / 500 = 2 pixels.
const CameraIntrinsics kTiny{8.0, 8.0, 1.5, 1.5};

TEST(CropPatch, ConstantImageAtCenterDepthIsZero) {
  const DepthImage img(4, 4, std::vector<double>(16, 500.0));
  const Patch p = crop_patch(img, {0, 0, 500}, 250, kTiny, 4);
  for (double v : p.values) EXPECT_EQ(v, 0.0);
}

TEST(CropPatch, IntervalEndpointsAndOutOfRangeFixture) {
  std::vector<double> d(16, 500.0);
  d[1] = 625.0;   // far endpoint
  d[2] = 375.0;   // near endpoint
  d[5] = 626.0;   // outside the cube
  d[6] = 0.0;     // invalid
  d[7] = 562.5;   // a quarter cube behind the center
  const Patch p = crop_patch(DepthImage(4, 4, d), {0, 0, 500}, 250, kTiny, 4);
  // Window corners land on pixel centers, so output (c, r) samples input (c, r).
  EXPECT_EQ(p.values[1], 1.0);
  EXPECT_EQ(p.values[2], -1.0);
  EXPECT_EQ(p.values[5], kInvalidPatchValue);
  EXPECT_EQ(p.values[6], kInvalidPatchValue);
  EXPECT_DOUBLE_EQ(p.values[7], 0.5);
  EXPECT_EQ(p.valid_count(), 14u);
}

TEST(CropPatch, CubeOutsideImageThrows) {
  const DepthImage img(4, 4, std::vector<double>(16, 500.0));
  EXPECT_THROW(crop_patch(img, {1000, 0, 500}, 250, kTiny, 4), EmptyPatchError);
  EXPECT_THROW(crop_patch(img, {0, 0, 500}, 0, kTiny, 4), DomainError);
  EXPECT_THROW(crop_patch(img, {0, 0, -1}, 250, kTiny, 4), DomainError);
}

TEST(CropPatch, ValuesStayInRangeAndInvertExactly) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> depth(300, 700);
  std::bernoulli_distribution hole(0.2);
  std::vector<double> d(64 * 48);
  for (double& v : d) v = hole(rng) ? 0.0 : depth(rng);
  const DepthImage img(64, 48, d);
  const CameraIntrinsics k{60, 60, 31.5, 23.5};
  const Patch p = crop_patch(img, {5, -3, 510}, 250, k, 40);
  const CropWindow win = crop_window(p.center3d, p.cube_size, k);
  for (int r = 0; r < p.resolution; ++r) {
    for (int c = 0; c < p.resolution; ++c) {
      const double v = p.at(c, r);
      ASSERT_TRUE(v == kInvalidPatchValue || (v >= -1.0 && v <= 1.0));
      if (v == kInvalidPatchValue) continue;
      const int sx = static_cast<int>(std::floor(win.u0 + (c + 0.5) * (win.u1 - win.u0) / 40 + 0.5));
      const int sy = static_cast<int>(std::floor(win.v0 + (r + 0.5) * (win.v1 - win.v0) / 40 + 0.5));
      EXPECT_NEAR(p.depth_of(v), img.at(sx, sy), 1e-6);
    }
  }
}

TEST(Patch, MetricNormalizedRoundTrip) {
  Patch p;
  p.center3d = {12, -7, 480};
  p.cube_size = 200;
  p.intrinsics = kCam;
  const Vec3 m(40, 22, 530);
  EXPECT_TRUE(p.to_metric(p.to_normalized(m)).isApprox(m, 1e-12));
  EXPECT_TRUE(p.to_normalized(p.center3d).isZero(1e-12));
  EXPECT_EQ(p.depth_of(kInvalidPatchValue), 0.0);
}

TEST(NetworkInput, InvalidBecomesMinusOneAndDownsamples) {
  Patch p;
  p.resolution = 4;
  p.values = {0.1, 0.2, 0.3, 0.4,  //
              0.5, 0.6, 0.7, 0.8,  //
              kInvalidPatchValue, 0.0, 0.0, 0.0,  //
              0.0, 0.0, 0.0, -0.9};
  const auto in = network_input(p, 2);
  // Output pixel i samples source floor((i + 0.5) * 2) = 1, 3.
  EXPECT_EQ(in, (std::vector<double>{0.6, 0.8, 0.0, -0.9}));
  const auto full = network_input(p, 4);
  EXPECT_EQ(full[8], kInvalidNetworkInput);
  EXPECT_THROW(network_input(p, 5), DomainError);
}

}  // namespace
}  // namespace handforge

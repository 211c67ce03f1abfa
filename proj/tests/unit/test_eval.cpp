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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "handforge/error.hpp"
#include "handforge/eval.hpp"
#include "test_support.hpp"

namespace handforge {
namespace {

Pose shifted(const Pose& p, const Vec3& d) {
  Pose out = p;
  for (Vec3& j : out.joints) j += d;
  return out;
}

double oracle_mean_error(const std::vector<Pose>& a, const std::vector<Pose>& b) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    for (std::size_t j = 0; j < a[f].size(); ++j) {
      const Vec3 d = a[f].joints[j] - b[f].joints[j];
      sum += std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

SplitSpec fixture_spec() {
  SplitSpec s;
  s.cones.push_back({Eigen::Vector4d(std::cos(0.6), 0, 0, std::sin(0.6)), 0.3});
  s.regions.push_back({{{10, 0.8, 1.2}, {20, -1.0, -0.5}}});
  s.shape_ids = {7};
  return s;
}

// Two frames: 4 mm error on an interpolation frame, 10 mm on a viewpoint-only frame.
struct TwoFrameFixture {
  std::vector<Pose> gts, preds;
  std::vector<HandParams> params;
};

TwoFrameFixture two_frames() {
  std::mt19937_64 rng(1);
  TwoFrameFixture f;
  f.gts = {testing::random_pose(rng, 21), testing::random_pose(rng, 21)};
  f.preds = {shifted(f.gts[0], {0, 0, 4}), shifted(f.gts[1], {6, 8, 0})};
  HandParams seen;
  seen.subject = 1;
  HandParams rotated = seen;
  rotated.cam_rotation = fixture_spec().cones[0].axis_wxyz;
  f.params = {seen, rotated};
  return f;
}

TEST(MeanJointError, Basics) {
  std::mt19937_64 rng(2);
  std::vector<Pose> gts{testing::random_pose(rng, 21), testing::random_pose(rng, 14)};
  EXPECT_EQ(mean_joint_error(gts, gts), 0.0);
  std::vector<Pose> preds{shifted(gts[0], {3, 4, 0}), shifted(gts[1], {3, 4, 0})};
  EXPECT_DOUBLE_EQ(mean_joint_error(preds, gts), 5.0);
  preds.pop_back();
  EXPECT_THROW(mean_joint_error(preds, gts), DomainError);
}

TEST(MeanJointError, MatchesDoubleLoopOracle) {
  std::mt19937_64 rng(3);
  std::vector<Pose> a, b;
  for (int i = 0; i < 40; ++i) {
    a.push_back(testing::random_pose(rng, 21));
    b.push_back(testing::random_pose(rng, 21));
  }
  EXPECT_NEAR(mean_joint_error(a, b), oracle_mean_error(a, b), 1e-12);
}

TEST(RotationAngle, GeodesicAndSignInvariant) {
  const Eigen::Vector4d id(1, 0, 0, 0);
  const Eigen::Vector4d rz(std::cos(0.25), 0, 0, std::sin(0.25));  // 0.5 rad about z
  EXPECT_NEAR(rotation_angle_between(id, rz), 0.5, 1e-12);
  EXPECT_NEAR(rotation_angle_between(id, -rz), 0.5, 1e-12);
  EXPECT_EQ(rotation_angle_between(rz, rz), 0.0);
}

TEST(TagFrames, EmptySpecIsAllInterpolation) {
  std::vector<HandParams> params(5);
  for (const FrameTags& t : tag_frames(params, SplitSpec{})) {
    EXPECT_TRUE(t.interpolation);
    EXPECT_FALSE(t.extrapolation);
  }
}

TEST(TagFrames, CombinedAxesAreNotOnlyAxes) {
  const SplitSpec spec = fixture_spec();
  HandParams p;
  p.cam_rotation = spec.cones[0].axis_wxyz;
  p.subject = 7;
  const FrameTags t = tag_frame(p, spec);
  EXPECT_TRUE(t.extrapolation);
  EXPECT_FALSE(t.viewpoint_only);
  EXPECT_FALSE(t.shape_only);
  p.articulation[20] = -0.7;  // the second bound of the region
  p.subject = 1;
  p.cam_rotation = {1, 0, 0, 0};
  EXPECT_TRUE(tag_frame(p, spec).articulation_only);
}

TEST(TagFrames, RandomFramesMatchBruteForceRule) {
  const SplitSpec spec = fixture_spec();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(-1.2, 1.2), art(-1.5, 1.5);
  std::uniform_int_distribution<int> subj(0, 9);
  for (int i = 0; i < 500; ++i) {
    HandParams p;
    const Eigen::Quaterniond q(Eigen::AngleAxisd(ang(rng), Vec3::UnitZ()) * Eigen::AngleAxisd(0.2 * ang(rng), Vec3::UnitX()));
    p.cam_rotation = {q.w(), q.x(), q.y(), q.z()};
    p.articulation[10] = art(rng);
    p.articulation[20] = art(rng);
    p.subject = subj(rng);
    const Eigen::Vector4d& c = spec.cones[0].axis_wxyz;
    const double dot = std::abs(c[0] * q.w() + c[1] * q.x() + c[2] * q.y() + c[3] * q.z());
    const bool view = 2 * std::acos(std::min(1.0, dot)) <= 0.3;
    const bool a = (p.articulation[10] >= 0.8 && p.articulation[10] <= 1.2) ||
                   (p.articulation[20] >= -1.0 && p.articulation[20] <= -0.5);
    const bool s = p.subject == 7;
    const FrameTags t = tag_frame(p, spec);
    ASSERT_EQ(t.extrapolation, view || a || s);
    ASSERT_NE(t.extrapolation, t.interpolation);
    ASSERT_EQ(t.viewpoint_only, view && !a && !s);
    ASSERT_EQ(t.articulation_only, a && !view && !s);
    ASSERT_EQ(t.shape_only, s && !view && !a);
  }
}

TEST(AxisScores, TwoFrameFixture) {
  const TwoFrameFixture f = two_frames();
  const AxisReport r = axis_scores(f.preds, f.gts, tag_frames(f.params, fixture_spec()));
  ASSERT_TRUE(r.overall.error_mm && r.interpolation.error_mm && r.extrapolation.error_mm && r.viewpoint.error_mm);
  EXPECT_NEAR(*r.overall.error_mm, 7.0, 1e-12);
  EXPECT_NEAR(*r.interpolation.error_mm, 4.0, 1e-12);
  EXPECT_NEAR(*r.extrapolation.error_mm, 10.0, 1e-12);
  EXPECT_NEAR(*r.viewpoint.error_mm, 10.0, 1e-12);
  EXPECT_FALSE(r.articulation.error_mm);
  EXPECT_FALSE(r.shape.error_mm);
  EXPECT_EQ(r.shape.frames, 0u);
  EXPECT_EQ(r.viewpoint.frames, 1u);
}

TEST(AxisScores, PerfectPredictionsAreZeroOnPresentAxes) {
  const TwoFrameFixture f = two_frames();
  const AxisReport r = axis_scores(f.gts, f.gts, tag_frames(f.params, fixture_spec()));
  for (const AxisScore* a : {&r.overall, &r.extrapolation, &r.interpolation, &r.articulation, &r.viewpoint, &r.shape}) {
    if (a->error_mm) EXPECT_EQ(*a->error_mm, 0.0);
  }
}

TEST(AxisScores, PartitionIdentityAndPermutationInvariance) {
  std::mt19937_64 rng(5);
  const SplitSpec spec = fixture_spec();
  std::vector<Pose> preds, gts;
  std::vector<HandParams> params;
  std::uniform_int_distribution<int> subj(0, 9);
  for (int i = 0; i < 60; ++i) {
    gts.push_back(testing::random_pose(rng, 21));
    preds.push_back(testing::random_pose(rng, 21));
    HandParams p;
    p.subject = subj(rng);
    params.push_back(p);
  }
  const auto tags = tag_frames(params, spec);
  const AxisReport r = axis_scores(preds, gts, tags);
  const double ni = static_cast<double>(r.interpolation.frames), ne = static_cast<double>(r.extrapolation.frames);
  ASSERT_GT(ni, 0);
  ASSERT_GT(ne, 0);
  const double weighted = (ni * *r.interpolation.error_mm + ne * *r.extrapolation.error_mm) / (ni + ne);
  EXPECT_NEAR(*r.overall.error_mm, weighted, 1e-12);

  std::vector<std::size_t> order(60);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Pose> p2, g2;
  std::vector<FrameTags> t2;
  for (std::size_t i : order) {
    p2.push_back(preds[i]);
    g2.push_back(gts[i]);
    t2.push_back(tags[i]);
  }
  const AxisReport r2 = axis_scores(p2, g2, t2);
  EXPECT_NEAR(*r2.overall.error_mm, *r.overall.error_mm, 1e-12);
  EXPECT_NEAR(*r2.shape.error_mm, *r.shape.error_mm, 1e-12);
}

TEST(Reports, JsonAndTextLayout) {
  const TwoFrameFixture f = two_frames();
  const AxisReport r = axis_scores(f.preds, f.gts, tag_frames(f.params, fixture_spec()));
  const std::string js = report_json(r, "abc123");
  const auto j = nlohmann::json::parse(js);
  EXPECT_EQ(j["config_digest"], "abc123");
  EXPECT_DOUBLE_EQ(j["axes"]["viewpoint"]["error_mm"].get<double>(), 10.0);
  EXPECT_TRUE(j["axes"]["shape"]["error_mm"].is_null());
  EXPECT_EQ(js, report_json(r, "abc123"));
  const std::string text = report_text(r);
  EXPECT_NE(text.find("interpolation           4.00         1"), std::string::npos) << text;
  EXPECT_NE(text.find("shape                 absent         0"), std::string::npos) << text;
}

TEST(SplitSpec, ValidationAndRoundTrip) {
  testing::TempDir dir("split");
  const SplitSpec s = fixture_spec();
  save_split_spec(dir / "s.json", s);
  const SplitSpec back = load_split_spec(dir / "s.json");
  EXPECT_EQ(back.cones.size(), 1u);
  EXPECT_TRUE(back.cones[0].axis_wxyz.isApprox(s.cones[0].axis_wxyz));
  EXPECT_EQ(back.regions[0].bounds[1].index, 20);
  EXPECT_EQ(back.shape_ids, s.shape_ids);
  SplitSpec bad = s;
  bad.cones[0].radius_rad = 4.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = s;
  bad.regions[0].bounds[0].index = 45;
  EXPECT_THROW(bad.validate(), DomainError);
}

}  // namespace
}  // namespace handforge

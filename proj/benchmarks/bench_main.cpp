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

#include <benchmark/benchmark.h>

#include <random>

#include "handforge/augment.hpp"
#include "handforge/handsynth.hpp"
#include "handforge/regressor.hpp"

namespace {

using namespace handforge;

const CameraIntrinsics kCam{475.0, 475.0, 160.0, 120.0};

HandParams bench_hand() {
  HandParams p;
  p.cam_translation = {0.0, 40.0, 450.0};
  for (std::size_t i = 0; i < p.articulation.size(); ++i) p.articulation[i] = 0.1 * static_cast<double>(i % 5);
  return p;
}

void BM_RenderHand(benchmark::State& state) {
  const HandParams p = bench_hand();
  for (auto _ : state) benchmark::DoNotOptimize(render_params(p, default_topology(), kCam, 320, 240));
}
BENCHMARK(BM_RenderHand)->Unit(benchmark::kMillisecond);

void BM_CropPatch(benchmark::State& state) {
  const HandParams p = bench_hand();
  const DepthImage img = render_params(p, default_topology(), kCam, 320, 240);
  const Pose pose = camera_pose(p, default_topology());
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(crop_patch(img, pose.joints[joints::kMiddleMcp], 250.0, kCam, res));
}
BENCHMARK(BM_CropPatch)->Arg(64)->Arg(128);

void BM_RefinePatch(benchmark::State& state) {
  const HandParams p = bench_hand();
  const DepthImage img = render_params(p, default_topology(), kCam, 320, 240);
  const Pose pose = camera_pose(p, default_topology());
  for (auto _ : state) benchmark::DoNotOptimize(refine_patch(img, pose, RefineConfig{}, kCam, 128));
}
BENCHMARK(BM_RefinePatch);

void BM_ForwardBatch(benchmark::State& state) {
  const RegressorParams net = init_regressor(default_layer_sizes(32, 21), 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(1024, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(forward_batch(net, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(64);

void BM_BackwardBatch(benchmark::State& state) {
  const RegressorParams net = init_regressor(default_layer_sizes(32, 21), 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(1024, state.range(0));
  const Eigen::MatrixXd y = Eigen::MatrixXd::Random(63, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(backward_batch(net, x, y, WingConfig{0.4, 7.5}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BackwardBatch)->Arg(64);

}  // namespace
BENCHMARK_MAIN();

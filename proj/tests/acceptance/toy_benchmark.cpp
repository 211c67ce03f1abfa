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

#include "toy_benchmark.hpp"

#include <chrono>

#include "cli/synth.hpp"
#include "handforge/eval.hpp"
#include "handforge/pipeline.hpp"
#include "handforge/seed.hpp"

namespace handforge::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double test_error(const TwoStageModel& model, const DatasetManifest& test) {
  std::vector<Pose> gts;
  for (const auto& e : test.entries) gts.push_back(e.pose);
  const std::vector<Pose> preds = predict_manifest(model, test);
  return mean_joint_error(preds, gts);
}

}  // namespace

cli::RunConfig toy_config(const std::filesystem::path& out_dir) {
  const nlohmann::json doc = {
      {"seed", 2024},
      {"out", out_dir.string()},
      {"synth",
       {{"corpus_size", 2000},
        {"test_size", 500},
        {"counts", {{"RD", 2000}, {"SD", 2000}, {"MD", 2000}, {"ND", 2000}}},
        {"noise", {{"scale", 0.1}}}}},
      {"split",
       {{"viewpoint_cones", {{{"axis_wxyz", {1, 0, 0, 0}}, {"radius_rad", 0.15}}}},
        {"shape_ids", {9}}}},
      {"train", {{"preset", "desk"}}}};
  return cli::parse_run_config(doc, out_dir);
}

DatasetManifest concat(std::initializer_list<const DatasetManifest*> parts) {
  DatasetManifest out;
  out.root = (*parts.begin())->root;
  for (const DatasetManifest* p : parts) out.entries.insert(out.entries.end(), p->entries.begin(), p->entries.end());
  return out;
}

ToyBenchmark build_toy_benchmark(const std::filesystem::path& out_dir, std::ostream& log) {
  const auto t0 = Clock::now();
  ToyBenchmark b;
  b.cfg = toy_config(out_dir);
  const SkeletonTopology& topo = default_topology();
  const cli::SynthOutput synth = cli::run_synth(b.cfg, topo);
  b.rd = synth.train.select(std::vector<Strategy>{Strategy::kRD});
  b.sd = synth.train.select(std::vector<Strategy>{Strategy::kSD});
  b.md = synth.train.select(std::vector<Strategy>{Strategy::kMD});
  b.nd = synth.train.select(std::vector<Strategy>{Strategy::kND});
  b.test = synth.test;

  BuildRequest req;
  req.corpus = synth.corpus_train;
  req.count = b.cfg.synth.counts.at(Strategy::kND);
  req.topology = &topo;
  req.camera = b.cfg.camera;
  req.width = b.cfg.width;
  req.height = b.cfg.height;
  req.out_dir = b.cfg.out;
  req.splits = {"train"};
  for (NoiseSubset subset : {NoiseSubset::kAll, NoiseSubset::kCamera, NoiseSubset::kArticulation,
                             NoiseSubset::kShape}) {
    req.noise = {b.cfg.synth.noise.scale, {subset}};
    req.seed = derive_seed(b.cfg.seed, 200, static_cast<std::uint64_t>(subset));
    req.prefix = std::string("ND_") + to_string(subset);
    b.nd_single[subset] = build_dataset(Strategy::kND, req);
  }
  log << "toy benchmark synthesized in " << seconds_since(t0) << " s\n";
  return b;
}

std::map<std::string, double> run_toy_arms(const ToyBenchmark& b, std::ostream& log) {
  TwoStageTrainConfig tc;
  tc.stage1 = b.cfg.train.stage1;
  tc.stage2 = b.cfg.train.stage2;
  tc.recipe = b.cfg.train.recipe;
  tc.refine = b.cfg.train.refine;
  tc.seed = b.cfg.seed;

  const DatasetManifest stage2_full = concat({&b.rd, &b.sd});
  std::map<std::string, double> errors;
  auto score = [&](const std::string& name, const TwoStageTrainResult& r) {
    const auto t0 = Clock::now();
    errors[name] = test_error(r.model, b.test);
    log << "  " << name << ": " << errors[name] << " mm (eval " << seconds_since(t0) << " s)\n" << std::flush;
  };
  auto stage1 = [&](const DatasetManifest& data) {
    const auto t0 = Clock::now();
    TwoStageTrainResult r = train_stage1(data, tc);
    log << "  stage1 on " << data.entries.size() << " frames: " << seconds_since(t0) << " s\n";
    return r;
  };
  auto stage2 = [&](const TwoStageTrainResult& s1, const DatasetManifest& data, bool fine_tune) {
    const auto t0 = Clock::now();
    TwoStageTrainConfig c = tc;
    c.fine_tune = fine_tune;
    TwoStageTrainResult r = add_stage2(s1, data, c);
    log << "  stage2 on " << data.entries.size() << " frames: " << seconds_since(t0) << " s\n";
    return r;
  };

  const TwoStageTrainResult ss_rd = stage1(b.rd);
  score("ss_rd", ss_rd);
  score("ts_rd", stage2(ss_rd, b.rd, true));
  score("ts_rd_noft", stage2(ss_rd, b.rd, false));

  const TwoStageTrainResult ss_full = stage1(concat({&b.rd, &b.sd, &b.md, &b.nd}));
  score("ss_full", ss_full);
  score("ts_full", stage2(ss_full, stage2_full, true));
  score("ts_full_noft", stage2(ss_full, stage2_full, false));

  const DatasetManifest base = concat({&b.rd, &b.sd, &b.md});
  score("ts_base", stage2(stage1(base), stage2_full, true));
  for (const auto& [subset, nd] : b.nd_single) {
    const DatasetManifest mix = concat({&b.rd, &b.sd, &b.md, &nd});
    score(std::string("ts_base_nd_") + to_string(subset), stage2(stage1(mix), stage2_full, true));
  }
  return errors;
}

}  // namespace handforge::acceptance

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

#include "cli/synth.hpp"

#include <sstream>

#include "handforge/eval.hpp"
#include "handforge/pgm.hpp"
#include "handforge/scene.hpp"
#include "handforge/seed.hpp"

namespace handforge::cli {

namespace {

enum Stream : std::uint64_t {
  kTrainCorpus = 101,
  kTestCorpus = 102,
  kTrainCapture = 103,
  kTestCapture = 104,
  kNoise = 105,
};

}  // namespace

SynthOutput run_synth(const RunConfig& cfg, const SkeletonTopology& topo) {
  const SynthSettings& s = cfg.synth;
  SynthOutput out;
  std::size_t needed = 0;
  for (const auto& [strategy, count] : s.counts) needed += count;
  const std::size_t train_corpus_size = needed > 0 ? s.corpus_size : 0;

  out.corpus_train = generate_corpus(train_corpus_size, derive_seed(cfg.seed, kTrainCorpus, 0), s.corpus,
                                     [&](const HandParams& p) { return !tag_frame(p, cfg.split).extrapolation; });
  out.corpus_test = generate_corpus(s.test_size, derive_seed(cfg.seed, kTestCorpus, 0), s.corpus);

  std::filesystem::create_directories(cfg.out / "images");
  save_corpus(cfg.out / "corpus_train.jsonl", out.corpus_train);
  save_corpus(cfg.out / "corpus_test.jsonl", out.corpus_test);
  save_split_spec(cfg.out / "split.json", cfg.split);

  SceneConfig scene = s.scene;
  scene.width = cfg.width;
  scene.height = cfg.height;
  scene.camera = cfg.camera;

  BuildRequest req;
  req.corpus = out.corpus_train;
  req.real_image = [&](std::size_t i) {
    return simulate_capture(out.corpus_train[i], topo, scene, derive_seed(cfg.seed, kTrainCapture, i));
  };
  req.noise = s.noise;
  req.seed = derive_seed(cfg.seed, kNoise, 0);
  req.topology = &topo;
  req.camera = cfg.camera;
  req.width = cfg.width;
  req.height = cfg.height;
  req.out_dir = cfg.out;
  req.splits = {"train"};

  out.train.root = cfg.out;
  for (const auto& [strategy, count] : s.counts) {
    req.count = count;
    DatasetManifest part = build_dataset(strategy, req);
    out.train.entries.insert(out.train.entries.end(), part.entries.begin(), part.entries.end());
  }

  BuildRequest test_req = req;
  test_req.corpus = out.corpus_test;
  test_req.real_image = [&](std::size_t i) {
    return simulate_capture(out.corpus_test[i], topo, scene, derive_seed(cfg.seed, kTestCapture, i));
  };
  test_req.count = s.test_size;
  test_req.prefix = "test";
  test_req.splits = {"test"};
  out.test = build_dataset(Strategy::kRD, test_req);

  save_manifest(cfg.out / "train.jsonl", out.train);
  save_manifest(cfg.out / "test.jsonl", out.test);

  nlohmann::json info = {{"config_digest", cfg.digest()},
                         {"seed", cfg.seed},
                         {"corpus_train", out.corpus_train.size()},
                         {"corpus_test", out.corpus_test.size()},
                         {"train", out.train.strategy_histogram()},
                         {"test", out.test.entries.size()}};
  const std::string text = info.dump(2) + "\n";
  write_file_bytes(cfg.out / "run_info.json", std::vector<std::uint8_t>(text.begin(), text.end()));
  return out;
}

std::string synth_summary(const SynthOutput& out) {
  const auto hist = out.train.strategy_histogram();
  std::ostringstream line;
  for (const char* tag : {"RD", "SD", "MD", "ND"}) {
    const auto it = hist.find(tag);
    line << tag << "=" << (it == hist.end() ? 0 : it->second) << " ";
  }
  line << "test=" << out.test.entries.size();
  return line.str();
}

}  // namespace handforge::cli

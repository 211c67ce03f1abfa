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

#include <ostream>
#include <vector>

#include "cli/run_config.hpp"
#include "handforge/handsynth.hpp"
#include "handforge/manifest.hpp"

namespace handforge::cli {

struct SynthOutput {
  std::vector<HandParams> corpus_train;
  std::vector<HandParams> corpus_test;
  DatasetManifest train;
  DatasetManifest test;
};

/// Generates the train/test corpora and every requested dataset under cfg.out:
/// corpus_train.jsonl, corpus_test.jsonl, split.json, train.jsonl, test.jsonl,
/// run_info.json and images/. Training parameters that fall in the held-out
/// split are redrawn; the test corpus is unfiltered.
SynthOutput run_synth(const RunConfig& cfg, const SkeletonTopology& topo);

/// "RD=.. SD=.. MD=.. ND=.. test=.." for the summary line.
std::string synth_summary(const SynthOutput& out);

}  // namespace handforge::cli

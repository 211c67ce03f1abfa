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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "handforge/augment.hpp"
#include "handforge/eval.hpp"
#include "handforge/manifest.hpp"
#include "handforge/pipeline.hpp"
#include "handforge/scene.hpp"

namespace handforge::cli {

struct SynthSettings {
  std::size_t corpus_size = 2000;
  std::size_t test_size = 500;
  std::map<Strategy, std::size_t> counts{
      {Strategy::kRD, 2000}, {Strategy::kSD, 2000}, {Strategy::kMD, 2000}, {Strategy::kND, 2000}};
  NoiseConfig noise;
  CorpusConfig corpus;
  SceneConfig scene;
};

struct TrainSettings {
  bool two_stage = true;
  bool fine_tune = true;
  std::filesystem::path manifest;
  std::vector<Strategy> stage1_data{Strategy::kRD, Strategy::kSD, Strategy::kMD, Strategy::kND};
  std::vector<Strategy> stage2_data{Strategy::kRD, Strategy::kSD};
  std::string preset = "desk";
  TrainConfig stage1;
  TrainConfig stage2;
  Recipe recipe;
  RefineConfig refine;
  std::filesystem::path out;
};

struct EvalSettings {
  std::filesystem::path model;
  std::filesystem::path predictions;
  std::filesystem::path manifest;
  std::filesystem::path split;
  std::filesystem::path out;
};

/// Fully resolved run configuration. Relative paths resolve against the
/// directory holding the config file.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out = "run";
  std::optional<std::filesystem::path> skeleton;
  int width = 320;
  int height = 240;
  CameraIntrinsics camera;
  SynthSettings synth;
  SplitSpec split;
  TrainSettings train;
  EvalSettings eval;
  nlohmann::json resolved;  // the parsed document, used for the digest

  std::string digest() const;
};

/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Desk-scale defaults and the published hyperparameters, as JSON presets.
nlohmann::json builtin_presets();

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string digest_of(const nlohmann::json& j);

}  // namespace handforge::cli

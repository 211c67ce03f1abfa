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

#include <fstream>
#include <sstream>

#include "handforge/checkpoint.hpp"
#include "handforge/error.hpp"
#include "handforge/pgm.hpp"
#include "handforge/pipeline.hpp"
#include "json_util.hpp"

namespace handforge {

using detail::at;
using detail::Json;

namespace {

constexpr const char* kBundleFormat = "handforge-bundle";
constexpr int kBundleVersion = 1;

Json recipe_json(const Recipe& r) {
  return Json{{"cube_size_mm", r.cube_size},       {"patch_res", r.patch_res},
              {"input_res", r.input_res},          {"joint_count", r.joint_count},
              {"box_hints", r.box_hints},          {"hint_margin_px", r.hint_margin_px},
              {"hint_jitter_px", r.hint_jitter_px}, {"hint_seed", r.hint_seed}};
}

Recipe recipe_from_json(const Json& j) {
  Recipe r;
  r.cube_size = at(j, "cube_size_mm").get<double>();
  r.patch_res = at(j, "patch_res").get<int>();
  r.input_res = at(j, "input_res").get<int>();
  r.joint_count = at(j, "joint_count").get<int>();
  r.box_hints = at(j, "box_hints").get<bool>();
  r.hint_margin_px = at(j, "hint_margin_px").get<double>();
  r.hint_jitter_px = at(j, "hint_jitter_px").get<double>();
  r.hint_seed = at(j, "hint_seed").get<std::uint64_t>();
  return r;
}

}  // namespace

void save_bundle(const std::filesystem::path& dir, const TwoStageModel& model, const BundleInfo& info) {
  model.validate();
  std::filesystem::create_directories(dir);
  save_checkpoint(dir / "net1.bin", model.net1);
  save_loss_trace(dir / "trace_net1.csv", info.trace1);
  if (model.net2) {
    save_checkpoint(dir / "net2.bin", *model.net2);
    save_loss_trace(dir / "trace_net2.csv", info.trace2);
  }
  Json meta;
  meta["format"] = kBundleFormat;
  meta["version"] = kBundleVersion;
  meta["network"] = model.two_stage() ? "two_stage" : "single";
  meta["fine_tuned"] = model.two_stage() && model.fine_tuned;
  meta["layer_sizes"] = model.net1.sizes;
  meta["checkpoints"] = model.two_stage() ? Json::array({"net1.bin", "net2.bin"}) : Json::array({"net1.bin"});
  meta["recipe"] = recipe_json(model.recipe);
  meta["refine"] = Json{{"x_offset_mm", model.refine.x_offset},
                        {"y_offset_mm", model.refine.y_offset},
                        {"z_offset_mm", model.refine.z_offset},
                        {"z_thickness_mm", model.refine.z_thickness}};
  meta["wing"] = Json{{"w", model.wing.w}, {"epsilon", model.wing.epsilon}};
  meta["seeds"] = Json{{"train", info.seed}, {"hint", model.recipe.hint_seed}};
  meta["config_digest"] = info.config_digest;
  const std::string text = meta.dump(2) + "\n";
  write_file_bytes(dir / "model.json", std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string bundle_metadata(const std::filesystem::path& dir) {
  const auto bytes = read_file_bytes(dir / "model.json");
  return std::string(bytes.begin(), bytes.end());
}

TwoStageModel load_bundle(const std::filesystem::path& dir) {
  Json meta;
  try {
    meta = Json::parse(bundle_metadata(dir));
  } catch (const Json::exception& e) {
    throw ConfigError((dir / "model.json").string() + ": " + e.what());
  }
  if (meta.value("format", "") != kBundleFormat) throw ConfigError("not a handforge model bundle: " + dir.string());
  if (meta.value("version", 0) != kBundleVersion) throw ConfigError("unsupported bundle version");

  TwoStageModel model;
  try {
    model.recipe = recipe_from_json(at(meta, "recipe"));
    const Json& refine = at(meta, "refine");
    model.refine.x_offset = at(refine, "x_offset_mm").get<double>();
    model.refine.y_offset = at(refine, "y_offset_mm").get<double>();
    model.refine.z_offset = at(refine, "z_offset_mm").get<double>();
    model.refine.z_thickness = at(refine, "z_thickness_mm").get<double>();
    const Json& wing = at(meta, "wing");
    model.wing.w = at(wing, "w").get<double>();
    model.wing.epsilon = at(wing, "epsilon").get<double>();
    model.fine_tuned = at(meta, "fine_tuned").get<bool>();
    const std::string network = at(meta, "network").get<std::string>();
    model.net1 = load_checkpoint(dir / "net1.bin");
    if (network == "two_stage") {
      model.net2 = load_checkpoint(dir / "net2.bin");
    } else if (network != "single") {
      throw ConfigError("unknown network kind '" + network + "'");
    }
  } catch (const Json::exception& e) {
    throw ConfigError((dir / "model.json").string() + ": " + e.what());
  }
  model.validate();
  return model;
}

}  // namespace handforge

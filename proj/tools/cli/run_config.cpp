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

#include "cli/run_config.hpp"

#include <cstdio>
#include <fstream>

#include "handforge/error.hpp"
#include "handforge/seed.hpp"

namespace handforge::cli {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& obj, const std::string& key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + path + key + "' has the wrong type");
  }
}

const json& section(const json& doc, const std::string& key) {
  static const json kEmpty = json::object();
  if (!doc.contains(key)) return kEmpty;
  if (!doc.at(key).is_object()) throw ConfigError("config field '" + key + "' must be an object");
  return doc.at(key);
}

void check(bool cond, const std::string& field_name, const std::string& what) {
  if (!cond) throw ConfigError("config field '" + field_name + "' " + what);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

std::vector<Strategy> strategies(const json& obj, const std::string& key, const std::string& path,
                                 std::vector<Strategy> fallback) {
  if (!obj.contains(key)) return fallback;
  std::vector<Strategy> out;
  for (const auto& s : field<std::vector<std::string>>(obj, key, path, {})) out.push_back(strategy_from_string(s));
  check(!out.empty(), path + key, "must list at least one strategy");
  return out;
}

TrainConfig train_config(const json& j, const std::string& path, TrainConfig cfg) {
  cfg.batch_size = field(j, "batch_size", path, cfg.batch_size);
  cfg.learning_rate = field(j, "learning_rate", path, cfg.learning_rate);
  cfg.epochs = field(j, "epochs", path, cfg.epochs);
  cfg.lr_step_epochs = field(j, "lr_step_epochs", path, cfg.lr_step_epochs);
  cfg.lr_gamma = field(j, "lr_gamma", path, cfg.lr_gamma);
  if (j.contains("wing")) {
    const json& w = j.at("wing");
    cfg.wing.w = field(w, "w", path + "wing.", cfg.wing.w);
    cfg.wing.epsilon = field(w, "epsilon", path + "wing.", cfg.wing.epsilon);
  }
  check(cfg.batch_size >= 1, path + "batch_size", "must be >= 1");
  check(cfg.learning_rate >= 0.0, path + "learning_rate", "must be >= 0");
  check(cfg.epochs >= 0, path + "epochs", "must be >= 0");
  check(cfg.lr_step_epochs >= 1, path + "lr_step_epochs", "must be >= 1");
  check(cfg.lr_gamma > 0.0 && cfg.lr_gamma <= 1.0, path + "lr_gamma", "must lie in (0, 1]");
  check(cfg.wing.w > 0.0, path + "wing.w", "must be > 0");
  check(cfg.wing.epsilon > 0.0, path + "wing.epsilon", "must be > 0");
  return cfg;
}

}  // namespace

json builtin_presets() {
  const json desk_stage = {{"batch_size", 64},   {"learning_rate", 0.001}, {"epochs", 30},
                           {"lr_step_epochs", 10}, {"lr_gamma", 0.3},
                           {"wing", {{"w", 0.4}, {"epsilon", 7.5}}}};
  json reference_stage = desk_stage;
  reference_stage["batch_size"] = 128;
  reference_stage["learning_rate"] = 0.0006;
  return {{"desk", {{"stage1", desk_stage}, {"stage2", desk_stage}}},
          {"reference",
           {{"stage1", reference_stage},
            {"stage2", reference_stage},
            {"stage1_data", {"RD", "SD", "MD", "ND"}},
            {"stage2_data", {"RD", "SD"}},
            {"refine", {{"x_offset_mm", 30.0}, {"y_offset_mm", 30.0}, {"z_offset_mm", 30.0}, {"z_thickness_mm", 20.0}}}}}};
}

std::string digest_of(const json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::digest() const { return digest_of(resolved); }

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  cfg.resolved = doc;
  cfg.seed = field<std::uint64_t>(doc, "seed", "", 0);
  cfg.out = resolve(base, field<std::string>(doc, "out", "", "run"));
  if (doc.contains("skeleton")) cfg.skeleton = resolve(base, field<std::string>(doc, "skeleton", "", ""));

  const json& cam = section(doc, "camera");
  cfg.camera.fx = field(cam, "fx", "camera.", cfg.camera.fx);
  cfg.camera.fy = field(cam, "fy", "camera.", cfg.camera.fy);
  cfg.camera.cx = field(cam, "cx", "camera.", cfg.camera.cx);
  cfg.camera.cy = field(cam, "cy", "camera.", cfg.camera.cy);
  cfg.width = field(cam, "width", "camera.", cfg.width);
  cfg.height = field(cam, "height", "camera.", cfg.height);
  check(cfg.camera.fx > 0.0, "camera.fx", "must be > 0");
  check(cfg.camera.fy > 0.0, "camera.fy", "must be > 0");
  check(cfg.width > 0 && cfg.height > 0, "camera.width", "and height must be > 0");

  const json& synth = section(doc, "synth");
  SynthSettings& s = cfg.synth;
  s.corpus_size = field(synth, "corpus_size", "synth.", s.corpus_size);
  s.test_size = field(synth, "test_size", "synth.", s.test_size);
  const json& counts = section(synth, "counts");
  for (auto& [strategy, count] : s.counts) count = field(counts, to_string(strategy), "synth.counts.", count);
  for (const auto& [key, value] : counts.items()) strategy_from_string(key);
  check(s.corpus_size > 0 || (s.counts[Strategy::kRD] == 0 && s.counts[Strategy::kSD] == 0 &&
                              s.counts[Strategy::kMD] == 0 && s.counts[Strategy::kND] == 0),
        "synth.corpus_size", "must be > 0 when any strategy count is positive");
  const json& noise = section(synth, "noise");
  s.noise.scale = field(noise, "scale", "synth.noise.", s.noise.scale);
  check(s.noise.scale >= 0.0, "synth.noise.scale", "must be >= 0");
  if (noise.contains("subsets")) {
    s.noise.subsets.clear();
    for (const auto& name : field<std::vector<std::string>>(noise, "subsets", "synth.noise.", {})) {
      try {
        s.noise.subsets.push_back(noise_subset_from_string(name));
      } catch (const DomainError&) {
        throw ConfigError("config field 'synth.noise.subsets' has unknown subset '" + name + "'");
      }
    }
    check(!s.noise.subsets.empty(), "synth.noise.subsets", "must not be empty");
  }
  const json& corpus = section(synth, "corpus");
  s.corpus.subjects = field(corpus, "subjects", "synth.corpus.", s.corpus.subjects);
  s.corpus.depth_min_mm = field(corpus, "depth_min_mm", "synth.corpus.", s.corpus.depth_min_mm);
  s.corpus.depth_max_mm = field(corpus, "depth_max_mm", "synth.corpus.", s.corpus.depth_max_mm);
  s.corpus.max_curl = field(corpus, "max_curl", "synth.corpus.", s.corpus.max_curl);
  check(s.corpus.subjects >= 1, "synth.corpus.subjects", "must be >= 1");
  check(s.corpus.depth_min_mm > 0.0 && s.corpus.depth_min_mm <= s.corpus.depth_max_mm, "synth.corpus.depth_min_mm",
        "must be positive and <= depth_max_mm");
  const json& scene = section(synth, "scene");
  s.scene.forearm = field(scene, "forearm", "synth.scene.", s.scene.forearm);
  s.scene.background = field(scene, "background", "synth.scene.", s.scene.background);
  s.scene.clutter_min = field(scene, "clutter_min", "synth.scene.", s.scene.clutter_min);
  s.scene.clutter_max = field(scene, "clutter_max", "synth.scene.", s.scene.clutter_max);
  s.scene.depth_noise_mm = field(scene, "depth_noise_mm", "synth.scene.", s.scene.depth_noise_mm);
  s.scene.dropout = field(scene, "dropout", "synth.scene.", s.scene.dropout);
  check(s.scene.clutter_min >= 0 && s.scene.clutter_min <= s.scene.clutter_max, "synth.scene.clutter_min",
        "must be within [0, clutter_max]");
  check(s.scene.dropout >= 0.0 && s.scene.dropout <= 1.0, "synth.scene.dropout", "must lie in [0, 1]");
  s.scene.width = cfg.width;
  s.scene.height = cfg.height;
  s.scene.camera = cfg.camera;

  if (doc.contains("split")) {
    const json& sp = doc.at("split");
    try {
      for (const json& c : sp.value("viewpoint_cones", json::array())) {
        const auto q = c.at("axis_wxyz").get<std::vector<double>>();
        check(q.size() == 4, "split.viewpoint_cones.axis_wxyz", "needs 4 components");
        cfg.split.cones.push_back({Eigen::Vector4d(q[0], q[1], q[2], q[3]), c.at("radius_rad").get<double>()});
      }
      for (const json& r : sp.value("articulation_regions", json::array())) {
        ArticulationRegion region;
        for (const json& b : r.at("bounds")) {
          region.bounds.push_back({b.at("index").get<int>(), b.at("lo").get<double>(), b.at("hi").get<double>()});
        }
        cfg.split.regions.push_back(std::move(region));
      }
      cfg.split.shape_ids = sp.value("shape_ids", std::vector<int>{});
      cfg.split.seed = sp.value("seed", cfg.seed);
    } catch (const json::exception&) {
      throw ConfigError("config field 'split' is malformed");
    }
    try {
      cfg.split.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("config field 'split': ") + e.what());
    }
  }

  const json& train = section(doc, "train");
  TrainSettings& t = cfg.train;
  const std::string network = field<std::string>(train, "network", "train.", "two_stage");
  check(network == "two_stage" || network == "single", "train.network", "must be 'single' or 'two_stage'");
  t.two_stage = network == "two_stage";
  t.fine_tune = field(train, "fine_tune", "train.", t.fine_tune);
  t.preset = field<std::string>(train, "preset", "train.", "desk");

  json presets = builtin_presets();
  if (doc.contains("presets")) presets.merge_patch(doc.at("presets"));
  check(presets.contains(t.preset), "train.preset", "names an unknown preset '" + t.preset + "'");
  const json& preset = presets.at(t.preset);
  t.stage1 = train_config(preset.value("stage1", json::object()), "presets." + t.preset + ".stage1.", TrainConfig{});
  t.stage2 = train_config(preset.value("stage2", json::object()), "presets." + t.preset + ".stage2.", TrainConfig{});
  t.stage1 = train_config(section(train, "stage1"), "train.stage1.", t.stage1);
  t.stage2 = train_config(section(train, "stage2"), "train.stage2.", t.stage2);
  t.stage1.seed = derive_seed(cfg.seed, 11, 0);
  t.stage2.seed = derive_seed(cfg.seed, 12, 0);
  t.stage1_data = strategies(preset, "stage1_data", "presets." + t.preset + ".", t.stage1_data);
  t.stage2_data = strategies(preset, "stage2_data", "presets." + t.preset + ".", t.stage2_data);
  t.stage1_data = strategies(train, "stage1_data", "train.", t.stage1_data);
  t.stage2_data = strategies(train, "stage2_data", "train.", t.stage2_data);

  const json refine = preset.value("refine", json::object());
  const json& refine_override = section(train, "refine");
  for (const json* r : {&refine, &refine_override}) {
    t.refine.x_offset = field(*r, "x_offset_mm", "train.refine.", t.refine.x_offset);
    t.refine.y_offset = field(*r, "y_offset_mm", "train.refine.", t.refine.y_offset);
    t.refine.z_offset = field(*r, "z_offset_mm", "train.refine.", t.refine.z_offset);
    t.refine.z_thickness = field(*r, "z_thickness_mm", "train.refine.", t.refine.z_thickness);
  }
  check(t.refine.x_offset >= 0 && t.refine.y_offset >= 0 && t.refine.z_offset >= 0 && t.refine.z_thickness >= 0,
        "train.refine", "offsets must be >= 0");

  const json& recipe = section(train, "recipe");
  t.recipe.cube_size = field(recipe, "cube_size_mm", "train.recipe.", t.recipe.cube_size);
  t.recipe.patch_res = field(recipe, "patch_res", "train.recipe.", t.recipe.patch_res);
  t.recipe.input_res = field(recipe, "input_res", "train.recipe.", t.recipe.input_res);
  t.recipe.box_hints = field(recipe, "box_hints", "train.recipe.", t.recipe.box_hints);
  t.recipe.hint_margin_px = field(recipe, "hint_margin_px", "train.recipe.", t.recipe.hint_margin_px);
  t.recipe.hint_jitter_px = field(recipe, "hint_jitter_px", "train.recipe.", t.recipe.hint_jitter_px);
  t.recipe.hint_seed = cfg.seed;
  check(t.recipe.cube_size > 0.0, "train.recipe.cube_size_mm", "must be > 0");
  check(t.recipe.patch_res > 0, "train.recipe.patch_res", "must be > 0");
  check(t.recipe.input_res > 0 && t.recipe.input_res <= t.recipe.patch_res, "train.recipe.input_res",
        "must lie in (0, patch_res]");

  t.manifest = resolve(base, field<std::string>(train, "manifest", "train.", (cfg.out / "train.jsonl").string()));
  t.out = resolve(base, field<std::string>(train, "out", "train.", (cfg.out / "model").string()));

  const json& ev = section(doc, "eval");
  cfg.eval.model = resolve(base, field<std::string>(ev, "model", "eval.", t.out.string()));
  cfg.eval.predictions = resolve(base, field<std::string>(ev, "predictions", "eval.", ""));
  cfg.eval.manifest = resolve(base, field<std::string>(ev, "manifest", "eval.", (cfg.out / "test.jsonl").string()));
  cfg.eval.split = resolve(base, field<std::string>(ev, "split", "eval.", (cfg.out / "split.json").string()));
  cfg.eval.out = resolve(base, field<std::string>(ev, "out", "eval.", (cfg.out / "eval").string()));
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(doc, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

}  // namespace handforge::cli

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

#include "cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/run_config.hpp"
#include "cli/synth.hpp"
#include "handforge/error.hpp"
#include "handforge/eval.hpp"
#include "handforge/pgm.hpp"
#include "handforge/pipeline.hpp"

namespace handforge::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool no_finetune = false;
  bool dump_stages = false;
  bool quiet = false;

  std::string model;
  std::string predictions;
  std::string manifest;
  std::string split;
  std::string image;
  std::string mcp;
  std::string box;
  std::string camera;
  std::string inspect_path;
};

std::string read_text(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

/// Loads the config with command-line overrides folded into the document, so
/// the digest covers them.
RunConfig config_with_overrides(const Flags& f, const std::string& out_key) {
  if (f.config.empty()) throw ConfigError("--config is required");
  const fs::path path(f.config);
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (f.seed) doc["seed"] = *f.seed;
  if (!f.out.empty()) {
    const std::string abs = fs::absolute(f.out).lexically_normal().string();
    if (out_key == "out") {
      doc["out"] = abs;
    } else {
      doc[out_key]["out"] = abs;
    }
  }
  if (f.no_finetune) doc["train"]["fine_tune"] = false;
  return parse_run_config(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

SkeletonTopology topology_for(const RunConfig& cfg) {
  return cfg.skeleton ? load_topology(*cfg.skeleton) : default_topology();
}

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(flag + " expects " + std::to_string(count) + " comma-separated numbers");
    }
  }
  if (values.size() != count) throw ConfigError(flag + " expects " + std::to_string(count) + " comma-separated numbers");
  return values;
}

int cmd_synth(const Flags& f, std::ostream& out) {
  const RunConfig cfg = config_with_overrides(f, "out");
  const SynthOutput result = run_synth(cfg, topology_for(cfg));
  if (!f.quiet) out << "synth: " << synth_summary(result) << " digest=" << cfg.digest() << "\n";
  return kExitOk;
}

int cmd_train(const Flags& f, std::ostream& out) {
  const RunConfig cfg = config_with_overrides(f, "train");
  const TrainSettings& t = cfg.train;
  const DatasetManifest all = load_manifest(t.manifest);
  const DatasetManifest data1 = all.select(t.stage1_data);
  const DatasetManifest data2 = all.select(t.stage2_data);
  if (data1.entries.empty()) throw ConfigError("train.stage1_data selects no frames from " + t.manifest.string());
  for (const auto& e : all.entries) {
    if (e.pose.joints.size() != static_cast<std::size_t>(t.recipe.joint_count)) {
      throw ConfigError("train manifest joint count does not match train.recipe");
    }
  }

  TwoStageTrainConfig tc;
  tc.stage1 = t.stage1;
  tc.stage2 = t.stage2;
  tc.two_stage = t.two_stage;
  tc.fine_tune = t.fine_tune;
  tc.recipe = t.recipe;
  tc.refine = t.refine;
  tc.seed = cfg.seed;
  const TwoStageTrainResult result = train_two_stage(data1, data2, tc);
  save_bundle(t.out, result.model, BundleInfo{cfg.digest(), cfg.seed, result.trace1, result.trace2});
  if (!f.quiet) {
    out << "train: network=" << (t.two_stage ? "two_stage" : "single") << " fine_tuned=" << std::boolalpha
        << result.model.fine_tuned << " stage1_frames=" << data1.entries.size();
    if (t.two_stage) out << " stage2_frames=" << data2.entries.size();
    if (!result.trace1.empty()) out << " loss1=" << result.trace1.back().mean_loss;
    if (!result.trace2.empty()) out << " loss2=" << result.trace2.back().mean_loss;
    out << " skipped=" << result.skipped_frames << " bundle=" << t.out.string() << "\n";
  }
  return kExitOk;
}

std::vector<Pose> load_predictions(const fs::path& path) {
  std::vector<Pose> poses;
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const auto flat = j.at("pose").get<std::vector<double>>();
      if (flat.empty() || flat.size() % 3 != 0) throw ConfigError("pose length must be a multiple of 3");
      poses.push_back(Pose::from_flat(flat));
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return poses;
}

int cmd_eval(const Flags& f, std::ostream& out) {
  EvalSettings s;
  if (!f.config.empty()) s = config_with_overrides(f, "eval").eval;
  if (!f.model.empty()) s.model = f.model;
  if (!f.predictions.empty()) s.predictions = f.predictions;
  if (!f.manifest.empty()) s.manifest = f.manifest;
  if (!f.split.empty()) s.split = f.split;
  if (!f.out.empty()) s.out = f.out;
  if (!f.model.empty() && f.predictions.empty()) s.predictions.clear();
  if (s.manifest.empty()) throw ConfigError("eval needs --manifest");
  if (s.out.empty()) throw ConfigError("eval needs --out");

  const DatasetManifest test = load_manifest(s.manifest);
  SplitSpec split;
  json provenance;
  if (!s.split.empty()) {
    split = load_split_spec(s.split);
    provenance["split"] = digest_of(json::parse(read_text(s.split)));
  }
  provenance["manifest"] = digest_of(json(read_text(s.manifest)));

  std::vector<Pose> preds;
  if (!s.predictions.empty()) {
    preds = load_predictions(s.predictions);
    provenance["predictions"] = digest_of(json(read_text(s.predictions)));
  } else {
    if (s.model.empty()) throw ConfigError("eval needs --model or --predictions");
    const TwoStageModel model = load_bundle(s.model);
    provenance["model"] = digest_of(json::parse(bundle_metadata(s.model)));
    for (const auto& e : test.entries) {
      if (e.pose.joints.size() != static_cast<std::size_t>(model.recipe.joint_count)) {
        throw ConfigError("model predicts " + std::to_string(model.recipe.joint_count) +
                          " joints but the test manifest has " + std::to_string(e.pose.joints.size()));
      }
    }
    preds = predict_manifest(model, test);
  }
  if (preds.size() != test.entries.size()) {
    throw ConfigError("got " + std::to_string(preds.size()) + " predictions for " +
                      std::to_string(test.entries.size()) + " test frames");
  }

  std::vector<Pose> gts;
  std::vector<FrameTags> tags;
  for (std::size_t i = 0; i < test.entries.size(); ++i) {
    const ManifestEntry& e = test.entries[i];
    if (preds[i].joints.size() != e.pose.joints.size()) {
      throw ConfigError("prediction " + std::to_string(i) + " has a different joint count than the ground truth");
    }
    gts.push_back(e.pose);
    tags.push_back(e.params ? tag_frame(*e.params, split) : FrameTags{});
  }
  const AxisReport report = axis_scores(preds, gts, tags);
  const std::string digest = digest_of(provenance);
  write_text(s.out / "report.json", report_json(report, digest));
  const std::string text = report_text(report);
  write_text(s.out / "report.txt", text);
  if (!f.quiet) out << text;
  return kExitOk;
}

DepthImage metric_patch(const Patch& p) {
  DepthImage img(p.resolution, p.resolution);
  for (int y = 0; y < p.resolution; ++y) {
    for (int x = 0; x < p.resolution; ++x) img.set(x, y, p.depth_of(p.at(x, y)));
  }
  return img;
}

json patch_info(const Patch& p) {
  return {{"resolution", p.resolution},
          {"center_mm", {p.center3d.x(), p.center3d.y(), p.center3d.z()}},
          {"cube_size_mm", p.cube_size}};
}

// Stage dumps use round-trip precision so the box can be rebuilt exactly.
std::string pose_text(const Pose& pose, bool exact = false) {
  std::ostringstream s;
  if (exact) {
    s << std::setprecision(17);
  } else {
    s << std::fixed << std::setprecision(6);
  }
  for (const Vec3& j : pose.joints) s << j.x() << " " << j.y() << " " << j.z() << "\n";
  return s.str();
}

int cmd_infer(const Flags& f, std::ostream& out) {
  if (f.model.empty() || f.image.empty()) throw ConfigError("infer needs --model and --image");
  if (f.mcp.empty() == f.box.empty()) throw ConfigError("infer needs exactly one of --mcp or --box");
  CameraIntrinsics k;
  if (!f.camera.empty()) {
    const auto c = parse_numbers(f.camera, 4, "--camera");
    k = {c[0], c[1], c[2], c[3]};
    try {
      k.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--camera: ") + e.what());
    }
  }
  Hint hint;
  if (!f.mcp.empty()) {
    const auto m = parse_numbers(f.mcp, 3, "--mcp");
    hint = Vec3(m[0], m[1], m[2]);
  } else {
    const auto b = parse_numbers(f.box, 4, "--box");
    hint = BoxHint{b[0], b[1], b[2], b[3]};
  }
  const TwoStageModel model = load_bundle(f.model);
  const DepthImage img = read_pgm(f.image);
  const InferenceResult result = infer_two_stage(model, img, hint, k);
  const std::string text = pose_text(result.pose);
  if (!f.quiet || !f.dump_stages) out << text;

  if (f.dump_stages) {
    const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
    write_pgm(dir / "patch1.pgm", metric_patch(result.patch1));
    json info = {{"patch1", patch_info(result.patch1)}, {"refine_fallback", result.refine_fallback}};
    if (result.patch2) {
      write_pgm(dir / "patch2.pgm", metric_patch(*result.patch2));
      info["patch2"] = patch_info(*result.patch2);
    }
    write_text(dir / "stage1_pose.txt", pose_text(result.stage1, true));
    write_text(dir / "pose.txt", text);
    write_text(dir / "patches.json", info.dump(2) + "\n");
  }
  return kExitOk;
}

void print_histogram(std::ostream& out, const std::string& title, const std::map<std::string, std::size_t>& h) {
  out << title << ":";
  if (h.empty()) out << " (none)";
  out << "\n";
  for (const auto& [key, count] : h) out << "  " << std::left << std::setw(20) << key << count << "\n";
}

int cmd_inspect(const Flags& f, std::ostream& out) {
  const fs::path path(f.inspect_path);
  if (!fs::exists(path)) throw IoError("cannot read '" + path.string() + "'");
  if (fs::is_directory(path)) {
    const std::string meta_text = bundle_metadata(path);
    const json meta = json::parse(meta_text);
    out << "bundle: " << path.string() << "\n";
    out << "network: " << meta.value("network", "?") << "\n";
    out << "fine_tuned: " << std::boolalpha << meta.value("fine_tuned", false) << "\n";
    if (meta.contains("layer_sizes")) out << "layer_sizes: " << meta.at("layer_sizes").dump() << "\n";
    if (meta.contains("seeds")) out << "seeds: " << meta.at("seeds").dump() << "\n";
    out << "config_digest: " << meta.value("config_digest", "") << "\n";
    out << "metadata_digest: " << digest_of(meta) << "\n";
    return kExitOk;
  }
  const DatasetManifest m = load_manifest(path, false);
  out << "manifest: " << path.string() << "\n";
  out << "frames: " << m.entries.size() << "\n";
  print_histogram(out, "strategies", m.strategy_histogram());
  print_histogram(out, "splits", m.split_histogram());
  out << "digest: " << digest_of(json(read_text(path))) << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"handforge: synthetic hand depth data, two-stage pose training and evaluation"};
  app.require_subcommand(1);
  Flags f;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", f.config, "run configuration (JSON)");
    if (config_required) c->required();
    sub->add_option("--seed", seed, "master seed, overrides the config");
    sub->add_option("--out", f.out, "output directory");
    sub->add_flag("--quiet", f.quiet, "suppress the summary output");
  };

  auto* synth = app.add_subcommand("synth", "generate corpora, datasets and manifests");
  common(synth, true);
  auto* train = app.add_subcommand("train", "train a single- or two-stage model bundle");
  common(train, true);
  train->add_flag("--no-finetune", f.no_finetune, "initialize Net2 from scratch instead of Net1");
  auto* eval = app.add_subcommand("eval", "score a model or prediction file on a test manifest");
  common(eval, false);
  eval->add_option("--model", f.model, "model bundle directory");
  eval->add_option("--predictions", f.predictions, "JSON lines with a \"pose\" array per frame");
  eval->add_option("--manifest", f.manifest, "test manifest");
  eval->add_option("--split", f.split, "split spec JSON");
  auto* infer = app.add_subcommand("infer", "estimate the pose in one depth image");
  infer->add_option("--model", f.model, "model bundle directory")->required();
  infer->add_option("--image", f.image, "16-bit PGM depth image")->required();
  infer->add_option("--mcp", f.mcp, "middle-MCP location x,y,z in mm");
  infer->add_option("--box", f.box, "hand box u0,v0,u1,v1 in pixels");
  infer->add_option("--camera", f.camera, "intrinsics fx,fy,cx,cy");
  infer->add_option("--out", f.out, "directory for --dump-stages output");
  infer->add_flag("--dump-stages", f.dump_stages, "write both patches and the stage-1 pose");
  infer->add_flag("--quiet", f.quiet, "do not print the pose when dumping");
  auto* inspect = app.add_subcommand("inspect", "summarize a manifest or model bundle");
  inspect->add_option("path", f.inspect_path, "manifest file or bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (synth->count("--seed") || train->count("--seed") || eval->count("--seed")) f.seed = seed;

  try {
    if (*synth) return cmd_synth(f, out);
    if (*train) return cmd_train(f, out);
    if (*eval) return cmd_eval(f, out);
    if (*infer) return cmd_infer(f, out);
    if (*inspect) return cmd_inspect(f, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const TrainingError& e) {
    err << "training error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const InferenceError& e) {
    err << "inference error: " << e.what() << "\n";
    return kExitInference;
  } catch (const EmptyPatchError& e) {
    err << "inference error: " << e.what() << "\n";
    return kExitInference;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace handforge::cli

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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [work_dir]

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/commands.hpp"
#include "handforge/augment.hpp"
#include "handforge/eval.hpp"
#include "handforge/pgm.hpp"
#include "handforge/regressor.hpp"
#include "handforge/wing_loss.hpp"
#include "test_support.hpp"
#include "toy_benchmark.hpp"

namespace fs = std::filesystem;
using namespace handforge;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

// ---- 1: geometry -------------------------------------------------------------

const CameraIntrinsics kCam64{70.0, 70.0, 31.5, 31.5};

DepthImage cluttered_frame(std::mt19937_64& rng, const Pose& pose) {
  std::uniform_real_distribution<double> jitter(-40, 40), far(600, 900), u01(0, 1);
  std::vector<double> d(64 * 64, 0.0);
  const double z = pose.joints.front().z();
  for (double& px : d) {
    const double roll = u01(rng);
    px = roll < 0.1 ? 0.0 : roll < 0.6 ? z + jitter(rng) : far(rng);
  }
  return DepthImage(64, 64, d);
}

Outcome geometry() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst_rt = 0.0;
  std::uniform_real_distribution<double> xy(-400, 400), z(50, 3000), f(200, 900), c(50, 400);
  for (int i = 0; i < 10000; ++i) {
    const CameraIntrinsics k{f(rng), f(rng), c(rng), c(rng)};
    const Vec3 pt(xy(rng), xy(rng), z(rng));
    const PixelDepth p = project(pt, k);
    const Vec3 back = backproject(p.u, p.v, p.z, k);
    for (int a = 0; a < 3; ++a) worst_rt = std::max(worst_rt, testing::rel_error(back[a], pt[a]));
  }

  int frames = 0, mismatches = 0;
  for (; frames < 60; ++frames) {
    const Pose pose = testing::random_pose(rng, 21, 50.0, 500.0);
    const DepthImage img = cluttered_frame(rng, pose);
    const auto ob = testing::oracle_expand(testing::oracle_pose_box(pose), 30, 30, 30, 20);
    const DepthImage filtered(64, 64, testing::oracle_filter(img, ob, kCam64.fx, kCam64.fy, kCam64.cx, kCam64.cy));
    const Vec3 center(0.5 * (ob.lo[0] + ob.hi[0]), 0.5 * (ob.lo[1] + ob.hi[1]), 0.5 * (ob.lo[2] + ob.hi[2]));
    const double cube = std::max({ob.hi[0] - ob.lo[0], ob.hi[1] - ob.lo[1], ob.hi[2] - ob.lo[2]});
    const Patch expect = crop_patch(filtered, center, cube, kCam64, 64);
    const Patch got = refine_patch(img, pose, RefineConfig{}, kCam64, 64);
    for (std::size_t i = 0; i < expect.values.size(); ++i) mismatches += got.values[i] != expect.values[i];
    const DepthImage direct = filter_to_box(img, expand_bbox(pose_bbox(pose), RefineConfig{}), kCam64);
    for (std::size_t i = 0; i < filtered.data().size(); ++i) mismatches += direct.data()[i] != filtered.data()[i];
  }

  int box_mismatches = 0;
  std::uniform_real_distribution<double> pos(-300, 300), ext(0, 200), off(0, 60);
  for (int i = 0; i < 1000; ++i) {
    const double x0 = pos(rng), y0 = pos(rng), z0 = 400 + pos(rng);
    const CropBox box{{x0, x0 + ext(rng)}, {y0, y0 + ext(rng)}, {z0, z0 + ext(rng)}};
    const RefineConfig cfg{off(rng), off(rng), off(rng), off(rng)};
    const testing::OracleBox o{{box.x.min, box.y.min, box.z.min}, {box.x.max, box.y.max, box.z.max}};
    const auto e = testing::oracle_expand(o, cfg.x_offset, cfg.y_offset, cfg.z_offset, cfg.z_thickness);
    box_mismatches += !(expand_bbox(box, cfg) == CropBox{{e.lo[0], e.hi[0]}, {e.lo[1], e.hi[1]}, {e.lo[2], e.hi[2]}});
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst_rt <= 1e-9 && mismatches == 0 && box_mismatches == 0 && secs < 60.0;
  o.detail = "round trip max rel " + fmt(worst_rt) + ", refine mismatches " + std::to_string(mismatches) + " over " +
             std::to_string(frames) + " frames, expand mismatches " + std::to_string(box_mismatches) + ", " +
             fmt(secs, 3) + " s";
  return o;
}

// ---- 2: wing loss and backward ---------------------------------------------

std::vector<double> oracle_forward(const RegressorParams& p, const std::vector<double>& x) {
  std::vector<double> a = x;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& W = p.layers[l].weight;
    std::vector<double> z(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      double s = p.layers[l].bias[i];
      for (Eigen::Index j = 0; j < W.cols(); ++j) s += W(i, j) * a[static_cast<std::size_t>(j)];
      z[static_cast<std::size_t>(i)] = l + 1 < p.layers.size() ? std::max(0.0, s) : s;
    }
    a = std::move(z);
  }
  return a;
}

Outcome wing_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  // Knee continuity: both branch formulas evaluated at |v| = w.
  double knee_gap = 0.0;
  for (const WingConfig cfg : {WingConfig{100.0, 7.5}, WingConfig{0.4, 7.5}, WingConfig{10.0, 2.0}}) {
    const double log_branch = cfg.w * std::log1p(cfg.w / cfg.epsilon);
    knee_gap = std::max(knee_gap, std::abs(wing_value(cfg.w, cfg) - log_branch) / cfg.w);
    knee_gap = std::max(knee_gap, std::abs(wing_value(std::nextafter(cfg.w, 0.0), cfg) - wing_value(cfg.w, cfg)) / cfg.w);
  }

  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> coord(-120.0, 120.0);
  int trials = 0;
  double worst_loss = 0.0;
  while (trials < 1000) {
    const WingConfig cfg = trials % 2 ? WingConfig{100.0, 7.5} : WingConfig{0.4, 7.5};
    const double scale = trials % 2 ? 1.0 : 0.004;
    std::vector<double> pred(63), gt(63);
    for (auto& v : pred) v = coord(rng) * scale;
    for (auto& v : gt) v = coord(rng) * scale;
    bool smooth = true;
    for (int j = 0; j < 21; ++j) {
      double r2 = 0;
      for (int a = 0; a < 3; ++a) r2 += std::pow(pred[3 * j + a] - gt[3 * j + a], 2);
      smooth = smooth && std::abs(std::sqrt(r2) - cfg.w) > 1e-3 * cfg.w;
    }
    if (!smooth) continue;
    std::vector<double> grad(63), fd(63);
    wing_loss_flat(pred, gt, cfg, grad);
    const double h = 1e-6 * scale;
    for (std::size_t i = 0; i < 63; ++i) {
      auto plus = pred, minus = pred;
      plus[i] += h;
      minus[i] -= h;
      fd[i] = (testing::oracle_wing_loss(plus, gt, cfg.w, cfg.epsilon) -
               testing::oracle_wing_loss(minus, gt, cfg.w, cfg.epsilon)) /
              (2 * h);
    }
    worst_loss = std::max(worst_loss, testing::rel_vec_error(grad, fd));
    ++trials;
  }

  const std::vector<int> sizes{9, 12, 8, 6};
  double worst_net = 0.0;
  std::size_t params = 0;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int instance = 0; instance < 20; ++instance) {
    RegressorParams p = init_regressor(sizes, 300 + instance);
    for (auto& layer : p.layers) {
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = 0.3 * u(rng);
    }
    params = p.parameter_count();
    const WingConfig cfg = instance % 2 ? WingConfig{0.4, 7.5} : WingConfig{2.0, 0.5};
    std::vector<double> x(9), target(6);
    for (auto& v : x) v = u(rng);
    for (auto& v : target) v = u(rng);
    const auto analytic = backward(p, x, target, cfg).grad.flatten();
    const auto theta = p.flatten();
    std::vector<double> fd(theta.size());
    RegressorParams q = p;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto t = theta;
      t[i] = theta[i] + 1e-6;
      q.assign(t);
      const double up = testing::oracle_wing_loss(oracle_forward(q, x), target, cfg.w, cfg.epsilon);
      t[i] = theta[i] - 1e-6;
      q.assign(t);
      const double down = testing::oracle_wing_loss(oracle_forward(q, x), target, cfg.w, cfg.epsilon);
      fd[i] = (up - down) / 2e-6;
    }
    worst_net = std::max(worst_net, testing::rel_vec_error(analytic, fd));
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = knee_gap <= 4 * std::numeric_limits<double>::epsilon() && worst_loss <= 1e-5 && worst_net <= 1e-4 &&
           params <= 500 && secs < 120.0;
  o.detail = "knee gap " + fmt(knee_gap) + ", loss grad max rel " + fmt(worst_loss) + " over 1000, network (" +
             std::to_string(params) + " params) max rel " + fmt(worst_net) + " over 20, " + fmt(secs, 3) + " s";
  return o;
}

// ---- 3: blend ----------------------------------------------------------------

Outcome blend_suite() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> depth(1, 2000);
  std::bernoulli_distribution hole(0.4);
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> s(64 * 48), r(64 * 48);
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] = hole(rng) ? 0.0 : depth(rng);
      r[k] = hole(rng) ? 0.0 : depth(rng);
    }
    const DepthImage out = blend(DepthImage(64, 48, s), DepthImage(64, 48, r));
    const auto expect = testing::oracle_blend(s, r);
    for (std::size_t k = 0; k < s.size(); ++k) mismatches += out.data()[k] != expect[k];
  }
  std::vector<double> s(64 * 48), r(64 * 48);
  for (auto& v : s) v = depth(rng);
  for (auto& v : r) v = depth(rng);
  const DepthImage real(64, 48, r), syn(64, 48, s);
  const bool zero_case = blend(DepthImage(64, 48), real) == real;
  const bool full_case = blend(syn, real) == syn;
  Outcome o;
  o.pass = mismatches == 0 && zero_case && full_case;
  o.detail = "oracle mismatches " + std::to_string(mismatches) + " over 100 pairs, all-zero synthetic " +
             (zero_case ? "exact" : "differs") + ", all-positive synthetic " + (full_case ? "exact" : "differs");
  return o;
}

// ---- 4: determinism ------------------------------------------------------------

int cli(std::vector<std::string> args, std::string* err = nullptr) {
  args.insert(args.begin(), "handforge");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, e);
  if (err) *err = e.str();
  return code;
}

std::map<std::string, std::vector<std::uint8_t>> tree(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  if (!fs::exists(root)) return files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_file_bytes(e.path());
  }
  return files;
}

Outcome determinism(const fs::path& work) {
  const fs::path dir = work / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const json cfg = {
      {"seed", 31},
      {"out", "run"},
      {"synth", {{"corpus_size", 60}, {"test_size", 20}, {"counts", {{"RD", 60}, {"SD", 60}, {"MD", 30}, {"ND", 40}}}}},
      {"split", {{"viewpoint_cones", {{{"axis_wxyz", {1, 0, 0, 0}}, {"radius_rad", 0.2}}}}, {"shape_ids", {3}}}},
      {"train",
       {{"recipe", {{"patch_res", 64}, {"input_res", 16}}},
        {"stage1", {{"epochs", 3}, {"batch_size", 32}}},
        {"stage2", {{"epochs", 3}, {"batch_size", 32}}}}}};
  std::ofstream(dir / "cfg.json") << cfg.dump(2);
  const std::string c = (dir / "cfg.json").string();

  std::vector<std::string> failures;
  std::map<std::string, std::size_t> sizes;
  std::map<std::string, std::vector<std::uint8_t>> first[3];
  const char* names[3] = {"synth", "train", "eval"};
  const fs::path outputs[3] = {dir / "run", dir / "run/model", dir / "run/eval"};
  for (int round = 0; round < 2; ++round) {
    fs::remove_all(dir / "run");
    for (int step = 0; step < 3; ++step) {
      std::string err;
      if (const int code = cli({names[step], "--config", c, "--quiet"}, &err); code != 0) {
        return {false, std::string(names[step]) + " exited " + std::to_string(code) + ": " + err};
      }
      auto files = tree(outputs[step]);
      if (step == 0) {  // synth compares its own outputs only
        std::erase_if(files, [](const auto& kv) { return kv.first.starts_with("model") || kv.first.starts_with("eval"); });
      }
      if (round == 0) {
        first[step] = std::move(files);
        sizes[names[step]] = first[step].size();
      } else if (files != first[step]) {
        failures.push_back(names[step]);
      }
    }
  }
  Outcome o;
  o.pass = failures.empty() && sizes["synth"] > 0 && sizes["train"] > 0 && sizes["eval"] > 0;
  o.detail = "byte-identical reruns: synth " + std::to_string(sizes["synth"]) + " files, train " +
             std::to_string(sizes["train"]) + " files, eval " + std::to_string(sizes["eval"]) + " files";
  for (const auto& f : failures) o.detail += "; " + f + " differs";
  return o;
}

// ---- 5-7: toy benchmark orderings ------------------------------------------------

struct ToyRun {
  std::map<std::string, double> err;
  double seconds = 0.0;
  std::string failure;
};

std::string ratio_text(const std::string& a, const std::string& b, double ra, double rb, double bound) {
  return a + "/" + b + " = " + fmt(ra) + "/" + fmt(rb) + " = " + fmt(ra / rb) + " (<= " + fmt(bound) + ")";
}

Outcome table3(const ToyRun& t) {
  if (!t.failure.empty()) return {false, t.failure};
  const auto& e = t.err;
  Outcome o;
  const bool a = e.at("ts_full") <= 0.95 * e.at("ss_full");
  const bool b = e.at("ss_full") <= 0.97 * e.at("ss_rd");
  const bool c = e.at("ts_rd") <= 0.97 * e.at("ss_rd");
  const bool budget = t.seconds < 1800.0;
  o.pass = a && b && c && budget;
  o.detail = ratio_text("TS-full", "SS-full", e.at("ts_full"), e.at("ss_full"), 0.95) + "; " +
             ratio_text("SS-full", "SS-RD", e.at("ss_full"), e.at("ss_rd"), 0.97) + "; " +
             ratio_text("TS-RD", "SS-RD", e.at("ts_rd"), e.at("ss_rd"), 0.97) + "; benchmark " + fmt(t.seconds, 4) +
             " s";
  return o;
}

// Fine-tuned against freshly initialized stage 2, both on real frames only; the full-mix pair is reported too.
Outcome table4(const ToyRun& t) {
  if (!t.failure.empty()) return {false, t.failure};
  const auto& e = t.err;
  Outcome o;
  o.pass = e.at("ts_rd") <= 0.97 * e.at("ts_rd_noft") && t.seconds < 1800.0;
  o.detail = ratio_text("TS-finetuned", "TS-fresh", e.at("ts_rd"), e.at("ts_rd_noft"), 0.97) +
             " on RD; full mix " + fmt(e.at("ts_full")) + "/" + fmt(e.at("ts_full_noft")) + " = " +
             fmt(e.at("ts_full") / e.at("ts_full_noft")) + " (not gated)";
  return o;
}

Outcome table5(const ToyRun& t) {
  if (!t.failure.empty()) return {false, t.failure};
  const auto& e = t.err;
  const double base = e.at("ts_base");
  std::string best;
  for (const char* s : {"ts_base_nd_all", "ts_base_nd_camera", "ts_base_nd_articulation", "ts_base_nd_shape"}) {
    if (e.at(s) < base && (best.empty() || e.at(s) < e.at(best))) best = s;
  }
  Outcome o;
  o.pass = e.at("ts_base_nd_all") <= 1.02 * base && !best.empty();
  o.detail = ratio_text("with ND(all)", "without ND", e.at("ts_base_nd_all"), base, 1.02) + "; subsets:";
  for (const char* s : {"camera", "articulation", "shape"}) {
    o.detail += std::string(" ") + s + " " + fmt(e.at(std::string("ts_base_nd_") + s));
  }
  o.detail += best.empty() ? "; no subset improves" : "; best " + best;
  return o;
}

// ---- 8: evaluation -------------------------------------------------------------

Pose shifted(const Pose& p, const Vec3& d) {
  Pose out = p;
  for (Vec3& j : out.joints) j += d;
  return out;
}

Outcome evaluation() {
  SplitSpec spec;
  spec.cones.push_back({Eigen::Vector4d(std::cos(0.6), 0, 0, std::sin(0.6)), 0.3});
  spec.regions.push_back({{{10, 0.8, 1.2}}});
  spec.shape_ids = {7};
  std::mt19937_64 rng(808);
  // Interpolation frame off by (0,0,4), viewpoint-only frame off by (6,8,0).
  const std::vector<Pose> gts{testing::random_pose(rng, 21), testing::random_pose(rng, 21)};
  const std::vector<Pose> preds{shifted(gts[0], {0, 0, 4}), shifted(gts[1], {6, 8, 0})};
  HandParams seen;
  seen.subject = 1;
  HandParams rotated = seen;
  rotated.cam_rotation = spec.cones[0].axis_wxyz;
  const std::vector<HandParams> params{seen, rotated};
  const AxisReport r = axis_scores(preds, gts, tag_frames(params, spec));
  const auto near = [](const std::optional<double>& v, double x) { return v && std::abs(*v - x) <= 1e-12; };
  const bool fixture = near(r.overall.error_mm, 7.0) && near(r.interpolation.error_mm, 4.0) &&
                       near(r.extrapolation.error_mm, 10.0) && near(r.viewpoint.error_mm, 10.0) &&
                       !r.articulation.error_mm && !r.shape.error_mm;

  const AxisReport perfect = axis_scores(gts, gts, tag_frames(params, spec));
  bool zeros = true;
  for (const AxisScore* a : {&perfect.overall, &perfect.extrapolation, &perfect.interpolation, &perfect.articulation,
                             &perfect.viewpoint, &perfect.shape}) {
    if (a->error_mm) zeros = zeros && *a->error_mm == 0.0;
  }

  std::vector<Pose> pa, ga;
  std::vector<HandParams> hp;
  std::uniform_int_distribution<int> subj(0, 9);
  std::uniform_real_distribution<double> art(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    ga.push_back(testing::random_pose(rng, 21));
    pa.push_back(testing::random_pose(rng, 21));
    HandParams p;
    p.subject = subj(rng);
    p.articulation[10] = art(rng);
    hp.push_back(p);
  }
  const AxisReport big = axis_scores(pa, ga, tag_frames(hp, spec));
  const double ni = static_cast<double>(big.interpolation.frames), ne = static_cast<double>(big.extrapolation.frames);
  const double weighted = (ni * *big.interpolation.error_mm + ne * *big.extrapolation.error_mm) / (ni + ne);
  const double gap = std::abs(*big.overall.error_mm - weighted);

  Outcome o;
  o.pass = fixture && zeros && gap <= 1e-12 && ni > 0 && ne > 0;
  o.detail = std::string("two-frame fixture ") + (fixture ? "exact" : "wrong") + ", perfect oracle " +
             (zeros ? "0.00 on all present axes" : "nonzero") + ", partition gap " + fmt(gap) + " (" +
             fmt(ni, 4) + " interp + " + fmt(ne, 4) + " extrap frames)";
  return o;
}

// ---- 9: renderer -----------------------------------------------------------------

Outcome renderer() {
  const CameraIntrinsics k{475.0, 475.0, 160.0, 120.0};
  const double c[3] = {20.0, -10.0, 500.0};
  const Capsule sphere{Vec3(c[0], c[1], c[2]), Vec3(c[0], c[1], c[2]), 40.0};
  const DepthImage img = render_capsules(std::vector<Capsule>{sphere}, k, 320, 240);
  double worst = 0.0;
  int hits = 0;
  for (int v = 0; v < 240; ++v) {
    for (int u = 0; u < 320; ++u) {
      const double expect = testing::oracle_sphere_depth(u, v, k.fx, k.fy, k.cx, k.cy, c, 40.0);
      worst = std::max(worst, std::abs(img.at(u, v) - expect));
      hits += expect > 0.0;
    }
  }
  const SkeletonTopology& topo = default_topology();
  int violations = 0, checked = 0;
  for (int i = 0; i < 100; ++i) {
    const HandParams p = testing::random_hand(900 + i);
    const Pose pose = camera_pose(p, topo);
    const DepthImage d = render_params(p, topo, k, 320, 240);
    for (const Vec3& j : pose.joints) {
      const int u = static_cast<int>(std::lround(k.fx * j.x() / j.z() + k.cx));
      const int v = static_cast<int>(std::lround(k.fy * j.y() / j.z() + k.cy));
      if (!d.contains(u, v)) continue;
      ++checked;
      violations += !(d.at(u, v) > 0.0 && d.at(u, v) <= j.z());
    }
  }
  Outcome o;
  o.pass = worst <= 1e-6 && hits > 0 && violations == 0 && checked > 0;
  o.detail = "sphere max abs error " + fmt(worst) + " mm over " + std::to_string(hits) + " pixels, skin-in-front " +
             std::to_string(violations) + " violations over " + std::to_string(checked) + " joints on 100 hands";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = fs::absolute(argc > 1 ? argv[1] : "acceptance_work");
  fs::create_directories(work);

  std::map<int, Outcome> results;
  std::map<int, std::string> titles{{1, "geometry oracle suite"},
                                    {2, "wing loss and backward suite"},
                                    {3, "blend suite"},
                                    {4, "determinism suite"},
                                    {5, "two-stage and augmentation orderings"},
                                    {6, "fine-tuning ordering"},
                                    {7, "parameter-noise ordering"},
                                    {8, "evaluation correctness"},
                                    {9, "renderer correctness"}};
  const auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };
  results[1] = guarded(geometry);
  results[2] = guarded(wing_suite);
  results[3] = guarded(blend_suite);
  results[4] = guarded([&] { return determinism(work); });
  results[8] = guarded(evaluation);
  results[9] = guarded(renderer);

  ToyRun toy;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const fs::path dir = work / "toy";
    fs::remove_all(dir);
    const acceptance::ToyBenchmark bench = acceptance::build_toy_benchmark(dir, std::cerr);
    toy.err = acceptance::run_toy_arms(bench, std::cerr);
  } catch (const std::exception& e) {
    toy.failure = std::string("toy benchmark failed: ") + e.what();
  }
  toy.seconds = seconds_since(t0);
  results[5] = guarded([&] { return table3(toy); });
  results[6] = guarded([&] { return table4(toy); });
  results[7] = guarded([&] { return table5(toy); });

  json summary = json::object();
  bool all = true;
  for (const auto& [n, r] : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << n << " (" << titles[n] << "): " << r.detail << "\n";
    summary[std::to_string(n)] = {{"pass", r.pass}, {"detail", r.detail}};
    all = all && r.pass;
  }
  summary["toy_errors_mm"] = toy.err;
  std::ofstream(work / "acceptance.json") << summary.dump(2) << "\n";
  return all ? 0 : 1;
}

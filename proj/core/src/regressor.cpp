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

#include "handforge/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "handforge/error.hpp"
#include "handforge/seed.hpp"

namespace handforge {

namespace {

constexpr std::uint64_t kInitStream = 0x1A17ull;
constexpr std::uint64_t kShuffleStream = 0x5F1Eull;

struct Activations {
  std::vector<Eigen::MatrixXd> pre;   // z_l
  std::vector<Eigen::MatrixXd> post;  // a_l, post[0] = input
};

Activations run_forward(const RegressorParams& params, const Eigen::MatrixXd& inputs) {
  Activations act;
  act.post.push_back(inputs);
  const std::size_t n = params.layers.size();
  for (std::size_t l = 0; l < n; ++l) {
    const DenseLayer& layer = params.layers[l];
    Eigen::MatrixXd z = layer.weight * act.post.back();
    z.colwise() += layer.bias;
    act.pre.push_back(z);
    if (l + 1 < n) {
      act.post.push_back(z.cwiseMax(0.0));
    } else {
      act.post.push_back(std::move(z));
    }
  }
  return act;
}

void check_input(const RegressorParams& params, Eigen::Index rows) {
  if (rows != params.input_size()) throw DomainError("regressor input size does not match the input layer");
}

}  // namespace

void RegressorParams::validate() const {
  require(sizes.size() >= 2, "regressor needs at least an input and an output layer");
  require(layers.size() + 1 == sizes.size(), "layer count does not match layer sizes");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    require(sizes[l] > 0 && sizes[l + 1] > 0, "layer sizes must be positive");
    require(layers[l].weight.rows() == sizes[l + 1] && layers[l].weight.cols() == sizes[l],
            "weight matrix shape disagrees with layer sizes");
    require(layers[l].bias.size() == sizes[l + 1], "bias length disagrees with layer sizes");
    require(layers[l].weight.allFinite() && layers[l].bias.allFinite(), "regressor parameters must be finite");
  }
}

std::size_t RegressorParams::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<double> RegressorParams::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const DenseLayer& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(l.bias[r]);
  }
  return out;
}

void RegressorParams::assign(std::span<const double> flat) {
  require(flat.size() == parameter_count(), "flat parameter vector has the wrong length");
  std::size_t i = 0;
  for (DenseLayer& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[i++];
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = flat[i++];
  }
}

RegressorParams RegressorParams::zeros_like(const RegressorParams& other) {
  RegressorParams z;
  z.sizes = other.sizes;
  for (const DenseLayer& l : other.layers) {
    z.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  }
  return z;
}

bool identical(const RegressorParams& a, const RegressorParams& b) {
  if (a.sizes != b.sizes || a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].weight != b.layers[l].weight || a.layers[l].bias != b.layers[l].bias) return false;
  }
  return true;
}

std::vector<int> default_layer_sizes(int input_res, int joint_count) {
  return {input_res * input_res, 256, 128, 3 * joint_count};
}

RegressorParams init_regressor(std::span<const int> sizes, std::uint64_t seed) {
  require(sizes.size() >= 2, "regressor needs at least an input and an output layer");
  RegressorParams p;
  p.sizes.assign(sizes.begin(), sizes.end());
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l];
    const int fan_out = sizes[l + 1];
    require(fan_in > 0 && fan_out > 0, "layer sizes must be positive");
    std::mt19937_64 rng(derive_seed(seed, kInitStream, l));
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weight(r, c) = dist(rng);
    }
    p.layers.push_back(std::move(layer));
  }
  return p;
}

Eigen::MatrixXd forward_batch(const RegressorParams& params, const Eigen::MatrixXd& inputs) {
  check_input(params, inputs.rows());
  return run_forward(params, inputs).post.back();
}

Eigen::VectorXd forward(const RegressorParams& params, std::span<const double> input) {
  check_input(params, static_cast<Eigen::Index>(input.size()));
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  return run_forward(params, x).post.back().col(0);
}

int input_resolution(const RegressorParams& params) {
  const int res = static_cast<int>(std::lround(std::sqrt(static_cast<double>(params.input_size()))));
  if (res * res != params.input_size()) throw DomainError("input layer is not a square patch");
  return res;
}

Eigen::VectorXd forward(const RegressorParams& params, const Patch& patch) {
  const int res = input_resolution(params);
  if (res > patch.resolution) throw DomainError("patch is smaller than the network input");
  const std::vector<double> x = network_input(patch, res);
  return forward(params, x);
}

LossAndGrad backward_batch(const RegressorParams& params, const Eigen::MatrixXd& inputs,
                           const Eigen::MatrixXd& targets, const WingConfig& cfg) {
  check_input(params, inputs.rows());
  if (targets.rows() != params.output_size() || targets.cols() != inputs.cols()) {
    throw DomainError("target shape does not match the output layer");
  }
  require(inputs.cols() > 0, "empty batch");
  const Activations act = run_forward(params, inputs);
  const Eigen::MatrixXd& out = act.post.back();
  const Eigen::Index batch = inputs.cols();
  const double inv_b = 1.0 / static_cast<double>(batch);

  LossAndGrad result;
  result.grad = RegressorParams::zeros_like(params);
  Eigen::MatrixXd delta(out.rows(), batch);
  std::vector<double> g(static_cast<std::size_t>(out.rows()));
  for (Eigen::Index b = 0; b < batch; ++b) {
    const std::span<const double> pred(out.col(b).data(), static_cast<std::size_t>(out.rows()));
    const std::span<const double> gt(targets.col(b).data(), static_cast<std::size_t>(targets.rows()));
    result.loss += wing_loss_flat(pred, gt, cfg, g);
    for (Eigen::Index r = 0; r < out.rows(); ++r) delta(r, b) = g[static_cast<std::size_t>(r)] * inv_b;
  }
  result.loss *= inv_b;

  for (std::size_t l = params.layers.size(); l-- > 0;) {
    DenseLayer& gl = result.grad.layers[l];
    gl.weight.noalias() = delta * act.post[l].transpose();
    gl.bias = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd prev = params.layers[l].weight.transpose() * delta;
      prev.array() *= (act.pre[l - 1].array() > 0.0).cast<double>();
      delta = std::move(prev);
    }
  }
  return result;
}

LossAndGrad backward(const RegressorParams& params, std::span<const double> input, std::span<const double> target,
                     const WingConfig& cfg) {
  check_input(params, static_cast<Eigen::Index>(input.size()));
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  const Eigen::MatrixXd t =
      Eigen::Map<const Eigen::VectorXd>(target.data(), static_cast<Eigen::Index>(target.size()));
  return backward_batch(params, x, t, cfg);
}

OptimizerState OptimizerState::for_params(const RegressorParams& params) {
  OptimizerState s;
  s.first_moment = RegressorParams::zeros_like(params);
  s.inf_norm = RegressorParams::zeros_like(params);
  return s;
}

void adamax_step(RegressorParams& params, const RegressorParams& grads, OptimizerState& state, double lr) {
  require(grads.sizes == params.sizes && state.first_moment.sizes == params.sizes, "optimizer shapes disagree");
  ++state.step;
  const double step_size = lr / (1.0 - std::pow(state.beta1, static_cast<double>(state.step)));
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double eps = state.epsilon;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto update = [&](auto& theta, const auto& g, auto& m, auto& u) {
      m.array() = b1 * m.array() + (1.0 - b1) * g.array();
      u.array() = (b2 * u.array()).max(g.array().abs());
      theta.array() -= step_size * m.array() / (u.array() + eps);
    };
    update(params.layers[l].weight, grads.layers[l].weight, state.first_moment.layers[l].weight,
           state.inf_norm.layers[l].weight);
    update(params.layers[l].bias, grads.layers[l].bias, state.first_moment.layers[l].bias,
           state.inf_norm.layers[l].bias);
  }
}

void TrainConfig::validate() const {
  require(batch_size >= 1, "batch size must be at least 1");
  require(learning_rate >= 0.0 && std::isfinite(learning_rate), "learning rate must be non-negative");
  require(epochs >= 0, "epoch count must be non-negative");
  require(lr_step_epochs >= 1, "lr step interval must be at least one epoch");
  require(lr_gamma > 0.0 && lr_gamma <= 1.0, "lr gamma must lie in (0, 1]");
  wing.validate();
}

double TrainConfig::lr_at(int epoch) const {
  return learning_rate * std::pow(lr_gamma, static_cast<double>(epoch / lr_step_epochs));
}

TrainResult fine_tune(const RegressorParams& base, const TrainingSet& data, const TrainConfig& cfg) {
  cfg.validate();
  base.validate();
  if (data.size() == 0) throw DomainError("cannot train on an empty dataset");
  if (data.inputs.rows() != base.input_size() || data.targets.rows() != base.output_size() ||
      data.targets.cols() != data.inputs.cols()) {
    throw DomainError("training set shape does not match the regressor");
  }

  TrainResult result{base, {}};
  OptimizerState state = OptimizerState::for_params(base);
  std::vector<Eigen::Index> order(data.size());
  const Eigen::Index batch = cfg.batch_size;
  Eigen::MatrixXd xb, yb;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(derive_seed(cfg.seed, kShuffleStream, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = cfg.lr_at(epoch);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch)) {
      const Eigen::Index n = std::min<Eigen::Index>(batch, static_cast<Eigen::Index>(order.size() - start));
      xb.resize(data.inputs.rows(), n);
      yb.resize(data.targets.rows(), n);
      for (Eigen::Index i = 0; i < n; ++i) {
        xb.col(i) = data.inputs.col(order[start + static_cast<std::size_t>(i)]);
        yb.col(i) = data.targets.col(order[start + static_cast<std::size_t>(i)]);
      }
      const LossAndGrad lg = backward_batch(result.params, xb, yb, cfg.wing);
      if (!std::isfinite(lg.loss)) throw TrainingError("training loss diverged to a non-finite value");
      loss_sum += lg.loss * static_cast<double>(n);
      adamax_step(result.params, lg.grad, state, lr);
    }
    result.trace.push_back({epoch + 1, loss_sum / static_cast<double>(data.size()), lr});
  }
  return result;
}

TrainResult train(const RegressorParams& init, const TrainingSet& data, const TrainConfig& cfg) {
  return fine_tune(init, data, cfg);
}

}  // namespace handforge

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
#include <span>
#include <vector>

#include <Eigen/Core>

#include "handforge/depth.hpp"
#include "handforge/wing_loss.hpp"

namespace handforge {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Fully connected regressor: ReLU hidden layers, identity output.
/// Also serves as the container for its own gradient.
struct RegressorParams {
  std::vector<int> sizes;  // input, hidden..., output
  std::vector<DenseLayer> layers;

  void validate() const;
  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
  std::size_t parameter_count() const;

  /// Layer by layer: weight row-major, then bias.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  static RegressorParams zeros_like(const RegressorParams& other);
};

bool identical(const RegressorParams& a, const RegressorParams& b);

/// Default layer layout for an input_res^2 patch and joint_count joints.
std::vector<int> default_layer_sizes(int input_res, int joint_count);

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
RegressorParams init_regressor(std::span<const int> sizes, std::uint64_t seed);

Eigen::VectorXd forward(const RegressorParams& params, std::span<const double> input);
/// Downsamples the patch to the input layer's square resolution first.
Eigen::VectorXd forward(const RegressorParams& params, const Patch& patch);
/// Column-per-sample batch.
Eigen::MatrixXd forward_batch(const RegressorParams& params, const Eigen::MatrixXd& inputs);

int input_resolution(const RegressorParams& params);

struct LossAndGrad {
  double loss = 0.0;
  RegressorParams grad;
};

/// Wing loss of one sample and its gradient over all parameters.
LossAndGrad backward(const RegressorParams& params, std::span<const double> input, std::span<const double> target,
                     const WingConfig& cfg);
/// Mean loss over the batch columns and the gradient of that mean.
LossAndGrad backward_batch(const RegressorParams& params, const Eigen::MatrixXd& inputs,
                           const Eigen::MatrixXd& targets, const WingConfig& cfg);

struct OptimizerState {
  RegressorParams first_moment;
  RegressorParams inf_norm;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static OptimizerState for_params(const RegressorParams& params);
};

/// m <- b1 m + (1 - b1) g; u <- max(b2 u, |g|); theta <- theta - lr / (1 - b1^t) * m / (u + eps)
void adamax_step(RegressorParams& params, const RegressorParams& grads, OptimizerState& state, double lr);

struct TrainConfig {
  int batch_size = 64;
  double learning_rate = 1e-3;
  int epochs = 30;
  int lr_step_epochs = 10;
  double lr_gamma = 0.3;
  std::uint64_t seed = 0;
  WingConfig wing{0.4, 7.5};

  void validate() const;
  double lr_at(int epoch) const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Network inputs and normalized targets, one column per sample.
struct TrainingSet {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;

  std::size_t size() const { return static_cast<std::size_t>(inputs.cols()); }
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  RegressorParams params;
  std::vector<EpochStats> trace;
};

/// Shuffled mini-batch Adamax with a step-wise learning-rate schedule.
TrainResult train(const RegressorParams& init, const TrainingSet& data, const TrainConfig& cfg);
/// train() starting from already trained weights.
TrainResult fine_tune(const RegressorParams& base, const TrainingSet& data, const TrainConfig& cfg);

}  // namespace handforge

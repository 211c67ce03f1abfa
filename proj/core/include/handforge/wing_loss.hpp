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

#include <span>
#include <vector>

#include "handforge/depth.hpp"

namespace handforge {

/// Wing loss knee width w and curvature limit epsilon.
struct WingConfig {
  double w = 100.0;
  double epsilon = 7.5;

  void validate() const;
  /// Offset that joins the logarithmic and linear branches at |v| = w.
  double linear_offset() const;
  friend bool operator==(const WingConfig&, const WingConfig&) = default;
};

/// Per-joint value for residual norm r.
double wing_value(double r, const WingConfig& cfg);

/// Mean over joints of wing_value(|p_i - q_i|).
double wing_loss(const Pose& pred, const Pose& gt, const WingConfig& cfg);

/// Gradient of wing_loss with respect to every predicted coordinate. A joint
/// with zero residual contributes a zero gradient.
std::vector<Vec3> wing_loss_grad(const Pose& pred, const Pose& gt, const WingConfig& cfg);

/// Same loss on flat xyz vectors. When grad is non-empty it receives d loss / d pred.
double wing_loss_flat(std::span<const double> pred, std::span<const double> gt, const WingConfig& cfg,
                      std::span<double> grad = {});

/// Mean squared joint distance; the L2 baseline.
double l2_loss(const Pose& pred, const Pose& gt);

}  // namespace handforge

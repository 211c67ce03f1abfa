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

#include "handforge/wing_loss.hpp"

#include <cmath>

#include "handforge/error.hpp"

namespace handforge {

void WingConfig::validate() const {
  require(std::isfinite(w) && w > 0.0, "wing width w must be positive");
  require(std::isfinite(epsilon) && epsilon > 0.0, "wing epsilon must be positive");
}

double WingConfig::linear_offset() const { return w - w * std::log1p(w / epsilon); }

double wing_value(double r, const WingConfig& cfg) {
  if (r < cfg.w) return cfg.w * std::log1p(r / cfg.epsilon);
  return r - cfg.linear_offset();
}

double wing_loss_flat(std::span<const double> pred, std::span<const double> gt, const WingConfig& cfg,
                      std::span<double> grad) {
  cfg.validate();
  if (pred.size() != gt.size()) throw DomainError("wing loss: joint count mismatch");
  require(pred.size() % 3 == 0 && !pred.empty(), "wing loss: expected a non-empty xyz vector");
  require(grad.empty() || grad.size() == pred.size(), "wing loss: gradient buffer has the wrong size");
  const std::size_t joints = pred.size() / 3;
  const double inv_n = 1.0 / static_cast<double>(joints);
  const double c = cfg.linear_offset();
  double total = 0.0;
  for (std::size_t j = 0; j < joints; ++j) {
    const double dx = pred[3 * j] - gt[3 * j];
    const double dy = pred[3 * j + 1] - gt[3 * j + 1];
    const double dz = pred[3 * j + 2] - gt[3 * j + 2];
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    double slope;  // d value / d r
    if (r < cfg.w) {
      total += cfg.w * std::log1p(r / cfg.epsilon);
      slope = cfg.w / (cfg.epsilon + r);
    } else {
      total += r - c;
      slope = 1.0;
    }
    if (!grad.empty()) {
      const double s = r > 0.0 ? slope * inv_n / r : 0.0;
      grad[3 * j] = s * dx;
      grad[3 * j + 1] = s * dy;
      grad[3 * j + 2] = s * dz;
    }
  }
  return total * inv_n;
}

double wing_loss(const Pose& pred, const Pose& gt, const WingConfig& cfg) {
  if (pred.size() != gt.size()) throw DomainError("wing loss: joint count mismatch");
  const auto p = pred.flatten();
  const auto q = gt.flatten();
  return wing_loss_flat(p, q, cfg);
}

std::vector<Vec3> wing_loss_grad(const Pose& pred, const Pose& gt, const WingConfig& cfg) {
  if (pred.size() != gt.size()) throw DomainError("wing loss: joint count mismatch");
  const auto p = pred.flatten();
  const auto q = gt.flatten();
  std::vector<double> g(p.size());
  wing_loss_flat(p, q, cfg, g);
  return Pose::from_flat(g).joints;
}

double l2_loss(const Pose& pred, const Pose& gt) {
  if (pred.size() != gt.size() || pred.empty()) throw DomainError("l2 loss: joint count mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < pred.size(); ++j) total += (pred.joints[j] - gt.joints[j]).squaredNorm();
  return total / static_cast<double>(pred.size());
}

}  // namespace handforge

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
#include <span>
#include <string>
#include <vector>

#include "handforge/regressor.hpp"

namespace handforge {

/// Checkpoint layout, all integers and floats little-endian:
///   "HFRG" magic, u32 version (1), u32 layer-size count L, L x u32 sizes,
///   then every parameter as float64 in RegressorParams::flatten() order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const RegressorParams& params);
RegressorParams decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const RegressorParams& params);
RegressorParams load_checkpoint(const std::filesystem::path& path);

/// CSV with header "epoch,mean_loss,lr".
std::string loss_trace_csv(std::span<const EpochStats> trace);
void save_loss_trace(const std::filesystem::path& path, std::span<const EpochStats> trace);

}  // namespace handforge

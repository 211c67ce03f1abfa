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
#include <string>
#include <vector>

#include "handforge/depth.hpp"

namespace handforge {

// Binary 16-bit PGM ("P5", maxval 65535, big-endian samples). Depths are
// rounded to the nearest millimeter on encode.
std::vector<std::uint8_t> encode_pgm(const DepthImage& img);
DepthImage decode_pgm(const std::vector<std::uint8_t>& bytes);

void write_pgm(const std::filesystem::path& path, const DepthImage& img);
DepthImage read_pgm(const std::filesystem::path& path);

// Rounds every depth to whole millimeters, i.e. what a PGM round trip yields.
DepthImage quantize_mm(const DepthImage& img);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace handforge

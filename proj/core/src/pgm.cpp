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

#include "handforge/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "handforge/error.hpp"

namespace handforge {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) out.push_back(static_cast<char>(bytes_[pos_++]));
    if (out.empty()) throw IoError("truncated PGM header");
    return out;
  }

  long number() {
    const std::string t = token();
    for (char c : t) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw IoError("malformed PGM header field '" + t + "'");
    }
    return std::stol(t);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw IoError("malformed PGM header terminator");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_pgm(const DepthImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n65535\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.data().size() * 2);
  for (double d : img.data()) {
    const auto sample = static_cast<std::uint16_t>(std::lround(d));
    out.push_back(static_cast<std::uint8_t>(sample >> 8));
    out.push_back(static_cast<std::uint8_t>(sample & 0xFF));
  }
  return out;
}

DepthImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
  HeaderReader reader(bytes);
  if (reader.token() != "P5") throw IoError("not a binary PGM (expected P5 magic)");
  const long width = reader.number();
  const long height = reader.number();
  const long maxval = reader.number();
  if (maxval <= 0 || maxval > 65535) throw IoError("PGM maxval must be in [1, 65535]");
  const std::size_t offset = reader.raster_offset();
  const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < offset + count * bytes_per_sample) throw IoError("truncated PGM raster");

  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t p = offset + i * bytes_per_sample;
    data[i] = bytes_per_sample == 1 ? bytes[p] : static_cast<double>((bytes[p] << 8) | bytes[p + 1]);
  }
  return DepthImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_pgm(const std::filesystem::path& path, const DepthImage& img) {
  write_file_bytes(path, encode_pgm(img));
}

DepthImage read_pgm(const std::filesystem::path& path) {
  try {
    return decode_pgm(read_file_bytes(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

DepthImage quantize_mm(const DepthImage& img) {
  std::vector<double> data(img.data().begin(), img.data().end());
  for (double& d : data) d = static_cast<double>(std::lround(d));
  return DepthImage(img.width(), img.height(), std::move(data));
}

}  // namespace handforge

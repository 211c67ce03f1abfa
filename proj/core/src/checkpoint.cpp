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

#include "handforge/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "handforge/error.hpp"
#include "handforge/pgm.hpp"

namespace handforge {

namespace {

constexpr char kMagic[4] = {'H', 'F', 'R', 'G'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return std::bit_cast<double>(v);
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw IoError("truncated checkpoint");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const RegressorParams& params) {
  params.validate();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.sizes.size()));
  for (int s : params.sizes) put_u32(out, static_cast<std::uint32_t>(s));
  for (double v : params.flatten()) put_f64(out, v);
  return out;
}

RegressorParams decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw IoError("not a regressor checkpoint");
  Reader r(bytes.subspan(4));
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t count = r.u32();
  if (count < 2 || count > 64) throw IoError("implausible checkpoint layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t s = r.u32();
    if (s == 0 || s > (1u << 24)) throw IoError("implausible checkpoint layer size");
    sizes.push_back(static_cast<int>(s));
  }
  RegressorParams p = init_regressor(sizes, 0);
  std::vector<double> flat(p.parameter_count());
  for (double& v : flat) v = r.f64();
  if (!r.done()) throw IoError("trailing bytes after checkpoint parameters");
  p.assign(flat);
  p.validate();
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const RegressorParams& params) {
  write_file_bytes(path, encode_checkpoint(params));
}

RegressorParams load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_checkpoint(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string loss_trace_csv(std::span<const EpochStats> trace) {
  std::ostringstream os;
  os << "epoch,mean_loss,lr\n" << std::setprecision(17);
  for (const EpochStats& e : trace) os << e.epoch << "," << e.mean_loss << "," << e.lr << "\n";
  return os.str();
}

void save_loss_trace(const std::filesystem::path& path, std::span<const EpochStats> trace) {
  const std::string csv = loss_trace_csv(trace);
  write_file_bytes(path, std::vector<std::uint8_t>(csv.begin(), csv.end()));
}

}  // namespace handforge

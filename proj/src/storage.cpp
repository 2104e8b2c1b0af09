// Copyright 2026 The lpbfseg Authors
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

#include "lpbfseg/storage.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "binio.hpp"

namespace lpbfseg {

namespace {

constexpr char kMagic[] = "LPBFSPARSE1";
constexpr std::size_t kMagicLen = 11;

void validate_runs(const SparseForeground& sf, int width, int height) {
  std::uint64_t prev_end = 0;  // linear index one past the previous run
  bool first = true;
  for (const auto& r : sf.runs) {
    if (r.values.empty()) throw CorruptRecordError("sparse record: empty run");
    if (r.y >= static_cast<std::uint32_t>(height) ||
        static_cast<std::uint64_t>(r.x_start) + r.values.size() > static_cast<std::uint64_t>(width))
      throw CorruptRecordError("sparse record: run outside the frame");
    for (Intensity v : r.values)
      if (!std::isfinite(v) || v < 0.0f) throw CorruptRecordError("sparse record: invalid intensity");
    std::uint64_t start = static_cast<std::uint64_t>(r.y) * width + r.x_start;
    if (!first && start < prev_end)
      throw CorruptRecordError("sparse record: runs overlap or are out of order");
    prev_end = start + r.values.size();
    first = false;
  }
}

bool fits_u16(Intensity v) {
  return v >= 0.0f && v <= 65535.0f && std::floor(v) == v;
}

}  // namespace

std::size_t SparseForeground::pixel_count() const {
  std::size_t n = 0;
  for (const auto& r : runs) n += r.values.size();
  return n;
}

SparseForeground encode(const Frame& frame, const Mask& mask) {
  require_same_shape(frame.width(), frame.height(), mask.width(), mask.height(), "encode");
  SparseForeground sf;
  sf.frame_index = static_cast<std::uint32_t>(frame.index());
  const auto px = frame.pixels();
  const auto bits = mask.bits();
  const int w = frame.width();
  for (int y = 0; y < frame.height(); ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    int x = 0;
    while (x < w) {
      if (!bits[row + x]) {
        ++x;
        continue;
      }
      Run r;
      r.y = static_cast<std::uint32_t>(y);
      r.x_start = static_cast<std::uint32_t>(x);
      while (x < w && bits[row + x]) r.values.push_back(px[row + x++]);
      sf.runs.push_back(std::move(r));
    }
  }
  return sf;
}

Frame decode(const SparseForeground& sf, int width, int height) {
  validate_runs(sf, width, height);
  std::vector<Intensity> px(static_cast<std::size_t>(width) * height, 0.0f);
  for (const auto& r : sf.runs) {
    std::memcpy(&px[static_cast<std::size_t>(r.y) * width + r.x_start], r.values.data(),
                r.values.size() * sizeof(Intensity));
  }
  return Frame(width, height, std::move(px), sf.frame_index);
}

std::size_t encoded_size(const SparseForeground& sf, IntensityTag tag) {
  const std::size_t value_bytes = tag == IntensityTag::U16 ? 2 : 4;
  return 8 + sf.runs.size() * 12 + sf.pixel_count() * value_bytes;
}

SparseWriter::SparseWriter(const std::filesystem::path& path, int width, int height, IntensityTag tag)
    : os_(path, std::ios::binary | std::ios::trunc), width_(width), height_(height), tag_(tag) {
  if (!os_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (width < 1 || height < 1) throw ConfigError("sparse file: dimensions must be positive");
  os_.write(kMagic, kMagicLen);
  binio::put_u32(os_, static_cast<std::uint32_t>(width));
  binio::put_u32(os_, static_cast<std::uint32_t>(height));
  binio::put_u32(os_, 0);
  binio::put_u8(os_, static_cast<std::uint8_t>(tag));
}

SparseWriter::~SparseWriter() {
  try {
    close();
  } catch (...) {
  }
}

void SparseWriter::write(const SparseForeground& sf) {
  if (closed_) throw std::logic_error("sparse writer is closed");
  validate_runs(sf, width_, height_);
  if (tag_ == IntensityTag::U16) {
    for (const auto& r : sf.runs)
      for (Intensity v : r.values)
        if (!fits_u16(v)) throw ConfigError("sparse file: value not representable as u16");
  }
  binio::put_u32(os_, sf.frame_index);
  binio::put_u32(os_, static_cast<std::uint32_t>(sf.runs.size()));
  for (const auto& r : sf.runs) {
    binio::put_u32(os_, r.y);
    binio::put_u32(os_, r.x_start);
    binio::put_u32(os_, static_cast<std::uint32_t>(r.values.size()));
    if (tag_ == IntensityTag::F32) {
      os_.write(reinterpret_cast<const char*>(r.values.data()),
                static_cast<std::streamsize>(r.values.size() * sizeof(float)));
    } else {
      for (Intensity v : r.values) binio::put_u16(os_, static_cast<std::uint16_t>(v));
    }
  }
  ++count_;
}

void SparseWriter::close() {
  if (closed_) return;
  closed_ = true;
  os_.seekp(static_cast<std::streamoff>(kMagicLen + 8));
  binio::put_u32(os_, count_);
  os_.close();
  if (os_.fail()) throw std::runtime_error("sparse file: write failed");
}

SparseReader::SparseReader(const std::filesystem::path& path) : is_(path, std::ios::binary) {
  if (!is_) throw std::runtime_error("cannot open " + path.string());
  char magic[kMagicLen];
  if (!is_.read(magic, kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0)
    throw CorruptRecordError("not an LPBFSPARSE1 file: " + path.string());
  std::uint32_t w = binio::get<std::uint32_t>(is_, "width");
  std::uint32_t h = binio::get<std::uint32_t>(is_, "height");
  count_ = binio::get<std::uint32_t>(is_, "frame count");
  std::uint8_t tag = binio::get<std::uint8_t>(is_, "intensity tag");
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
    throw CorruptRecordError("sparse file: bad dimensions");
  if (tag > 1) throw CorruptRecordError("sparse file: unknown intensity tag");
  width_ = static_cast<int>(w);
  height_ = static_cast<int>(h);
  tag_ = static_cast<IntensityTag>(tag);
}

std::optional<SparseForeground> SparseReader::next() {
  if (read_ >= count_) return std::nullopt;
  SparseForeground sf;
  sf.frame_index = binio::get<std::uint32_t>(is_, "frame index");
  std::uint32_t runs = binio::get<std::uint32_t>(is_, "run count");
  if (runs > static_cast<std::uint64_t>(width_) * height_)
    throw CorruptRecordError("sparse record: run count exceeds pixel count");
  sf.runs.reserve(runs);
  for (std::uint32_t i = 0; i < runs; ++i) {
    Run r;
    r.y = binio::get<std::uint32_t>(is_, "run row");
    r.x_start = binio::get<std::uint32_t>(is_, "run column");
    std::uint32_t len = binio::get<std::uint32_t>(is_, "run length");
    if (len == 0 || len > static_cast<std::uint32_t>(width_))
      throw CorruptRecordError("sparse record: bad run length");
    r.values.resize(len);
    if (tag_ == IntensityTag::F32) {
      if (!is_.read(reinterpret_cast<char*>(r.values.data()), static_cast<std::streamsize>(len) * 4))
        throw CorruptRecordError("truncated file while reading run values");
    } else {
      for (auto& v : r.values) v = static_cast<Intensity>(binio::get<std::uint16_t>(is_, "run values"));
    }
    sf.runs.push_back(std::move(r));
  }
  validate_runs(sf, width_, height_);
  ++read_;
  return sf;
}

std::vector<SparseForeground> SparseReader::read_all() {
  std::vector<SparseForeground> out;
  while (auto sf = next()) out.push_back(std::move(*sf));
  return out;
}

}  // namespace lpbfseg

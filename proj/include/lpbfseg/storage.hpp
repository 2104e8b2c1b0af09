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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "lpbfseg/core.hpp"

namespace lpbfseg {

/// Raw-value encoding used by the binary formats.
enum class IntensityTag : std::uint8_t { U16 = 0, F32 = 1 };

struct Run {
  std::uint32_t y = 0;
  std::uint32_t x_start = 0;
  std::vector<Intensity> values;
  bool operator==(const Run&) const = default;
};

/// Foreground pixels of one frame as row-major runs with their raw values.
struct SparseForeground {
  std::uint32_t frame_index = 0;
  std::vector<Run> runs;

  std::size_t pixel_count() const;
  bool operator==(const SparseForeground&) const = default;
};

/// Run-length encodes the masked pixels of `frame`. Throws ShapeError on a
/// size mismatch.
SparseForeground encode(const Frame& frame, const Mask& mask);

/// Places the runs on a zero frame. Throws CorruptRecordError when a run is
/// empty, overlaps another or leaves the frame.
Frame decode(const SparseForeground& sf, int width, int height);

/// Bytes one frame record occupies on disk.
std::size_t encoded_size(const SparseForeground& sf, IntensityTag tag = IntensityTag::F32);

/// Streaming writer for LPBFSPARSE1 files. The frame count in the header is
/// patched by close().
class SparseWriter {
 public:
  SparseWriter(const std::filesystem::path& path, int width, int height,
               IntensityTag tag = IntensityTag::F32);
  ~SparseWriter();
  SparseWriter(const SparseWriter&) = delete;
  SparseWriter& operator=(const SparseWriter&) = delete;

  /// Throws ConfigError when a value cannot be stored exactly under the tag.
  void write(const SparseForeground& sf);
  void close();
  std::uint32_t frames_written() const { return count_; }

 private:
  std::ofstream os_;
  int width_, height_;
  IntensityTag tag_;
  std::uint32_t count_ = 0;
  bool closed_ = false;
};

class SparseReader {
 public:
  /// Throws CorruptRecordError on a bad magic or header.
  explicit SparseReader(const std::filesystem::path& path);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint32_t frame_count() const { return count_; }
  IntensityTag tag() const { return tag_; }
  /// Next record, nullopt after the last one. Runs are validated against the
  /// header dimensions.
  std::optional<SparseForeground> next();
  std::vector<SparseForeground> read_all();

 private:
  std::ifstream is_;
  int width_ = 0, height_ = 0;
  std::uint32_t count_ = 0, read_ = 0;
  IntensityTag tag_ = IntensityTag::F32;
};

}  // namespace lpbfseg

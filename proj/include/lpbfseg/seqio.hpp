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

#include "lpbfseg/core.hpp"
#include "lpbfseg/storage.hpp"

namespace lpbfseg {

/// Streaming writer for LPBFSEQ1 frame-sequence files. The frame count in the
/// header is patched by close().
class SequenceWriter {
 public:
  SequenceWriter(const std::filesystem::path& path, int width, int height,
                 IntensityTag dtype = IntensityTag::F32, std::uint32_t warmup_count = 0);
  ~SequenceWriter();
  SequenceWriter(const SequenceWriter&) = delete;
  SequenceWriter& operator=(const SequenceWriter&) = delete;

  /// Throws ShapeError on a size mismatch and ConfigError when a value cannot
  /// be stored exactly as u16.
  void write(const Frame& frame);
  void close();
  std::uint32_t frames_written() const { return count_; }

 private:
  std::ofstream os_;
  int width_, height_;
  IntensityTag dtype_;
  std::uint32_t count_ = 0;
  bool closed_ = false;
};

class SequenceReader {
 public:
  /// Throws CorruptRecordError on a bad magic, header, or a file shorter than
  /// the header promises.
  explicit SequenceReader(const std::filesystem::path& path);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint32_t frame_count() const { return count_; }
  std::uint32_t warmup_count() const { return warmup_; }
  IntensityTag dtype() const { return dtype_; }
  std::uint32_t position() const { return read_; }
  std::optional<Frame> next();

 private:
  std::ifstream is_;
  int width_ = 0, height_ = 0;
  std::uint32_t count_ = 0, warmup_ = 0, read_ = 0;
  IntensityTag dtype_ = IntensityTag::F32;
  std::vector<std::uint16_t> u16_;
};

void write_sequence(const std::filesystem::path& path, const FrameSequence& seq,
                    IntensityTag dtype = IntensityTag::F32);
FrameSequence read_sequence(const std::filesystem::path& path, double frame_rate = 60.0);

}  // namespace lpbfseg

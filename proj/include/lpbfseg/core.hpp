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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpbfseg {

/// Raised when two images that must be aligned have different dimensions.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for invalid parameters, configurations or specs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a binary container fails structural validation.
class CorruptRecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Intensity = float;

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

/// Axis-aligned rectangle covering columns [x, x + width) and rows [y, y + height).
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int left() const { return x; }
  int right() const { return x + width - 1; }  // inclusive
  int top() const { return y; }
  int bottom() const { return y + height - 1; }  // inclusive
  bool empty() const { return width <= 0 || height <= 0; }
  bool contains(int px, int py) const {
    return px >= x && px <= right() && py >= y && py <= bottom();
  }
  bool within(int frame_width, int frame_height) const {
    return x >= 0 && y >= 0 && width >= 0 && height >= 0 && x + width <= frame_width &&
           y + height <= frame_height;
  }
  /// Grows every side by `by` pixels (no clipping).
  Rect dilated(int by) const { return {x - by, y - by, width + 2 * by, height + 2 * by}; }
  bool operator==(const Rect&) const = default;
};

/// One thermal snapshot of the build surface. Row-major, origin top-left,
/// addressed as (x = column, y = row). Immutable after construction.
class Frame {
 public:
  Frame() = default;
  /// Throws ShapeError when pixels.size() != width * height and ConfigError
  /// for negative or non-finite intensities.
  Frame(int width, int height, std::vector<Intensity> pixels, std::size_t index = 0,
        std::optional<bool> laser_nominally_on = std::nullopt);

  /// Constant-valued frame.
  static Frame filled(int width, int height, Intensity value, std::size_t index = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  std::size_t index() const { return index_; }
  std::optional<bool> laser_nominally_on() const { return laser_on_; }
  std::span<const Intensity> pixels() const { return pixels_; }
  Intensity at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  bool same_shape(int w, int h) const { return width_ == w && height_ == h; }

  Frame with_index(std::size_t index) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Intensity> pixels_;
  std::size_t index_ = 0;
  std::optional<bool> laser_on_;
};

/// Binary per-pixel labeling, true = foreground. Bits are stored one byte per
/// pixel (0 or 1) so they can be scanned without bit twiddling.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool value = false);
  /// Throws ShapeError when bits.size() != width * height. Nonzero bytes are
  /// normalized to 1.
  Mask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }
  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> mutable_bits() { return bits_; }
  std::size_t count() const;
  bool any() const;
  bool same_shape(int w, int h) const { return width_ == w && height_ == h; }
  /// Reshape in place, reusing the allocation; contents become all-false.
  void reset(int width, int height);

  bool operator==(const Mask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Ordered frames of one build batch. All frames share width and height and
/// carry consecutive indices starting at 0.
class FrameSequence {
 public:
  FrameSequence() = default;
  FrameSequence(std::vector<Frame> frames, double frame_rate = 60.0, std::size_t warmup_count = 0);

  /// Appends a frame, re-indexing it to its position. Throws ShapeError on a
  /// dimension mismatch.
  void push_back(Frame frame);

  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  const std::vector<Frame>& frames() const { return frames_; }
  auto begin() const { return frames_.begin(); }
  auto end() const { return frames_.end(); }
  int width() const { return frames_.empty() ? 0 : frames_.front().width(); }
  int height() const { return frames_.empty() ? 0 : frames_.front().height(); }
  double frame_rate() const { return frame_rate_; }
  std::size_t warmup_count() const { return warmup_count_; }
  void set_warmup_count(std::size_t n) { warmup_count_ = n; }

  /// Copy of the first n frames (clamped to size()).
  FrameSequence prefix(std::size_t n) const;

 private:
  std::vector<Frame> frames_;
  double frame_rate_ = 60.0;
  std::size_t warmup_count_ = 0;
};

void require_same_shape(int w1, int h1, int w2, int h2, const char* what);

/// Pixel-wise union of two masks.
Mask mask_or(const Mask& a, const Mask& b);

/// Keeps frame pixels where the mask is set, zero elsewhere.
Frame mask_apply(const Frame& frame, const Mask& mask);

}  // namespace lpbfseg

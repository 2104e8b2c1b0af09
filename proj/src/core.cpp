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

#include "lpbfseg/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lpbfseg {

void require_same_shape(int w1, int h1, int w2, int h2, const char* what) {
  if (w1 != w2 || h1 != h2) {
    std::ostringstream os;
    os << what << ": shape mismatch " << w1 << "x" << h1 << " vs " << w2 << "x" << h2;
    throw ShapeError(os.str());
  }
}

Frame::Frame(int width, int height, std::vector<Intensity> pixels, std::size_t index,
             std::optional<bool> laser_nominally_on)
    : width_(width),
      height_(height),
      pixels_(std::move(pixels)),
      index_(index),
      laser_on_(laser_nominally_on) {
  if (width < 0 || height < 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    std::ostringstream os;
    os << "frame buffer holds " << pixels_.size() << " values, expected " << width << "x"
       << height;
    throw ShapeError(os.str());
  }
  for (Intensity v : pixels_) {
    if (!std::isfinite(v) || v < 0.0f) throw ConfigError("frame intensities must be finite and >= 0");
  }
}

Frame Frame::filled(int width, int height, Intensity value, std::size_t index) {
  return Frame(width, height,
               std::vector<Intensity>(static_cast<std::size_t>(width) * height, value), index);
}

Frame Frame::with_index(std::size_t index) const {
  Frame f = *this;
  f.index_ = index;
  return f;
}

Mask::Mask(int width, int height, bool value)
    : width_(width),
      height_(height),
      bits_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), value ? 1 : 0) {}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width < 0 || height < 0 ||
      bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ShapeError("mask buffer length does not match its dimensions");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t Mask::count() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

bool Mask::any() const {
  return std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

void Mask::reset(int width, int height) {
  width_ = width;
  height_ = height;
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

FrameSequence::FrameSequence(std::vector<Frame> frames, double frame_rate,
                             std::size_t warmup_count)
    : frame_rate_(frame_rate), warmup_count_(warmup_count) {
  frames_.reserve(frames.size());
  for (auto& f : frames) push_back(std::move(f));
}

void FrameSequence::push_back(Frame frame) {
  if (!frames_.empty()) {
    require_same_shape(frames_.front().width(), frames_.front().height(), frame.width(),
                       frame.height(), "FrameSequence::push_back");
  }
  if (frame.index() != frames_.size()) frame = frame.with_index(frames_.size());
  frames_.push_back(std::move(frame));
}

FrameSequence FrameSequence::prefix(std::size_t n) const {
  n = std::min(n, frames_.size());
  return FrameSequence(std::vector<Frame>(frames_.begin(), frames_.begin() + n), frame_rate_,
                       std::min(warmup_count_, n));
}

Mask mask_or(const Mask& a, const Mask& b) {
  require_same_shape(a.width(), a.height(), b.width(), b.height(), "mask_or");
  std::vector<std::uint8_t> out(a.size());
  auto ab = a.bits();
  auto bb = b.bits();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ab[i] | bb[i];
  return Mask(a.width(), a.height(), std::move(out));
}

Frame mask_apply(const Frame& frame, const Mask& mask) {
  require_same_shape(frame.width(), frame.height(), mask.width(), mask.height(), "mask_apply");
  std::vector<Intensity> out(frame.size(), 0.0f);
  auto px = frame.pixels();
  auto bits = mask.bits();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (bits[i]) out[i] = px[i];
  }
  return Frame(frame.width(), frame.height(), std::move(out), frame.index(),
               frame.laser_nominally_on());
}

}  // namespace lpbfseg

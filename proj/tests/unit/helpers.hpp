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

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "lpbfseg/core.hpp"
#include "lpbfseg/groundtruth.hpp"

namespace testing {

inline lpbfseg::Frame frame_from(int w, int h, std::vector<float> px, std::size_t index = 0) {
  return lpbfseg::Frame(w, h, std::move(px), index);
}

inline lpbfseg::Frame random_frame(std::mt19937& rng, int w, int h, float lo = 0.0f, float hi = 500.0f) {
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<float> px(static_cast<std::size_t>(w) * h);
  for (auto& v : px) v = u(rng);
  return lpbfseg::Frame(w, h, std::move(px));
}

inline lpbfseg::Mask random_mask(std::mt19937& rng, int w, int h, double p = 0.5) {
  std::bernoulli_distribution b(p);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
  for (auto& v : bits) v = b(rng) ? 1 : 0;
  return lpbfseg::Mask(w, h, std::move(bits));
}

/// Frames with a moving 6x4 block at exactly 400 on a background drawn from
/// [250, 300]; labels mark the block as foreground. Any threshold in
/// [max background, 400) segments it perfectly.
struct Constructed {
  std::vector<lpbfseg::Frame> frames;
  std::vector<lpbfseg::GroundTruth> truth;
  float max_background = 0.0f;
};

inline Constructed constructed_sequence(std::uint32_t seed, int count = 20, int w = 48, int h = 32) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> bg(250.0f, 300.0f);
  Constructed c;
  for (int i = 0; i < count; ++i) {
    std::vector<float> px(static_cast<std::size_t>(w) * h);
    lpbfseg::GroundTruth gt;
    gt.width = w;
    gt.height = h;
    gt.labels.assign(px.size(), lpbfseg::Label::Background);
    const int bx = (i * 2) % (w - 6), by = (i * 3) % (h - 4);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t k = static_cast<std::size_t>(y) * w + x;
        if (x >= bx && x < bx + 6 && y >= by && y < by + 4) {
          px[k] = 400.0f;
          gt.labels[k] = lpbfseg::Label::Foreground;
        } else {
          px[k] = bg(rng);
          c.max_background = std::max(c.max_background, px[k]);
        }
      }
    c.frames.emplace_back(w, h, std::move(px), static_cast<std::size_t>(i));
    c.truth.push_back(std::move(gt));
  }
  return c;
}

inline int chebyshev_to_rect(int x, int y, const lpbfseg::Rect& r) {
  int dx = x < r.left() ? r.left() - x : (x > r.right() ? x - r.right() : 0);
  int dy = y < r.top() ? r.top() - y : (y > r.bottom() ? y - r.bottom() : 0);
  return std::max(dx, dy);
}

// Labels from the corner rules, pixel by pixel, left-to-right scans only.
inline std::vector<lpbfseg::Label> oracle_labels(std::optional<lpbfseg::Point> prev,
                                                 std::optional<lpbfseg::Point> cur,
                                                 const lpbfseg::GtConfig& c) {
  const lpbfseg::Rect& cs = c.cross_section;
  auto clampp = [&](lpbfseg::Point p) {
    return lpbfseg::Point{std::clamp(p.x, cs.left(), cs.right()), std::clamp(p.y, cs.top(), cs.bottom())};
  };
  std::optional<lpbfseg::Rect> box;
  if (prev || cur) {
    int lo = prev ? clampp(*prev).x + (c.track_width + 1) / 2 + c.inner_buffer : cs.left();
    int hi = cur ? clampp(*cur).x + (c.track_width + 1) / 2 : cs.right();
    int cy = cur ? clampp(*cur).y : clampp(*prev).y;
    const int height = c.box_height > 0 ? c.box_height : c.track_width + 1;
    if (lo < hi) box = lpbfseg::Rect{lo, cy - (height - 1) / 2, hi - lo + 1, height};
  }
  std::vector<lpbfseg::Label> out(static_cast<std::size_t>(c.frame_width) * c.frame_height,
                                  lpbfseg::Label::Background);
  for (int y = 0; y < c.frame_height; ++y) {
    for (int x = 0; x < c.frame_width; ++x) {
      lpbfseg::Label l = lpbfseg::Label::Background;
      int dcs = chebyshev_to_rect(x, y, cs);
      bool outer = dcs > 0 && dcs <= c.outer_buffer;
      bool in_box = box && box->contains(x, y);
      bool inner = box && !in_box && chebyshev_to_rect(x, y, *box) <= c.inner_buffer;
      if (outer || inner) {
        l = lpbfseg::Label::Excluded;
      } else if (in_box) {
        l = lpbfseg::Label::Foreground;
      }
      out[static_cast<std::size_t>(y) * c.frame_width + x] = l;
    }
  }
  return out;
}

}  // namespace testing

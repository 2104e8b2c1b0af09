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

#include "lpbfseg/groundtruth.hpp"

#include <algorithm>
#include <cmath>

namespace lpbfseg {

GtConfig GtConfig::with_default_buffers(int frame_width, int frame_height, int track_width,
                                        double cutoff, Rect cross_section, ScanDirection dir) {
  GtConfig c;
  c.frame_width = frame_width;
  c.frame_height = frame_height;
  c.track_width = track_width;
  c.cutoff = cutoff;
  c.cross_section = cross_section;
  c.scan_direction = dir;
  c.inner_buffer = track_width / 2;
  c.outer_buffer = 5 * track_width;
  return c;
}

void GtConfig::validate() const {
  if (frame_width < 1 || frame_height < 1) throw ConfigError("ground truth: frame size must be positive");
  if (track_width < 1) throw ConfigError("ground truth: track width must be >= 1");
  if (inner_buffer < 0 || outer_buffer < 0) throw ConfigError("ground truth: buffers must be >= 0");
  if (box_height < 0) throw ConfigError("ground truth: box height must be >= 0");
  if (cross_section.empty() || !cross_section.within(frame_width, frame_height)) {
    throw ConfigError("ground truth: cross-section must be non-empty and inside the frame");
  }
}

std::size_t GroundTruth::count(Label l) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

Mask GroundTruth::foreground_mask() const {
  std::vector<std::uint8_t> bits(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) bits[i] = labels[i] == Label::Foreground;
  return Mask(width, height, std::move(bits));
}

CutoffStats compute_cutoff(std::span<const Frame> warmup) {
  if (warmup.empty()) throw ConfigError("compute_cutoff: no warm-up frames");
  double sigma_sum = 0.0;
  double max_sum = 0.0;
  for (const Frame& f : warmup) {
    auto px = f.pixels();
    if (px.empty()) throw ConfigError("compute_cutoff: empty frame");
    double mean = 0.0;
    for (Intensity v : px) mean += v;
    mean /= static_cast<double>(px.size());
    double var = 0.0;
    for (Intensity v : px) var += (v - mean) * (v - mean);
    var /= static_cast<double>(px.size());
    sigma_sum += std::sqrt(var);
    max_sum += *std::max_element(px.begin(), px.end());
  }
  CutoffStats s;
  s.sigma_bs = sigma_sum / static_cast<double>(warmup.size());
  s.t_max = max_sum / static_cast<double>(warmup.size());
  s.cutoff = 3.0 * s.sigma_bs + s.t_max;
  return s;
}

CutoffStats compute_cutoff(const FrameSequence& seq, std::size_t warmup_count) {
  warmup_count = std::min(warmup_count, seq.size());
  return compute_cutoff(std::span<const Frame>(seq.frames().data(), warmup_count));
}

std::optional<PointF> locate_laser(const Frame& frame, double cutoff, double radius_intensity) {
  auto px = frame.pixels();
  if (px.empty()) return std::nullopt;
  const double peak = *std::max_element(px.begin(), px.end());
  if (peak <= cutoff) return std::nullopt;
  const double floor = peak - std::max(radius_intensity, 0.0);
  double sx = 0.0, sy = 0.0, sw = 0.0;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const double v = frame.at(x, y);
      if (v >= floor) {
        sx += v * x;
        sy += v * y;
        sw += v;
      }
    }
  }
  return PointF{sx / sw, sy / sw};
}

Point to_pixel(PointF p) {
  return {static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
}

int estimate_track_width(std::span<const Frame> frames, double cutoff, ScanDirection dir) {
  const bool horizontal = dir == ScanDirection::LeftToRight || dir == ScanDirection::RightToLeft;
  double total = 0.0;
  std::size_t lines = 0;
  for (const Frame& f : frames) {
    const int along = horizontal ? f.width() : f.height();
    const int across = horizontal ? f.height() : f.width();
    for (int a = 0; a < along; ++a) {
      int best = 0;
      int run = 0;
      for (int c = 0; c < across; ++c) {
        const double v = horizontal ? f.at(a, c) : f.at(c, a);
        run = v > cutoff ? run + 1 : 0;
        best = std::max(best, run);
      }
      if (best > 0) {
        total += best;
        ++lines;
      }
    }
  }
  if (lines == 0) throw ConfigError("estimate_track_width: no pixel exceeds the cutoff");
  return std::max(1, static_cast<int>(std::lround(total / static_cast<double>(lines))));
}

namespace {

// Scan-aligned coordinates: `along` increases in the scan direction.
struct ScanFrame {
  ScanDirection dir;
  bool horizontal() const {
    return dir == ScanDirection::LeftToRight || dir == ScanDirection::RightToLeft;
  }
  bool mirrored() const {
    return dir == ScanDirection::RightToLeft || dir == ScanDirection::BottomToTop;
  }
  int along(Point p) const {
    const int a = horizontal() ? p.x : p.y;
    return mirrored() ? -a : a;
  }
  int across(Point p) const { return horizontal() ? p.y : p.x; }
  // Along-axis extent of a rectangle as [lo, hi] in scan coordinates.
  std::pair<int, int> along_range(const Rect& r) const {
    const int lo = horizontal() ? r.left() : r.top();
    const int hi = horizontal() ? r.right() : r.bottom();
    return mirrored() ? std::pair{-hi, -lo} : std::pair{lo, hi};
  }
  Rect to_rect(int a_lo, int a_hi, int c_lo, int c_hi) const {
    int lo = a_lo, hi = a_hi;
    if (mirrored()) {
      lo = -a_hi;
      hi = -a_lo;
    }
    if (horizontal()) return {lo, c_lo, hi - lo + 1, c_hi - c_lo + 1};
    return {c_lo, lo, c_hi - c_lo + 1, hi - lo + 1};
  }
};

Point clamp_into(Point p, const Rect& r) {
  return {std::clamp(p.x, r.left(), r.right()), std::clamp(p.y, r.top(), r.bottom())};
}

void paint_ring(std::vector<Label>& labels, int width, int height, const Rect& inner, int thickness) {
  if (thickness <= 0) return;
  const Rect outer = inner.dilated(thickness);
  const int x0 = std::max(outer.left(), 0), x1 = std::min(outer.right(), width - 1);
  const int y0 = std::max(outer.top(), 0), y1 = std::min(outer.bottom(), height - 1);
  for (int y = y0; y <= y1; ++y) {
    Label* row = labels.data() + static_cast<std::size_t>(y) * width;
    for (int x = x0; x <= x1; ++x) {
      if (!inner.contains(x, y)) row[x] = Label::Excluded;
    }
  }
}

}  // namespace

std::optional<Rect> foreground_box(std::optional<Point> previous, std::optional<Point> current,
                                   const GtConfig& cfg) {
  if (!previous && !current) return std::nullopt;
  const ScanFrame sf{cfg.scan_direction};
  const int half_lo = cfg.track_width / 2;
  const int half_hi = cfg.track_width - half_lo;
  const auto [border_start, border_end] = sf.along_range(cfg.cross_section);
  if (previous) previous = clamp_into(*previous, cfg.cross_section);
  if (current) current = clamp_into(*current, cfg.cross_section);

  const int a_lo = previous ? sf.along(*previous) + half_hi + cfg.inner_buffer : border_start;
  const int a_hi = current ? sf.along(*current) + half_hi : border_end;
  const int center = current ? sf.across(*current) : sf.across(*previous);
  if (a_lo >= a_hi) return std::nullopt;
  const int height = cfg.effective_box_height();
  const int c_lo = center - (height - 1) / 2;
  return sf.to_rect(a_lo, a_hi, c_lo, c_lo + height - 1);
}

GroundTruthBuilder::GroundTruthBuilder(GtConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  base_.assign(static_cast<std::size_t>(cfg_.frame_width) * cfg_.frame_height, Label::Background);
  paint_ring(base_, cfg_.frame_width, cfg_.frame_height, cfg_.cross_section, cfg_.outer_buffer);
}

GroundTruth GroundTruthBuilder::build(std::optional<Point> previous,
                                      std::optional<Point> current) const {
  GroundTruth gt;
  gt.width = cfg_.frame_width;
  gt.height = cfg_.frame_height;
  gt.labels = base_;
  gt.laser_center = current;
  gt.laser_on = current.has_value();
  gt.box = foreground_box(previous, current, cfg_);
  if (!gt.box) return gt;

  const Rect& box = *gt.box;
  const int x0 = std::max(box.left(), 0), x1 = std::min(box.right(), gt.width - 1);
  const int y0 = std::max(box.top(), 0), y1 = std::min(box.bottom(), gt.height - 1);
  for (int y = y0; y <= y1; ++y) {
    Label* row = gt.labels.data() + static_cast<std::size_t>(y) * gt.width;
    for (int x = x0; x <= x1; ++x) {
      if (row[x] != Label::Excluded) row[x] = Label::Foreground;
    }
  }
  paint_ring(gt.labels, gt.width, gt.height, box, cfg_.inner_buffer);
  return gt;
}

GroundTruth build_gt(std::optional<Point> previous, std::optional<Point> current,
                     const GtConfig& cfg) {
  return GroundTruthBuilder(cfg).build(previous, current);
}

}  // namespace lpbfseg

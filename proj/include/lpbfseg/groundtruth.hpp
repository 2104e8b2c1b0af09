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
#include <optional>
#include <span>
#include <vector>

#include "lpbfseg/core.hpp"

namespace lpbfseg {

enum class Label : std::uint8_t { Background = 0, Foreground = 1, Excluded = 2 };

enum class ScanDirection { LeftToRight, RightToLeft, TopToBottom, BottomToTop };

/// Ground-truth geometry for one build batch.
struct GtConfig {
  int frame_width = 0;
  int frame_height = 0;
  int track_width = 1;        ///< w, pixels
  double cutoff = 0.0;        ///< T_c, intensity
  Rect cross_section;         ///< scanned region, pixel coordinates
  ScanDirection scan_direction = ScanDirection::LeftToRight;
  int inner_buffer = 0;       ///< excluded ring around each box
  int outer_buffer = 0;       ///< excluded ring around the cross-section
  int box_height = 0;         ///< across-scan extent of the box; 0 means w + 1

  int effective_box_height() const { return box_height > 0 ? box_height : track_width + 1; }

  /// Buffers at their customary values: inner = w / 2, outer = 5 w.
  static GtConfig with_default_buffers(int frame_width, int frame_height, int track_width,
                                       double cutoff, Rect cross_section,
                                       ScanDirection dir = ScanDirection::LeftToRight);
  /// Throws ConfigError if w < 1, a buffer or the box height is negative, or
  /// the cross-section is empty or leaves the frame.
  void validate() const;
  bool operator==(const GtConfig&) const = default;
};

/// Per-frame reference labels.
struct GroundTruth {
  int width = 0;
  int height = 0;
  std::vector<Label> labels;
  std::optional<Point> laser_center;
  bool laser_on = false;
  std::optional<Rect> box;  ///< foreground box before buffer exclusion, unclipped

  Label at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count(Label l) const;
  /// Foreground pixels as a mask (the perfect prediction).
  Mask foreground_mask() const;
};

struct CutoffStats {
  double cutoff = 0.0;    ///< T_c = 3 * sigma_bs + T_max
  double sigma_bs = 0.0;  ///< per-frame standard deviation, averaged
  double t_max = 0.0;     ///< per-frame maximum, averaged
};

/// Cutoff temperature from frames recorded before the laser starts. Throws
/// ConfigError on an empty span.
CutoffStats compute_cutoff(std::span<const Frame> warmup);
CutoffStats compute_cutoff(const FrameSequence& seq, std::size_t warmup_count);

struct PointF {
  double x = 0.0;
  double y = 0.0;
};

/// Laser position: none when max(frame) <= cutoff, otherwise the
/// intensity-weighted centroid of pixels >= max - radius_intensity.
std::optional<PointF> locate_laser(const Frame& frame, double cutoff, double radius_intensity = 0.0);

/// Rounded pixel position of a located laser.
Point to_pixel(PointF p);

/// Mean length of the above-cutoff run crossing the track, over all columns
/// (rows for vertical scans) and frames that contain one. Rounded, at least 1.
/// Throws ConfigError if no pixel exceeds the cutoff.
int estimate_track_width(std::span<const Frame> frames, double cutoff,
                         ScanDirection dir = ScanDirection::LeftToRight);

/// Foreground box implied by the previous and current laser centers, or
/// nullopt when it is empty. Centers are clamped into the cross-section.
std::optional<Rect> foreground_box(std::optional<Point> previous, std::optional<Point> current,
                                   const GtConfig& cfg);

/// Labels one frame. Caches the outer buffer so repeated calls only paint the
/// per-frame box.
class GroundTruthBuilder {
 public:
  explicit GroundTruthBuilder(GtConfig cfg);
  GroundTruth build(std::optional<Point> previous, std::optional<Point> current) const;
  const GtConfig& config() const { return cfg_; }

 private:
  GtConfig cfg_;
  std::vector<Label> base_;
};

GroundTruth build_gt(std::optional<Point> previous, std::optional<Point> current,
                     const GtConfig& cfg);

}  // namespace lpbfseg

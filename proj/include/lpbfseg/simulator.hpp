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
#include <random>
#include <vector>

#include "lpbfseg/core.hpp"
#include "lpbfseg/groundtruth.hpp"

namespace lpbfseg {

/// Synthetic batch description. The laser rasters `track_count` horizontal
/// lines left to right across `cross_section`, one line every `track_pitch`
/// rows, moving `scan_speed` pixels per frame.
struct SimConfig {
  int width = 640;
  int height = 512;
  double bed_temp = 277.0;
  double bed_noise_sigma = 0.2;    ///< per-pixel, per-frame sensor noise
  double bed_pattern_sigma = 6.0;  ///< static per-pixel texture of the powder bed
  double peak_temp = 600.0;
  double spot_sigma = 2.0;         ///< pixels
  int scan_speed = 50;             ///< pixels per frame
  int track_pitch = 8;             ///< rows between consecutive tracks
  int track_count = 40;
  Rect cross_section{120, 96, 401, 320};
  double cooling_time_constant = 10.0;  ///< frames
  int warmup_frames = 50;
  int laser_off_gap_frames = 4;
  double spatter_rate = 0.0;       ///< expected new particles per laser-on frame
  double spatter_temp = 307.0;
  std::uint64_t seed = 42;
  int calibration_tracks = 20;     ///< leading tracks tagged for parameter tuning
  double frame_rate = 60.0;
  std::optional<double> cutoff;    ///< T_c override; computed from warm-up frames otherwise
  int box_height = 0;              ///< ground-truth box height; 0 means w + 1

  /// Throws ConfigError when the configuration cannot be simulated.
  void validate() const;
  int frames_per_track() const;
  std::size_t frame_count() const;
  /// Warm-up frames plus every frame up to the end of the calibration tracks.
  std::size_t calibration_frame_count() const;
};

struct LaserState {
  bool on = false;
  Point center;    ///< meaningful only when on
  int track = -1;  ///< -1 during warm-up and gaps
  std::optional<Point> position() const { return on ? std::optional<Point>(center) : std::nullopt; }
};

/// Laser schedule implied by a SimConfig, frame by frame.
LaserState laser_state(const SimConfig& cfg, std::size_t frame_index);

/// Width of the above-cutoff band of a stationary Gaussian spot:
/// 2 sigma sqrt(2 ln((peak - bed) / (cutoff - bed))), rounded, at least 1.
int analytic_track_width(double peak_temp, double bed_temp, double spot_sigma, double cutoff);

/// Streaming generator. Warm-up frames are rendered at construction so the
/// cutoff and ground-truth geometry are known before the first next().
class Simulator {
 public:
  struct Output {
    Frame frame;
    LaserState laser;
  };

  explicit Simulator(SimConfig cfg);

  bool done() const { return next_index_ >= cfg_.frame_count(); }
  std::size_t frame_count() const { return cfg_.frame_count(); }
  std::size_t next_index() const { return next_index_; }
  Output next();

  const SimConfig& config() const { return cfg_; }
  const GtConfig& gt_config() const { return gt_; }
  const CutoffStats& cutoff() const { return cutoff_; }
  /// Ground truth for any frame index, from the exact laser schedule.
  GroundTruth ground_truth(std::size_t frame_index) const;

 private:
  Frame render(std::size_t index);
  void deposit(const LaserState& now, std::size_t index);
  void update_spatter(bool laser_on);

  struct Particle {
    double x, y, vx, vy;
    int life;
    int size;
  };

  SimConfig cfg_;
  GtConfig gt_;
  CutoffStats cutoff_;
  std::optional<GroundTruthBuilder> builder_;
  std::mt19937_64 rng_;
  std::vector<float> pattern_;
  std::vector<float> heat_;
  std::vector<Particle> particles_;
  std::vector<Frame> pending_warmup_;
  std::size_t next_index_ = 0;
};

/// A fully materialized batch.
struct SimulatedBatch {
  FrameSequence frames;
  std::vector<GroundTruth> truth;
  std::vector<LaserState> laser;
  GtConfig gt;
  CutoffStats cutoff;
};

SimulatedBatch simulate(const SimConfig& cfg);

}  // namespace lpbfseg

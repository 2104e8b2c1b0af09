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

#include "lpbfseg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lpbfseg {

void SimConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("simulator: " + m); };
  if (width < 1 || height < 1) fail("frame dimensions must be positive");
  if (!cross_section.within(width, height) || cross_section.empty())
    fail("cross-section must be non-empty and inside the frame");
  if (cross_section.width < 2) fail("cross-section must be at least 2 pixels wide");
  if (scan_speed < 1) fail("scan_speed must be at least 1 pixel per frame");
  if (track_count < 1) fail("track_count must be at least 1");
  if (track_pitch < 1) fail("track_pitch must be at least 1");
  if (static_cast<long>(track_count - 1) * track_pitch > cross_section.height - 1)
    fail("tracks do not fit in the cross-section");
  if (warmup_frames < 1) fail("at least one warm-up frame is required");
  if (laser_off_gap_frames < 0) fail("laser_off_gap_frames must be non-negative");
  if (!(spot_sigma > 0.0)) fail("spot_sigma must be positive");
  if (!(cooling_time_constant > 0.0)) fail("cooling_time_constant must be positive");
  if (!(peak_temp > bed_temp)) fail("peak_temp must exceed bed_temp");
  if (bed_temp < 0.0 || bed_noise_sigma < 0.0 || bed_pattern_sigma < 0.0)
    fail("bed temperature and noise must be non-negative");
  if (spatter_rate < 0.0) fail("spatter_rate must be non-negative");
  if (calibration_tracks < 0) fail("calibration_tracks must be non-negative");
  if (box_height < 0) fail("box_height must be non-negative");
  if (!(frame_rate > 0.0)) fail("frame_rate must be positive");
  if (cutoff && !(*cutoff > bed_temp && *cutoff < peak_temp))
    fail("cutoff must lie between bed_temp and peak_temp");
}

int SimConfig::frames_per_track() const {
  return (cross_section.width - 1 + scan_speed - 1) / scan_speed;
}

std::size_t SimConfig::frame_count() const {
  std::size_t n = static_cast<std::size_t>(frames_per_track());
  return static_cast<std::size_t>(warmup_frames) + track_count * n +
         static_cast<std::size_t>(track_count - 1) * laser_off_gap_frames;
}

std::size_t SimConfig::calibration_frame_count() const {
  int tracks = std::min(calibration_tracks, track_count);
  if (tracks == 0) return static_cast<std::size_t>(warmup_frames);
  std::size_t n = static_cast<std::size_t>(frames_per_track());
  return static_cast<std::size_t>(warmup_frames) + tracks * n +
         static_cast<std::size_t>(tracks - 1) * laser_off_gap_frames;
}

LaserState laser_state(const SimConfig& cfg, std::size_t frame_index) {
  LaserState s;
  if (frame_index < static_cast<std::size_t>(cfg.warmup_frames)) return s;
  std::size_t k = frame_index - cfg.warmup_frames;
  std::size_t n = static_cast<std::size_t>(cfg.frames_per_track());
  std::size_t period = n + cfg.laser_off_gap_frames;
  std::size_t track = k / period;
  std::size_t within = k % period;
  if (track >= static_cast<std::size_t>(cfg.track_count) || within >= n) return s;
  const Rect& cs = cfg.cross_section;
  long along = std::min<long>(static_cast<long>(within + 1) * cfg.scan_speed, cs.width - 1);
  s.on = true;
  s.track = static_cast<int>(track);
  s.center = Point{cs.x + static_cast<int>(along), cs.y + static_cast<int>(track) * cfg.track_pitch};
  return s;
}

int analytic_track_width(double peak_temp, double bed_temp, double spot_sigma, double cutoff) {
  double a = peak_temp - bed_temp;
  double c = cutoff - bed_temp;
  if (!(c > 0.0) || !(c < a))
    throw ConfigError("track width: cutoff must lie strictly between bed and peak temperature");
  double w = 2.0 * spot_sigma * std::sqrt(2.0 * std::log(a / c));
  return std::max(1, static_cast<int>(std::lround(w)));
}

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
  cfg_.validate();
  const std::size_t n = static_cast<std::size_t>(cfg_.width) * cfg_.height;
  pattern_.assign(n, 0.0f);
  if (cfg_.bed_pattern_sigma > 0.0) {
    std::normal_distribution<double> g(0.0, cfg_.bed_pattern_sigma);
    for (auto& v : pattern_) v = static_cast<float>(g(rng_));
  }
  heat_.assign(n, 0.0f);

  for (int i = 0; i < cfg_.warmup_frames; ++i) pending_warmup_.push_back(render(i));
  cutoff_ = compute_cutoff(pending_warmup_);
  double tc = cfg_.cutoff ? *cfg_.cutoff : cutoff_.cutoff;
  if (cfg_.cutoff) cutoff_.cutoff = tc;
  if (!(tc > cfg_.bed_temp))
    throw ConfigError("simulator: warm-up frames give a cutoff at the bed temperature; "
                      "add bed noise or set an explicit cutoff");
  int w = analytic_track_width(cfg_.peak_temp, cfg_.bed_temp, cfg_.spot_sigma, tc);
  gt_ = GtConfig::with_default_buffers(cfg_.width, cfg_.height, w, tc, cfg_.cross_section,
                                       ScanDirection::LeftToRight);
  gt_.box_height = cfg_.box_height;
  builder_.emplace(gt_);
}

Simulator::Output Simulator::next() {
  if (done()) throw std::out_of_range("simulator: no frames left");
  std::size_t i = next_index_++;
  LaserState laser = laser_state(cfg_, i);
  if (i < pending_warmup_.size()) {
    Frame f = std::move(pending_warmup_[i]);
    if (next_index_ == pending_warmup_.size()) {
      pending_warmup_.clear();
      pending_warmup_.shrink_to_fit();
    }
    return {std::move(f), laser};
  }
  return {render(i), laser};
}

GroundTruth Simulator::ground_truth(std::size_t frame_index) const {
  std::optional<Point> prev;
  if (frame_index > 0) prev = laser_state(cfg_, frame_index - 1).position();
  return builder_->build(prev, laser_state(cfg_, frame_index).position());
}

void Simulator::deposit(const LaserState& now, std::size_t index) {
  // The spot travels from the previous frame's position (or the track start)
  // to the current one; earlier points along the path have cooled longer.
  LaserState before = index > 0 ? laser_state(cfg_, index - 1) : LaserState{};
  double x1 = now.center.x;
  double x0 = (before.on && before.track == now.track) ? before.center.x
                                                        : static_cast<double>(cfg_.cross_section.x);
  double y = now.center.y;
  const double sigma = cfg_.spot_sigma;
  const double amp = cfg_.peak_temp - cfg_.bed_temp;
  const double tau = cfg_.cooling_time_constant;
  const int reach = static_cast<int>(std::ceil(4.0 * sigma));
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);

  int bx0 = std::max(0, static_cast<int>(std::floor(std::min(x0, x1))) - reach);
  int bx1 = std::min(cfg_.width - 1, static_cast<int>(std::ceil(std::max(x0, x1))) + reach);
  int by0 = std::max(0, static_cast<int>(y) - reach);
  int by1 = std::min(cfg_.height - 1, static_cast<int>(y) + reach);
  int bw = bx1 - bx0 + 1;
  std::vector<double> local(static_cast<std::size_t>(bw) * (by1 - by0 + 1), 0.0);

  double length = std::abs(x1 - x0);
  int steps = std::max(1, static_cast<int>(std::ceil(length / 0.5)));
  for (int s = 0; s <= steps; ++s) {
    double f = static_cast<double>(s) / steps;
    double sx = x0 + (x1 - x0) * f;
    double peak = amp * std::exp(-(1.0 - f) / tau);
    int cx0 = std::max(bx0, static_cast<int>(std::floor(sx)) - reach);
    int cx1 = std::min(bx1, static_cast<int>(std::ceil(sx)) + reach);
    for (int py = by0; py <= by1; ++py) {
      double dy2 = (py - y) * (py - y);
      double* row = &local[static_cast<std::size_t>(py - by0) * bw];
      for (int px = cx0; px <= cx1; ++px) {
        double dx = px - sx;
        double v = peak * std::exp(-(dx * dx + dy2) * inv2s2);
        if (v > row[px - bx0]) row[px - bx0] = v;
      }
    }
  }
  for (int py = by0; py <= by1; ++py) {
    for (int px = bx0; px <= bx1; ++px) {
      float v = static_cast<float>(local[static_cast<std::size_t>(py - by0) * bw + (px - bx0)]);
      float& h = heat_[static_cast<std::size_t>(py) * cfg_.width + px];
      h = std::max(h, v);
    }
  }
}

void Simulator::update_spatter(bool laser_on) {
  if (laser_on && cfg_.spatter_rate > 0.0) {
    std::poisson_distribution<int> count(cfg_.spatter_rate);
    std::uniform_real_distribution<double> ux(0.0, cfg_.width - 1.0);
    std::uniform_real_distribution<double> uy(0.0, cfg_.height - 1.0);
    std::uniform_real_distribution<double> uv(-3.0, 3.0);
    std::uniform_int_distribution<int> u13(1, 3);
    int born = count(rng_);
    for (int i = 0; i < born; ++i) {
      Particle p{ux(rng_), uy(rng_), uv(rng_), uv(rng_), 0, 0};
      p.life = u13(rng_);
      p.size = u13(rng_);
      particles_.push_back(p);
    }
  }
}

Frame Simulator::render(std::size_t index) {
  LaserState laser = laser_state(cfg_, index);
  const float decay = static_cast<float>(std::exp(-1.0 / cfg_.cooling_time_constant));
  for (auto& h : heat_) h *= decay;
  if (laser.on) deposit(laser, index);
  update_spatter(laser.on);

  const std::size_t n = heat_.size();
  std::vector<Intensity> px(n);
  const float bed = static_cast<float>(cfg_.bed_temp);
  if (cfg_.bed_noise_sigma > 0.0) {
    std::normal_distribution<float> g(0.0f, static_cast<float>(cfg_.bed_noise_sigma));
    for (std::size_t i = 0; i < n; ++i) px[i] = bed + pattern_[i] + heat_[i] + g(rng_);
  } else {
    for (std::size_t i = 0; i < n; ++i) px[i] = bed + pattern_[i] + heat_[i];
  }

  const float hot = static_cast<float>(cfg_.spatter_temp);
  for (auto& p : particles_) {
    int y = static_cast<int>(std::lround(p.y));
    int x = static_cast<int>(std::lround(p.x));
    for (int d = 0; d < p.size; ++d) {
      int xx = x + d;
      if (y < 0 || y >= cfg_.height || xx < 0 || xx >= cfg_.width) continue;
      float& v = px[static_cast<std::size_t>(y) * cfg_.width + xx];
      v = std::max(v, hot);
    }
    p.x += p.vx;
    p.y += p.vy;
    --p.life;
  }
  std::erase_if(particles_, [](const Particle& p) { return p.life <= 0; });

  for (auto& v : px) v = std::max(v, 0.0f);
  return Frame(cfg_.width, cfg_.height, std::move(px), index, laser.on);
}

SimulatedBatch simulate(const SimConfig& cfg) {
  Simulator sim(cfg);
  SimulatedBatch out;
  out.gt = sim.gt_config();
  out.cutoff = sim.cutoff();
  std::vector<Frame> frames;
  frames.reserve(sim.frame_count());
  while (!sim.done()) {
    auto o = sim.next();
    out.truth.push_back(sim.ground_truth(o.frame.index()));
    out.laser.push_back(o.laser);
    frames.push_back(std::move(o.frame));
  }
  out.frames = FrameSequence(std::move(frames), cfg.frame_rate,
                             static_cast<std::size_t>(cfg.warmup_frames));
  return out;
}

}  // namespace lpbfseg

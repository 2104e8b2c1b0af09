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

#include <cmath>

#include "doctest.h"
#include "lpbfseg/simulator.hpp"

using namespace lpbfseg;

namespace {

SimConfig clean_config() {
  SimConfig c;
  c.width = 200;
  c.height = 100;
  c.cross_section = Rect{40, 20, 120, 60};
  c.bed_noise_sigma = 0;
  c.bed_pattern_sigma = 0;
  c.spot_sigma = 3;
  c.peak_temp = 600;
  c.bed_temp = 277;
  c.cutoff = 295.0;
  c.scan_speed = 20;
  c.track_pitch = 12;
  c.track_count = 4;
  c.warmup_frames = 5;
  c.laser_off_gap_frames = 3;
  c.calibration_tracks = 2;
  return c;
}

std::vector<Simulator::Output> drain(Simulator& sim) {
  std::vector<Simulator::Output> out;
  while (!sim.done()) out.push_back(sim.next());
  return out;
}

}  // namespace

TEST_CASE("analytic track width") {
  CHECK(analytic_track_width(600, 277, 3, 295) == 14);
  CHECK(analytic_track_width(600, 277, 3, 599) == 1);
  CHECK_THROWS_AS(analytic_track_width(600, 277, 3, 277), ConfigError);
  CHECK_THROWS_AS(analytic_track_width(600, 277, 3, 600), ConfigError);

  // A stationary spot rasterized on the pixel grid: count the column above T_c.
  int count = 0;
  for (int d = -30; d <= 30; ++d) count += 277 + 323 * std::exp(-d * d / 18.0) > 295;
  CHECK(std::abs(count - 14) <= 1);
}

TEST_CASE("simulated track column above the cutoff matches the analytic width") {
  Simulator sim(clean_config());
  CHECK(sim.gt_config().track_width == 14);
  int checked = 0;
  for (const auto& o : drain(sim)) {
    if (!o.laser.on || o.laser.track != 0) continue;
    int n = 0;
    for (int y = 0; y < o.frame.height(); ++y) n += o.frame.at(o.laser.center.x, y) > 295.0f;
    CHECK(std::abs(n - 14) <= 1);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("noise-free frames: bed constant during warm-up, peak at the spot center") {
  SimConfig c = clean_config();
  Simulator sim(c);
  auto frames = drain(sim);
  for (int i = 0; i < c.warmup_frames; ++i) {
    for (float v : frames[i].frame.pixels()) CHECK(v == 277.0f);
  }
  std::optional<float> first_max;
  for (const auto& o : frames) {
    if (!o.laser.on) continue;
    CHECK(o.frame.at(o.laser.center.x, o.laser.center.y) == doctest::Approx(600.0f));
    float mx = *std::max_element(o.frame.pixels().begin(), o.frame.pixels().end());
    if (!first_max) first_max = mx;
    CHECK(std::abs(mx - *first_max) <= 1.0f);
    auto p = locate_laser(o.frame, 295.0);
    REQUIRE(p);
    CHECK(std::abs(p->x - o.laser.center.x) <= 1.0);
    CHECK(std::abs(p->y - o.laser.center.y) <= 1.0);
  }
}

TEST_CASE("frame count and schedule") {
  SimConfig c = clean_config();
  const int per_track = (c.cross_section.width - 1 + c.scan_speed - 1) / c.scan_speed;
  CHECK(c.frames_per_track() == per_track);
  CHECK(c.frame_count() == std::size_t(c.warmup_frames + per_track * c.track_count +
                                       c.laser_off_gap_frames * (c.track_count - 1)));
  CHECK(c.calibration_frame_count() ==
        std::size_t(c.warmup_frames + per_track * 2 + c.laser_off_gap_frames));
  std::size_t on = 0;
  for (std::size_t i = 0; i < c.frame_count(); ++i) {
    LaserState s = laser_state(c, i);
    if (!s.on) continue;
    ++on;
    CHECK(c.cross_section.contains(s.center.x, s.center.y));
    CHECK(s.center.y == c.cross_section.y + s.track * c.track_pitch);
  }
  CHECK(on == std::size_t(per_track * c.track_count));
  CHECK_FALSE(laser_state(c, c.frame_count()).on);
  // Each track ends on the right border.
  CHECK(laser_state(c, c.warmup_frames + per_track - 1).center.x == c.cross_section.right());
}

TEST_CASE("every pixel above the cutoff lies in a ground-truth box or its buffer") {
  SimConfig c = clean_config();
  Simulator sim(c);
  const GtConfig& gt = sim.gt_config();
  Mask hot(c.width, c.height), covered(c.width, c.height), core(c.width, c.height);
  while (!sim.done()) {
    auto o = sim.next();
    GroundTruth t = sim.ground_truth(o.frame.index());
    for (int y = 0; y < c.height; ++y)
      for (int x = 0; x < c.width; ++x)
        if (o.frame.at(x, y) > gt.cutoff) hot.set(x, y, true);
    if (t.box) {
      Rect d = t.box->dilated(gt.inner_buffer);
      Rect inner{t.box->x, t.box->y + 1, t.box->width, t.box->height - 2};
      for (int y = 0; y < c.height; ++y)
        for (int x = 0; x < c.width; ++x) {
          if (d.contains(x, y)) covered.set(x, y, true);
          if (inner.contains(x, y) && c.cross_section.contains(x, y)) core.set(x, y, true);
        }
    }
  }
  for (int y = 0; y < c.height; ++y)
    for (int x = 0; x < c.width; ++x) {
      if (hot.at(x, y)) CHECK(covered.at(x, y));
      if (core.at(x, y)) CHECK(hot.at(x, y));
    }
}

TEST_CASE("identical seeds give identical sequences") {
  SimConfig c = clean_config();
  c.cutoff.reset();
  c.bed_noise_sigma = 0.5;
  c.bed_pattern_sigma = 4;
  c.spatter_rate = 2;
  Simulator a(c), b(c);
  auto fa = drain(a), fb = drain(b);
  REQUIRE(fa.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CHECK(std::equal(fa[i].frame.pixels().begin(), fa[i].frame.pixels().end(), fb[i].frame.pixels().begin()));
  }
  c.seed += 1;
  Simulator d(c);
  auto fd = drain(d);
  CHECK_FALSE(std::equal(fa[0].frame.pixels().begin(), fa[0].frame.pixels().end(), fd[0].frame.pixels().begin()));
}

TEST_CASE("spatter only appears while the laser is on") {
  SimConfig c = clean_config();
  c.spatter_rate = 3;
  c.spatter_temp = 320;
  Simulator sim(c);
  for (const auto& o : drain(sim)) {
    if (o.frame.index() < static_cast<std::size_t>(c.warmup_frames)) {
      for (float v : o.frame.pixels()) CHECK(v == 277.0f);
    }
  }
}

TEST_CASE("cutoff from warm-up and the derived width") {
  SimConfig c = clean_config();
  c.cutoff.reset();
  CHECK_THROWS_AS(Simulator{c}, ConfigError);
  c.bed_pattern_sigma = 6;
  Simulator sim(c);
  const CutoffStats& s = sim.cutoff();
  CHECK(s.sigma_bs == doctest::Approx(6).epsilon(0.05));
  CHECK(sim.gt_config().cutoff == doctest::Approx(3 * s.sigma_bs + s.t_max));
  CHECK(sim.gt_config().track_width == analytic_track_width(600, 277, 3, s.cutoff));
}

TEST_CASE("invalid configurations are rejected") {
  auto bad = [](auto edit) {
    SimConfig c = clean_config();
    edit(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.peak_temp = 200; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.width = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.cross_section = Rect{150, 20, 100, 10}; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.track_count = 10; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.scan_speed = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.bed_noise_sigma = -1; }).validate(), ConfigError);
}

TEST_CASE("simulate materializes frames and ground truth together") {
  SimConfig c = clean_config();
  SimulatedBatch b = simulate(c);
  CHECK(b.frames.size() == c.frame_count());
  CHECK(b.truth.size() == c.frame_count());
  CHECK(b.frames.warmup_count() == std::size_t(c.warmup_frames));
  for (std::size_t i = 0; i < b.frames.size(); ++i) {
    CHECK(b.frames[i].laser_nominally_on() == b.laser[i].on);
    CHECK(b.truth[i].laser_on == b.laser[i].on);
  }
}

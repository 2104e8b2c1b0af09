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

#include "doctest.h"
#include "lpbfseg/study.hpp"

using namespace lpbfseg;

namespace {

SimConfig small_config() {
  SimConfig c = spatter_batch_config(7);
  c.track_count = 6;
  c.calibration_tracks = 2;
  return c;
}

}  // namespace

TEST_CASE("batch configurations are valid and sized as documented") {
  SimConfig s = standard_batch_config();
  CHECK_NOTHROW(s.validate());
  CHECK(s.width == 640);
  CHECK(s.height == 512);
  CHECK(s.track_count == 40);
  CHECK(s.frame_count() == std::size_t(s.warmup_frames + 40 * s.frames_per_track() + 39 * s.laser_off_gap_frames));
  CHECK(s.spatter_rate == 0.0);

  SimConfig sp = spatter_batch_config();
  CHECK_NOTHROW(sp.validate());
  CHECK(sp.spatter_rate == 0.5);
  CHECK(sp.cross_section.x < sp.width / 2);
  CHECK(sp.cross_section.y < sp.height / 2);

  SimConfig b = benchmark_batch_config();
  CHECK_NOTHROW(b.validate());
  CHECK(b.frame_count() >= 2000);
  CHECK(b.frame_count() < 2100);
  CHECK(standard_batch_config(5).seed == 5);
}

TEST_CASE("streamed evaluation equals per-frame scoring") {
  SimConfig c = small_config();
  SimulatedBatch batch = simulate(c);
  std::vector<SegmenterSpec> specs{make_spec("Thresh"), make_spec("FD+Thresh"), make_spec("Otsu")};
  auto rows = evaluate_stream(specs, vector_source(batch.frames.frames(), batch.truth));
  REQUIRE(rows.size() == 3);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    auto masks = segment_sequence(specs[s], batch.frames);
    ConfusionCounts total;
    for (std::size_t i = 0; i < masks.size(); ++i) total += confusion(masks[i], batch.truth[i]);
    CHECK(rows[s].name == specs[s].name());
    CHECK(rows[s].counts == total);
    CHECK(rows[s].micro.f1 == doctest::Approx(f1(total).f1));
  }

  Simulator sim(c);
  auto live = evaluate_stream(specs, simulator_source(sim));
  for (std::size_t s = 0; s < specs.size(); ++s) CHECK(live[s].counts == rows[s].counts);
}

TEST_CASE("spatter composites") {
  SimConfig c = small_config();
  SimulatedBatch batch = simulate(c);
  std::vector<SegmenterSpec> specs{make_spec("FD"), make_spec("FD+Thresh")};
  auto rows = spatter_stream(specs, vector_source(batch.frames.frames(), batch.truth), c.cross_section, 0);
  REQUIRE(rows.size() == 2);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    auto masks = segment_sequence(specs[s], batch.frames);
    Mask comp = composite(masks);
    CHECK(rows[s].composite == comp);
    CHECK(rows[s].outside_fraction == doctest::Approx(spatter_outside_fraction(comp, c.cross_section, 0)));
  }

  c.spatter_rate = 0;
  SimulatedBatch clean = simulate(c);
  // The melt pool's own glow reaches past the region border by less than a track width.
  auto none = spatter_stream({make_spec("FD+Thresh"), make_spec("Thresh", ParamPreset::Calibrated)},
                             vector_source(clean.frames.frames(), clean.truth), c.cross_section,
                             clean.gt.track_width);
  for (const auto& row : none) {
    CAPTURE(row.name);
    if (row.f1 > 0.5) CHECK(row.outside_fraction == 0.0);
  }
  CHECK(none[0].f1 > 0.5);
  CHECK(spatter_outside_fraction(none[0].composite, Rect{0, 0, c.width, c.height}, 0) == 0.0);
}

TEST_CASE("calibration set is the leading frames of the batch") {
  SimConfig c = small_config();
  CalibrationSet cal = calibration_set(c);
  SimulatedBatch batch = simulate(c);
  REQUIRE(cal.frames.size() == c.calibration_frame_count());
  REQUIRE(cal.truth.size() == cal.frames.size());
  for (std::size_t i = 0; i < cal.frames.size(); ++i) {
    CHECK(std::equal(cal.frames[i].pixels().begin(), cal.frames[i].pixels().end(),
                     batch.frames[i].pixels().begin()));
    CHECK(cal.truth[i].labels == batch.truth[i].labels);
  }
}

TEST_CASE("mismatched sources are rejected") {
  std::vector<Frame> frames{Frame::filled(4, 4, 1.0f)};
  std::vector<GroundTruth> truth;
  CHECK_THROWS_AS(vector_source(frames, truth), ConfigError);
}

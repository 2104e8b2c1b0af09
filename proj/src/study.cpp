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

#include "lpbfseg/study.hpp"

namespace lpbfseg {

SimConfig standard_batch_config(std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  return c;
}

SimConfig spatter_batch_config(std::uint64_t seed) {
  SimConfig c;
  c.width = 160;
  c.height = 128;
  c.cross_section = Rect{8, 8, 64, 48};
  c.bed_pattern_sigma = 2.0;
  c.spot_sigma = 1.5;
  c.scan_speed = 8;
  c.track_pitch = 2;
  c.track_count = 24;
  c.calibration_tracks = 8;
  c.spatter_rate = 0.5;
  c.spatter_temp = 302.0;
  c.seed = seed;
  return c;
}

SimConfig benchmark_batch_config(std::uint64_t seed) {
  SimConfig c;
  c.scan_speed = 10;
  c.track_pitch = 7;
  c.track_count = 45;
  c.seed = seed;
  return c;
}

LabeledSource simulator_source(Simulator& sim) {
  return [&sim]() -> std::optional<LabeledFrame> {
    if (sim.done()) return std::nullopt;
    auto o = sim.next();
    GroundTruth gt = sim.ground_truth(o.frame.index());
    return LabeledFrame{std::move(o.frame), std::move(gt)};
  };
}

LabeledSource vector_source(const std::vector<Frame>& frames, const std::vector<GroundTruth>& truth) {
  if (frames.size() != truth.size()) throw ConfigError("frames and ground truth differ in length");
  auto i = std::make_shared<std::size_t>(0);
  return [&frames, &truth, i]() -> std::optional<LabeledFrame> {
    if (*i >= frames.size()) return std::nullopt;
    std::size_t k = (*i)++;
    return LabeledFrame{frames[k], truth[k]};
  };
}

std::vector<EvalRow> evaluate_stream(const std::vector<SegmenterSpec>& specs, const LabeledSource& source) {
  std::vector<Segmenter> segs;
  for (const auto& s : specs) segs.emplace_back(s);
  std::vector<ScoreAccumulator> acc(segs.size());
  Mask m;
  while (auto lf = source()) {
    for (std::size_t i = 0; i < segs.size(); ++i) {
      segs[i].step(lf->frame, m);
      acc[i].add(m, lf->truth);
    }
  }
  std::vector<EvalRow> rows;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    rows.push_back({segs[i].name(), segs[i].spec().params, acc[i].totals(), acc[i].micro(), acc[i].macro_f1()});
  }
  return rows;
}

std::vector<SpatterRow> spatter_stream(const std::vector<SegmenterSpec>& specs, const LabeledSource& source,
                                       const Rect& region, int overflow) {
  if (overflow < 0) throw ConfigError("overflow must be non-negative");
  std::vector<Segmenter> segs;
  for (const auto& s : specs) segs.emplace_back(s);
  std::vector<CompositeBuilder> comp(segs.size());
  std::vector<ScoreAccumulator> acc(segs.size());
  Mask m;
  while (auto lf = source()) {
    for (std::size_t i = 0; i < segs.size(); ++i) {
      segs[i].step(lf->frame, m);
      comp[i].add(m);
      acc[i].add(m, lf->truth);
    }
  }
  std::vector<SpatterRow> rows;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Mask& c = comp[i].result();
    rows.push_back({segs[i].name(), spatter_outside_fraction(c, region, overflow), acc[i].micro().f1, c});
  }
  return rows;
}

CalibrationSet calibration_set(const SimConfig& cfg) {
  Simulator sim(cfg);
  CalibrationSet out;
  const std::size_t n = cfg.calibration_frame_count();
  while (!sim.done() && out.frames.size() < n) {
    auto o = sim.next();
    out.truth.push_back(sim.ground_truth(o.frame.index()));
    out.frames.push_back(std::move(o.frame));
  }
  return out;
}

}  // namespace lpbfseg

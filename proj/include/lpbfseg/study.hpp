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

// End-to-end pipelines: several segmenters driven in lockstep over one frame
// stream, so long sequences never need to be held in memory.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lpbfseg/core.hpp"
#include "lpbfseg/evaluation.hpp"
#include "lpbfseg/groundtruth.hpp"
#include "lpbfseg/segmenter.hpp"
#include "lpbfseg/simulator.hpp"

namespace lpbfseg {

/// 640x512 raster of 40 overlapping tracks, no spatter.
SimConfig standard_batch_config(std::uint64_t seed = 42);
/// Small frame with an upper-left cross-section and spatter at 0.5 particles
/// per laser-on frame.
SimConfig spatter_batch_config(std::uint64_t seed = 42);
/// 640x512, slow scan, a little over 2000 frames.
SimConfig benchmark_batch_config(std::uint64_t seed = 42);

struct LabeledFrame {
  Frame frame;
  GroundTruth truth;
};

/// Produces frames in order; nullopt ends the stream.
using LabeledSource = std::function<std::optional<LabeledFrame>()>;

/// Source over a live simulator. The simulator must outlive the source.
LabeledSource simulator_source(Simulator& sim);

/// Source over in-memory frames and their ground truth.
LabeledSource vector_source(const std::vector<Frame>& frames, const std::vector<GroundTruth>& truth);

struct EvalRow {
  std::string name;
  ParamMap params;
  ConfusionCounts counts;
  Score micro;
  double macro_f1 = 0.0;
};

/// Scores every spec over the stream (micro-averaged).
std::vector<EvalRow> evaluate_stream(const std::vector<SegmenterSpec>& specs, const LabeledSource& source);

struct SpatterRow {
  std::string name;
  double outside_fraction = 0.0;
  double f1 = 0.0;
  Mask composite;
};

/// Composite mask and spatter fraction outside `region` grown by `overflow`.
std::vector<SpatterRow> spatter_stream(const std::vector<SegmenterSpec>& specs, const LabeledSource& source,
                                       const Rect& region, int overflow);

/// Leading frames of a simulation tagged for calibration, with ground truth.
struct CalibrationSet {
  std::vector<Frame> frames;
  std::vector<GroundTruth> truth;
};

CalibrationSet calibration_set(const SimConfig& cfg);

}  // namespace lpbfseg

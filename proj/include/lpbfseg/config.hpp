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

// JSON representations of the library's configuration and result types.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpbfseg/bench.hpp"
#include "lpbfseg/evaluation.hpp"
#include "lpbfseg/groundtruth.hpp"
#include "lpbfseg/segmenter.hpp"
#include "lpbfseg/simulator.hpp"
#include "lpbfseg/tuning.hpp"

namespace lpbfseg {

using Json = nlohmann::ordered_json;

Json to_json(const Rect& r);
Rect rect_from_json(const Json& j);

/// Integral values are written as JSON integers.
Json to_json(const ParamMap& p);

Json to_json(const SegmenterSpec& s);
/// {"algorithm": "FD+Thresh", "params": {...}} with optional "seed" and
/// "fd_absolute". Missing parameters take their defaults.
SegmenterSpec spec_from_json(const Json& j);

Json to_json(const GtConfig& c);
GtConfig gt_config_from_json(const Json& j);

/// Unknown keys are rejected; absent keys keep their default values.
Json to_json(const SimConfig& c);
SimConfig sim_config_from_json(const Json& j);

Json to_json(const ParamSpace& s);
ParamSpace param_space_from_json(const Json& j);

Json to_json(const TuneResult& r);
TuneResult tune_result_from_json(const Json& j);

Json to_json(const BenchReport& r);
Json to_json(const Score& s);
Json to_json(const ConfusionCounts& c);

/// Default and calibrated parameters for every algorithm and FD combination:
/// {"default": {"Thresh": {...}, ...}, "calibrated": {...}}.
Json parameter_presets();

/// Parameters for `spec` from a file holding a tune result, a preset table,
/// a {"params": {...}} object or a bare parameter object.
ParamMap params_from_file(const std::filesystem::path& path, const SegmenterSpec& spec);

/// Per-frame annotation written next to a simulated sequence.
struct GtSidecar {
  GtConfig gt;
  std::optional<SimConfig> sim;
  CutoffStats cutoff;
  std::size_t calibration_frames = 0;
  std::vector<LaserState> laser;  ///< one entry per frame

  /// Ground truth for every frame, rebuilt from the stored laser positions.
  std::vector<GroundTruth> ground_truth() const;
};

Json to_json(const GtSidecar& s);
GtSidecar sidecar_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace lpbfseg

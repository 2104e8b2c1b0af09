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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lpbfseg/core.hpp"
#include "lpbfseg/groundtruth.hpp"
#include "lpbfseg/segmenter.hpp"

namespace lpbfseg {

enum class Scale { Linear, Log };

struct ParamRange {
  double low = 0.0;
  double high = 0.0;
  Scale scale = Scale::Linear;
  bool integer = false;
  bool odd = false;  ///< integer and odd, for window sizes
  bool operator==(const ParamRange&) const = default;
};

using ParamSpace = std::map<std::string, ParamRange>;

/// Search ranges bracketing both the default and the calibrated values.
/// Empty for algorithms without parameters worth tuning.
ParamSpace default_param_space(const SegmenterSpec& spec);

/// Throws ConfigError when a range is inverted, a log range is not positive,
/// an integer range holds no admissible integer, or a name is not a parameter
/// of `spec`.
void validate_space(const ParamSpace& space, const SegmenterSpec& spec);

/// Parameter set for trial `trial`; depends only on (space, seed, trial).
ParamMap sample_params(const ParamSpace& space, std::uint64_t seed, std::size_t trial);

struct Trial {
  ParamMap params;
  double f1 = 0.0;
};

struct TuneResult {
  std::string algorithm;
  ParamMap best_params;
  double best_f1 = 0.0;
  std::size_t best_trial = 0;
  std::uint64_t seed = 0;
  std::vector<Trial> trials;
};

/// Micro-F1 of a fresh segmenter run over the whole sequence.
double score_sequence(const SegmenterSpec& spec, std::span<const Frame> frames,
                      std::span<const GroundTruth> truth);

/// Uniform (log-uniform where marked) random search. Ties keep the lowest
/// trial index. Throws ConfigError for trials == 0, an invalid space or
/// misaligned frames and ground truth.
TuneResult random_search(const SegmenterSpec& spec, const ParamSpace& space,
                         std::span<const Frame> calib, std::span<const GroundTruth> truth,
                         std::size_t trials, std::uint64_t seed);

}  // namespace lpbfseg

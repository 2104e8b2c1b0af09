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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpbfseg/core.hpp"
#include "lpbfseg/segmenter.hpp"

namespace lpbfseg {

struct BenchReport {
  std::string name;
  ParamMap params;
  std::size_t frames_timed = 0;
  std::size_t warmup_frames_excluded = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p99_ms = 0.0;
};

/// Frames at the start of a sequence whose timings are discarded.
inline constexpr std::size_t kBenchWarmupFrames = 50;
/// Shortest sequence bench() accepts.
inline constexpr std::size_t kBenchMinFrames = 100;

/// Summary of per-frame durations in milliseconds (nearest-rank p99).
BenchReport summarize(std::string name, std::span<const double> durations_ms,
                      std::size_t excluded);

/// Times every step() of a fresh segmenter, mask output included, on the
/// calling thread. Throws ConfigError for sequences under kBenchMinFrames.
BenchReport bench(const SegmenterSpec& spec, const FrameSequence& seq);

/// Streams frames from `source` (nullopt ends the stream) through every
/// segmenter in lockstep, timing each step separately. Lets long sequences be
/// benchmarked without holding them in memory.
std::vector<BenchReport> bench_stream(const std::vector<SegmenterSpec>& specs,
                                      const std::function<std::optional<Frame>()>& source);

/// Same protocol for an arbitrary step function, e.g. a no-op to measure the
/// harness itself.
BenchReport bench_callable(const std::string& name,
                           const std::function<void(const Frame&, Mask&)>& step,
                           const FrameSequence& seq);

/// One-line description of the host: CPU model, core count, compiler.
std::string machine_info();

}  // namespace lpbfseg

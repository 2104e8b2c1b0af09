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

#include "lpbfseg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace lpbfseg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0, Clock::time_point t1) {
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void require_length(std::size_t n) {
  if (n < kBenchMinFrames)
    throw ConfigError("benchmark needs at least " + std::to_string(kBenchMinFrames) + " frames, got " +
                      std::to_string(n));
}

}  // namespace

BenchReport summarize(std::string name, std::span<const double> durations_ms, std::size_t excluded) {
  BenchReport r;
  r.name = std::move(name);
  r.warmup_frames_excluded = excluded;
  std::vector<double> d(durations_ms.begin() + std::min(excluded, durations_ms.size()), durations_ms.end());
  r.frames_timed = d.size();
  if (d.empty()) return r;
  r.mean_ms = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  std::sort(d.begin(), d.end());
  std::size_t n = d.size();
  r.median_ms = n % 2 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
  std::size_t rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(n)));
  r.p99_ms = d[std::max<std::size_t>(rank, 1) - 1];
  return r;
}

BenchReport bench(const SegmenterSpec& spec, const FrameSequence& seq) {
  require_length(seq.size());
  Segmenter seg(spec);
  Mask m;
  std::vector<double> d;
  d.reserve(seq.size());
  for (const auto& f : seq) {
    auto t0 = Clock::now();
    seg.step(f, m);
    d.push_back(ms_since(t0, Clock::now()));
  }
  BenchReport r = summarize(seg.name(), d, kBenchWarmupFrames);
  r.params = seg.spec().params;
  return r;
}

std::vector<BenchReport> bench_stream(const std::vector<SegmenterSpec>& specs,
                                      const std::function<std::optional<Frame>()>& source) {
  std::vector<Segmenter> segs;
  segs.reserve(specs.size());
  for (const auto& s : specs) segs.emplace_back(s);
  std::vector<std::vector<double>> d(segs.size());
  std::vector<Mask> masks(segs.size());
  std::size_t frames = 0;
  while (auto f = source()) {
    for (std::size_t i = 0; i < segs.size(); ++i) {
      auto t0 = Clock::now();
      segs[i].step(*f, masks[i]);
      d[i].push_back(ms_since(t0, Clock::now()));
    }
    ++frames;
  }
  require_length(frames);
  std::vector<BenchReport> out;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    out.push_back(summarize(segs[i].name(), d[i], kBenchWarmupFrames));
    out.back().params = segs[i].spec().params;
  }
  return out;
}

BenchReport bench_callable(const std::string& name,
                           const std::function<void(const Frame&, Mask&)>& step,
                           const FrameSequence& seq) {
  require_length(seq.size());
  Mask m(seq.width(), seq.height());
  std::vector<double> d;
  d.reserve(seq.size());
  for (const auto& f : seq) {
    auto t0 = Clock::now();
    step(f, m);
    d.push_back(ms_since(t0, Clock::now()));
  }
  return summarize(name, d, kBenchWarmupFrames);
}

std::string machine_info() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  for (std::string line; std::getline(info, line);) {
    if (line.rfind("model name", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
  std::ostringstream os;
  os << cpu << ", " << std::thread::hardware_concurrency() << " hardware threads";
#if defined(__clang__)
  os << ", clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
  os << ", gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#endif
  return os.str();
}

}  // namespace lpbfseg

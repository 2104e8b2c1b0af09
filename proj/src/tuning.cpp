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

#include "lpbfseg/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lpbfseg/evaluation.hpp"

namespace lpbfseg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double snap(double v, const ParamRange& r) {
  if (!r.integer && !r.odd) return v;
  double lo = std::ceil(r.low);
  double hi = std::floor(r.high);
  double x = std::clamp(std::round(v), lo, hi);
  if (r.odd && std::fmod(std::abs(x), 2.0) == 0.0) {
    // Nearest odd neighbour that stays in range.
    x = (x + 1 <= hi && (v >= x || x - 1 < lo)) ? x + 1 : x - 1;
  }
  return x;
}

}  // namespace

ParamSpace default_param_space(const SegmenterSpec& spec) {
  const bool fd = spec.fd_prefix;
  switch (spec.algorithm) {
    case Algorithm::Thresh:
      if (fd) return {{"lambda", {1, 50, Scale::Linear}}};
      return {{"lambda", {250, 700, Scale::Linear}}};
    case Algorithm::SubMax: return {{"delta", {0, 200, Scale::Linear}}};
    case Algorithm::FD:
    case Algorithm::GlobalAuto: return {};
    case Algorithm::LocalAuto:
      if (spec.local_method == LocalMethod::Sauvola)
        return {{"box", {3, 201, Scale::Linear, true, true}}, {"k", {0.01, 0.6, Scale::Linear}}};
      return {{"box", {3, 501, Scale::Linear, true, true}}, {"C", {0, 100, Scale::Linear}}};
    case Algorithm::MOG:
      return {{"backRatio", {0.05, 1.0, Scale::Linear}},
              {"history", {1, 500, Scale::Log, true}},
              {"nmixtures", {1, 350, Scale::Log, true}}};
    case Algorithm::MOG2:
      return {{"history", {1, 600, Scale::Log, true}}, {"thresh", {0.5, 50, Scale::Log}}};
    case Algorithm::KNN:
      return {{"history", {1, 600, Scale::Log, true}}, {"thresh", {1, 1000, Scale::Log}}};
  }
  return {};
}

void validate_space(const ParamSpace& space, const SegmenterSpec& spec) {
  const auto names = param_names(spec);
  for (const auto& [name, r] : space) {
    auto fail = [&](const std::string& m) { throw ConfigError("parameter space '" + name + "': " + m); };
    if (std::find(names.begin(), names.end(), name) == names.end())
      fail("not a parameter of " + spec.name());
    if (!std::isfinite(r.low) || !std::isfinite(r.high)) fail("bounds must be finite");
    if (r.low > r.high) fail("low exceeds high");
    if (r.scale == Scale::Log && !(r.low > 0)) fail("log scale needs a positive lower bound");
    if (r.integer || r.odd) {
      double lo = std::ceil(r.low), hi = std::floor(r.high);
      if (lo > hi) fail("range holds no integer");
      if (r.odd) {
        double first = std::fmod(std::abs(lo), 2.0) == 1.0 ? lo : lo + 1;
        if (first > hi) fail("range holds no odd integer");
      }
    }
  }
}

ParamMap sample_params(const ParamSpace& space, std::uint64_t seed, std::size_t trial) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial))));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ParamMap out;
  for (const auto& [name, r] : space) {
    double u = unit(rng);
    double v;
    if (r.low == r.high) {
      v = r.low;
    } else if (r.scale == Scale::Log) {
      v = std::exp(std::log(r.low) + u * (std::log(r.high) - std::log(r.low)));
    } else {
      v = r.low + u * (r.high - r.low);
    }
    out[name] = snap(std::clamp(v, r.low, r.high), r);
  }
  return out;
}

double score_sequence(const SegmenterSpec& spec, std::span<const Frame> frames,
                      std::span<const GroundTruth> truth) {
  if (frames.size() != truth.size())
    throw ConfigError("frames and ground truth differ in length");
  Segmenter seg(spec);
  ScoreAccumulator acc;
  Mask m;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    seg.step(frames[i], m);
    acc.add(m, truth[i]);
  }
  return acc.micro().f1;
}

TuneResult random_search(const SegmenterSpec& spec, const ParamSpace& space,
                         std::span<const Frame> calib, std::span<const GroundTruth> truth,
                         std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw ConfigError("random search needs at least one trial");
  if (calib.size() != truth.size())
    throw ConfigError("calibration frames and ground truth differ in length");
  validate_space(space, spec);

  TuneResult result;
  result.algorithm = spec.name();
  result.seed = seed;
  result.trials.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    SegmenterSpec s = spec;
    for (const auto& [k, v] : sample_params(space, seed, t)) s.params[k] = v;
    s = with_defaults(std::move(s));
    double f = score_sequence(s, calib, truth);
    if (t == 0 || f > result.best_f1) {
      result.best_f1 = f;
      result.best_trial = t;
      result.best_params = s.params;
    }
    result.trials.push_back({std::move(s.params), f});
  }
  return result;
}

}  // namespace lpbfseg

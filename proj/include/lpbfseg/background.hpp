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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lpbfseg/core.hpp"

namespace lpbfseg {

/// A per-frame foreground classifier. Implementations may keep state between
/// calls (background models) or be stateless (thresholds). Frames must arrive
/// in sequence order and share one size.
class ForegroundModel {
 public:
  virtual ~ForegroundModel() = default;
  /// Classifies `image` into `out` (1 = foreground) and updates any state.
  virtual void apply(std::span<const Intensity> image, int width, int height,
                     std::span<std::uint8_t> out) = 0;
};

/// Learning rate shared by the mixture models: 1 / min(frames_seen, history).
double mixture_learning_rate(std::size_t frames_seen, int history);

// ---------------------------------------------------------------------------

struct MogParams {
  int history = 200;
  int nmixtures = 5;
  double backRatio = 0.7;
  double noiseSigma = 15.0;  ///< floor on component sigma; new components start at 2x this
};

/// Per-pixel Gaussian mixture (KaewTraKulPong and Bowden). Components are
/// kept sorted by weight / sigma; the background is the shortest prefix whose
/// weights reach backRatio, and a pixel is background iff it matches one of
/// those components within 2.5 sigma.
class MogModel final : public ForegroundModel {
 public:
  struct Component {
    float weight = 0.0f;
    float mean = 0.0f;
    float var = 0.0f;
    float sort_key = 0.0f;
  };

  explicit MogModel(MogParams params);
  void apply(std::span<const Intensity> image, int width, int height,
             std::span<std::uint8_t> out) override;

  const MogParams& params() const { return params_; }
  std::size_t frames_seen() const { return frames_seen_; }
  /// Mixture of one pixel (nmixtures entries, unused ones have weight 0).
  std::span<const Component> mixture(std::size_t pixel) const;

  static constexpr float kMatchSigmas = 2.5f;

 private:
  MogParams params_;
  std::vector<Component> model_;
  std::size_t frames_seen_ = 0;
  int width_ = 0;
  int height_ = 0;
};

// ---------------------------------------------------------------------------

struct Mog2Params {
  int history = 500;
  double thresh = 16.0;  ///< squared Mahalanobis distance for the background test
  int nmixtures = 5;
  double backRatio = 0.9;
  double threshGen = 9.0;  ///< squared distance for assigning a sample to an existing mode
  double varInit = 15.0;
  double varMin = 4.0;
  double varMax = 75.0;
  double complexityReduction = 0.05;
};

/// Adaptive Gaussian mixture (Zivkovic): per-component variance adaptation,
/// a number of modes that grows up to nmixtures and shrinks by pruning.
class Mog2Model final : public ForegroundModel {
 public:
  struct Component {
    float weight = 0.0f;
    float mean = 0.0f;
    float var = 0.0f;
  };

  explicit Mog2Model(Mog2Params params);
  void apply(std::span<const Intensity> image, int width, int height,
             std::span<std::uint8_t> out) override;

  const Mog2Params& params() const { return params_; }
  std::span<const Component> mixture(std::size_t pixel) const;
  int modes_used(std::size_t pixel) const { return modes_[pixel]; }

 private:
  Mog2Params params_;
  std::vector<Component> model_;
  std::vector<std::uint8_t> modes_;
  std::size_t frames_seen_ = 0;
  int width_ = 0;
  int height_ = 0;
};

// ---------------------------------------------------------------------------

struct KnnParams {
  int history = 500;
  double thresh = 400.0;  ///< squared distance under which a sample counts as a neighbour
  int samples = 32;       ///< reservoir capacity cap; effective size is min(history, samples)
  int k = 2;
  std::uint64_t seed = 0;
};

/// Per-pixel sample reservoir. A pixel is background iff at least k stored
/// samples lie within squared distance `thresh`. After the reservoir fills,
/// each frame replaces one random slot with probability capacity / history.
class KnnModel final : public ForegroundModel {
 public:
  explicit KnnModel(KnnParams params);
  void apply(std::span<const Intensity> image, int width, int height,
             std::span<std::uint8_t> out) override;

  const KnnParams& params() const { return params_; }
  int capacity() const { return capacity_; }

 private:
  std::uint64_t next_random();

  KnnParams params_;
  int capacity_;
  std::vector<float> samples_;
  std::size_t filled_ = 0;
  std::size_t frames_seen_ = 0;
  std::uint64_t rng_state_;
  int width_ = 0;
  int height_ = 0;
};

}  // namespace lpbfseg

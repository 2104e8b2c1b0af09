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
#include <span>
#include <vector>

#include "lpbfseg/core.hpp"
#include "lpbfseg/groundtruth.hpp"

namespace lpbfseg {

/// Pixel counts over non-excluded pixels.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Compares a prediction with ground truth pixel-wise; Excluded pixels count
/// toward nothing. Throws ShapeError on a size mismatch.
ConfusionCounts confusion(const Mask& pred, const GroundTruth& gt);
ConfusionCounts confusion(std::span<const std::uint8_t> pred, std::span<const Label> labels);

/// Precision, recall and their harmonic mean; each ratio is 0 when its
/// denominator is 0.
Score f1(const ConfusionCounts& c);

/// Pixel-wise OR of all masks. An empty list yields an all-false mask of the
/// given size.
Mask composite(std::span<const Mask> masks, int width = 0, int height = 0);

/// Running composite for streams too long to keep every mask.
class CompositeBuilder {
 public:
  CompositeBuilder() = default;
  CompositeBuilder(int width, int height) : composite_(width, height) {}
  void add(const Mask& m);
  const Mask& result() const { return composite_; }

 private:
  Mask composite_;
  bool started_ = false;
};

/// Fraction of set pixels lying outside `region` grown by `overflow` pixels on
/// every side. 0 when the mask is empty.
double spatter_outside_fraction(const Mask& comp, const Rect& region, int overflow);

/// Sums confusion counts over frames (micro average) and keeps per-frame
/// scores for diagnostics.
class ScoreAccumulator {
 public:
  void add(const ConfusionCounts& frame_counts);
  void add(const Mask& pred, const GroundTruth& gt) { add(confusion(pred, gt)); }

  const ConfusionCounts& totals() const { return totals_; }
  Score micro() const { return f1(totals_); }
  /// Mean per-frame F1 over frames with any foreground in prediction or truth.
  double macro_f1() const;
  const std::vector<ConfusionCounts>& per_frame() const { return per_frame_; }

 private:
  ConfusionCounts totals_;
  std::vector<ConfusionCounts> per_frame_;
};

}  // namespace lpbfseg

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

#include "lpbfseg/evaluation.hpp"

#include <algorithm>
#include <array>

namespace lpbfseg {

ConfusionCounts confusion(const Mask& pred, const GroundTruth& gt) {
  require_same_shape(pred.width(), pred.height(), gt.width, gt.height, "confusion");
  return confusion(pred.bits(), gt.labels);
}

ConfusionCounts confusion(std::span<const std::uint8_t> pred, std::span<const Label> labels) {
  if (pred.size() != labels.size()) throw ShapeError("confusion: prediction and labels differ in size");
  // Index = label * 2 + predicted bit.
  std::array<std::uint64_t, 6> bins{};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++bins[static_cast<std::size_t>(labels[i]) * 2 + (pred[i] ? 1 : 0)];
  }
  ConfusionCounts c;
  c.tn = bins[0];
  c.fp = bins[1];
  c.fn = bins[2];
  c.tp = bins[3];
  return c;
}

Score f1(const ConfusionCounts& c) {
  Score s;
  const double tp = static_cast<double>(c.tp);
  if (c.tp + c.fp > 0) s.precision = tp / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = tp / static_cast<double>(c.tp + c.fn);
  // Same value as the harmonic mean of precision and recall, one rounding.
  if (c.tp > 0) s.f1 = 2.0 * tp / static_cast<double>(2 * c.tp + c.fp + c.fn);
  return s;
}

Mask composite(std::span<const Mask> masks, int width, int height) {
  if (masks.empty()) return Mask(width, height);
  CompositeBuilder b;
  for (const auto& m : masks) b.add(m);
  return b.result();
}

void CompositeBuilder::add(const Mask& m) {
  if (!started_ && composite_.size() == 0) composite_ = Mask(m.width(), m.height());
  require_same_shape(composite_.width(), composite_.height(), m.width(), m.height(), "composite");
  started_ = true;
  auto dst = composite_.mutable_bits();
  auto src = m.bits();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
}

double spatter_outside_fraction(const Mask& comp, const Rect& region, int overflow) {
  const Rect grown = region.dilated(std::max(overflow, 0));
  std::size_t total = 0;
  std::size_t outside = 0;
  for (int y = 0; y < comp.height(); ++y) {
    for (int x = 0; x < comp.width(); ++x) {
      if (!comp.at(x, y)) continue;
      ++total;
      if (!grown.contains(x, y)) ++outside;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(outside) / static_cast<double>(total);
}

void ScoreAccumulator::add(const ConfusionCounts& frame_counts) {
  totals_ += frame_counts;
  per_frame_.push_back(frame_counts);
}

double ScoreAccumulator::macro_f1() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : per_frame_) {
    if (c.tp + c.fp + c.fn == 0) continue;
    sum += f1(c).f1;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace lpbfseg

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
#include <string_view>
#include <vector>

#include "lpbfseg/core.hpp"

namespace lpbfseg {

// ---------------------------------------------------------------------------
// Fixed thresholds and frame differencing. The span overloads write into
// caller-owned buffers so streaming segmenters can reuse scratch memory.

/// Foreground where pixel > lambda (strict).
Mask threshold_fixed(const Frame& frame, double lambda);
void threshold_fixed(std::span<const Intensity> image, double lambda, std::span<std::uint8_t> out);

/// Foreground where pixel >= max(frame) - delta. Throws ConfigError for an
/// empty frame or negative delta.
Mask submax(const Frame& frame, double delta);
void submax(std::span<const Intensity> image, double delta, std::span<std::uint8_t> out);

/// Per-pixel max(current - previous, 0), or |current - previous| when
/// `absolute` is set.
Frame frame_difference(const Frame& current, const Frame& previous, bool absolute = false);
void frame_difference(std::span<const Intensity> current, std::span<const Intensity> previous,
                      std::span<Intensity> out, bool absolute = false);

/// Zeroes every pixel <= floor in place (the FD noise gate).
void zero_at_or_below(std::span<Intensity> image, Intensity floor);

// ---------------------------------------------------------------------------
// Histogram-based global thresholds.

enum class GlobalMethod { Otsu, Li, Isodata, Yen, Triangle };

std::string_view to_string(GlobalMethod m);

/// Uniform histogram over [lo, hi] of one image.
struct Histogram {
  std::vector<double> counts;
  double lo = 0.0;
  double hi = 0.0;

  int nbins() const { return static_cast<int>(counts.size()); }
  double bin_width() const { return (hi - lo) / nbins(); }
  double center(int k) const { return lo + (k + 0.5) * bin_width(); }
  double upper_edge(int k) const { return lo + (k + 1) * bin_width(); }
  int bin_of(double v) const;
  double total() const;
};

/// Histogram with nbins uniform bins spanning [min, max] of the image. The
/// maximum falls into the last bin. Requires a non-empty image.
Histogram make_histogram(std::span<const Intensity> image, int nbins);

struct AutoThreshold {
  double threshold = 0.0;  ///< foreground is pixel > threshold
  int bin = -1;            ///< histogram bin that holds the split (last background bin)
  bool degenerate = false; ///< constant image, no class separation exists
};

/// Otsu, Yen and Triangle return the upper edge of the chosen bin, so the
/// induced mask matches the histogram partition. Li and isodata iterate in
/// intensity space and return the converged value itself.
AutoThreshold global_auto_threshold(const Frame& frame, GlobalMethod method, int nbins = 256);
AutoThreshold global_auto_threshold(std::span<const Intensity> image, GlobalMethod method,
                                    int nbins = 256);
/// Same as above on a precomputed histogram.
AutoThreshold global_auto_threshold(const Histogram& hist, GlobalMethod method);

// ---------------------------------------------------------------------------
// Locally adaptive thresholds over window x window patches, reflect-101 borders.

enum class LocalMethod { Sauvola, AdaptMean, AdaptGauss };

std::string_view to_string(LocalMethod m);

struct LocalParams {
  int window = 11;
  double k = 0.2;  ///< Sauvola sensitivity
  double C = 2.0;  ///< offset subtracted from the mean for AdaptMean/AdaptGauss
};

/// Kernel sigma used by AdaptGauss for a given window.
double gaussian_sigma_for_window(int window);

/// Holds the scratch rows for repeated local thresholding of same-sized images.
class LocalThresholder {
 public:
  LocalThresholder(LocalMethod method, LocalParams params);

  /// Throws ConfigError when the window is even, < 3, or >= min(width, height).
  void apply(std::span<const Intensity> image, int width, int height, std::span<std::uint8_t> out);

  LocalMethod method() const { return method_; }
  const LocalParams& params() const { return params_; }

 private:
  void box_sum(std::span<const double> src, int width, int height, std::span<double> dst);
  void gaussian_blur(std::span<const double> src, int width, int height, std::span<double> dst);

  LocalMethod method_;
  LocalParams params_;
  std::vector<double> kernel_;
  std::vector<double> value_;
  std::vector<double> square_;
  std::vector<double> tmp_;
  std::vector<double> mean_;
  std::vector<double> second_;
};

Mask local_auto_threshold(const Frame& frame, LocalMethod method, int window, double k, double C);

/// Reflect-101 index into [0, n): -1 -> 1, n -> n - 2.
inline int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

}  // namespace lpbfseg

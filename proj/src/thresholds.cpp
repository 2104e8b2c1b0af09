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

#include "lpbfseg/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lpbfseg {

Mask threshold_fixed(const Frame& frame, double lambda) {
  Mask m(frame.width(), frame.height());
  threshold_fixed(frame.pixels(), lambda, m.mutable_bits());
  return m;
}

void threshold_fixed(std::span<const Intensity> image, double lambda, std::span<std::uint8_t> out) {
  // Compare in double so lambda keeps full precision against float pixels.
  const std::size_t n = image.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(image[i]) > lambda;
}

Mask submax(const Frame& frame, double delta) {
  Mask m(frame.width(), frame.height());
  submax(frame.pixels(), delta, m.mutable_bits());
  return m;
}

void submax(std::span<const Intensity> image, double delta, std::span<std::uint8_t> out) {
  if (image.empty()) throw ConfigError("submax: empty frame");
  if (!(delta >= 0.0)) throw ConfigError("submax: delta must be >= 0");
  const double peak = *std::max_element(image.begin(), image.end());
  const double floor = peak - delta;
  for (std::size_t i = 0; i < image.size(); ++i) out[i] = static_cast<double>(image[i]) >= floor;
}

Frame frame_difference(const Frame& current, const Frame& previous, bool absolute) {
  require_same_shape(current.width(), current.height(), previous.width(), previous.height(),
                     "frame_difference");
  std::vector<Intensity> out(current.size());
  frame_difference(current.pixels(), previous.pixels(), out, absolute);
  return Frame(current.width(), current.height(), std::move(out), current.index(),
               current.laser_nominally_on());
}

void frame_difference(std::span<const Intensity> current, std::span<const Intensity> previous,
                      std::span<Intensity> out, bool absolute) {
  const std::size_t n = current.size();
  if (absolute) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(current[i] - previous[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(current[i] - previous[i], 0.0f);
  }
}

void zero_at_or_below(std::span<Intensity> image, Intensity floor) {
  for (auto& v : image) v = v > floor ? v : 0.0f;
}

std::string_view to_string(GlobalMethod m) {
  switch (m) {
    case GlobalMethod::Otsu: return "Otsu";
    case GlobalMethod::Li: return "Li";
    case GlobalMethod::Isodata: return "isodata";
    case GlobalMethod::Yen: return "Yen";
    case GlobalMethod::Triangle: return "Triangle";
  }
  return "?";
}

std::string_view to_string(LocalMethod m) {
  switch (m) {
    case LocalMethod::Sauvola: return "Sauvola";
    case LocalMethod::AdaptMean: return "AdaptMean";
    case LocalMethod::AdaptGauss: return "AdaptGauss";
  }
  return "?";
}

int Histogram::bin_of(double v) const {
  const int n = nbins();
  if (!(hi > lo)) return 0;
  int k = static_cast<int>((v - lo) / (hi - lo) * n);
  return std::clamp(k, 0, n - 1);
}

double Histogram::total() const {
  double t = 0.0;
  for (double c : counts) t += c;
  return t;
}

Histogram make_histogram(std::span<const Intensity> image, int nbins) {
  if (nbins < 2) throw ConfigError("histogram needs at least 2 bins");
  if (image.empty()) throw ConfigError("histogram of an empty image");
  auto [mn, mx] = std::minmax_element(image.begin(), image.end());
  Histogram h;
  h.lo = *mn;
  h.hi = *mx;
  h.counts.assign(static_cast<std::size_t>(nbins), 0.0);
  if (!(h.hi > h.lo)) {
    h.counts[0] = static_cast<double>(image.size());
    return h;
  }
  const double scale = nbins / (h.hi - h.lo);
  const double lo = h.lo;
  const int last = nbins - 1;
  for (Intensity v : image) {
    int k = static_cast<int>((v - lo) * scale);
    h.counts[static_cast<std::size_t>(k > last ? last : k)] += 1.0;
  }
  return h;
}

namespace {

AutoThreshold at_bin_edge(const Histogram& h, int k) {
  return {h.upper_edge(k), k, false};
}

AutoThreshold otsu(const Histogram& h) {
  const int n = h.nbins();
  double total = 0.0;
  double sum_all = 0.0;
  for (int k = 0; k < n; ++k) {
    total += h.counts[k];
    sum_all += h.counts[k] * h.center(k);
  }
  double w0 = 0.0;
  double s0 = 0.0;
  double best = -1.0;
  int best_k = 0;
  for (int k = 0; k < n - 1; ++k) {
    w0 += h.counts[k];
    s0 += h.counts[k] * h.center(k);
    // An empty bin repeats the previous partition; keep the lowest split.
    if (h.counts[k] == 0.0) continue;
    const double w1 = total - w0;
    if (w0 <= 0.0 || w1 <= 0.0) continue;
    const double diff = s0 / w0 - (sum_all - s0) / w1;
    const double between = w0 * w1 * diff * diff;
    if (between > best) {
      best = between;
      best_k = k;
    }
  }
  return at_bin_edge(h, best_k);
}

AutoThreshold yen(const Histogram& h) {
  const int n = h.nbins();
  const double total = h.total();
  std::vector<double> p1(n), p1_sq(n), p2_sq(n);
  double c = 0.0, c_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double p = h.counts[k] / total;
    c += p;
    c_sq += p * p;
    p1[k] = c;
    p1_sq[k] = c_sq;
  }
  c_sq = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    const double p = h.counts[k] / total;
    c_sq += p * p;
    p2_sq[k] = c_sq;
  }
  double best = -std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0; k < n - 1; ++k) {
    const double spread = p1[k] * (1.0 - p1[k]);
    const double denom = p1_sq[k] * p2_sq[k + 1];
    if (spread <= 0.0 || denom <= 0.0) continue;
    const double crit = std::log(spread * spread / denom);
    if (crit > best) {
      best = crit;
      best_k = k;
    }
  }
  return at_bin_edge(h, best_k);
}

AutoThreshold triangle(const Histogram& h) {
  const int n = h.nbins();
  std::vector<double> hist = h.counts;
  int peak = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
  int low = 0;
  while (low < n && hist[low] == 0.0) ++low;
  int high = n - 1;
  while (high > 0 && hist[high] == 0.0) --high;
  // The chord runs from the peak to the far end of the longer tail.
  const bool flip = peak - low < high - peak;
  if (flip) {
    std::reverse(hist.begin(), hist.end());
    low = n - high - 1;
    peak = n - peak - 1;
  }
  const int width = peak - low;
  if (width <= 0) return at_bin_edge(h, flip ? n - peak - 1 : peak);
  double peak_height = hist[peak];
  double w = width;
  const double norm = std::sqrt(peak_height * peak_height + w * w);
  peak_height /= norm;
  w /= norm;
  double best = -std::numeric_limits<double>::infinity();
  int best_x = 0;
  for (int x = 0; x < width; ++x) {
    const double len = peak_height * x - w * hist[x + low];
    if (len > best) {
      best = len;
      best_x = x;
    }
  }
  int level = best_x + low;
  if (flip) level = n - level - 1;
  return at_bin_edge(h, level);
}

// Class means in histogram space, splitting at bin centers <= t.
struct ClassMeans {
  double low = 0.0;
  double high = 0.0;
  double low_count = 0.0;
  double high_count = 0.0;
};

ClassMeans class_means(const Histogram& h, double t, double offset) {
  ClassMeans m;
  for (int k = 0; k < h.nbins(); ++k) {
    const double x = h.center(k) - offset;
    if (h.center(k) <= t + offset) {
      m.low += h.counts[k] * x;
      m.low_count += h.counts[k];
    } else {
      m.high += h.counts[k] * x;
      m.high_count += h.counts[k];
    }
  }
  if (m.low_count > 0) m.low /= m.low_count;
  if (m.high_count > 0) m.high /= m.high_count;
  return m;
}

double histogram_mean(const Histogram& h) {
  double s = 0.0, c = 0.0;
  for (int k = 0; k < h.nbins(); ++k) {
    s += h.counts[k] * h.center(k);
    c += h.counts[k];
  }
  return s / c;
}

AutoThreshold isodata(const Histogram& h) {
  double t = histogram_mean(h);
  for (int iter = 0; iter < 1000; ++iter) {
    const ClassMeans m = class_means(h, t, 0.0);
    if (m.low_count == 0 || m.high_count == 0) break;
    const double next = 0.5 * (m.low + m.high);
    const bool same_split = h.bin_of(next - 0.5 * h.bin_width()) == h.bin_of(t - 0.5 * h.bin_width());
    t = next;
    if (same_split) break;
  }
  return {t, h.bin_of(t), false};
}

AutoThreshold li(const Histogram& h) {
  // Minimum cross entropy, iterated on intensities shifted so the lowest
  // bin center is positive.
  const double offset = h.lo;
  const double tolerance = 0.5 * h.bin_width();
  double next = histogram_mean(h) - offset;
  double current = -2.0 * tolerance;
  for (int iter = 0; iter < 1000 && std::fabs(next - current) > tolerance; ++iter) {
    current = next;
    const ClassMeans m = class_means(h, current, offset);
    if (m.low_count == 0 || m.high_count == 0 || m.low <= 0.0) break;
    next = (m.low - m.high) / (std::log(m.low) - std::log(m.high));
  }
  const double t = next + offset;
  return {t, h.bin_of(t), false};
}

}  // namespace

AutoThreshold global_auto_threshold(const Histogram& hist, GlobalMethod method) {
  if (!(hist.hi > hist.lo)) return {hist.lo, 0, true};
  switch (method) {
    case GlobalMethod::Otsu: return otsu(hist);
    case GlobalMethod::Li: return li(hist);
    case GlobalMethod::Isodata: return isodata(hist);
    case GlobalMethod::Yen: return yen(hist);
    case GlobalMethod::Triangle: return triangle(hist);
  }
  throw ConfigError("unknown global threshold method");
}

AutoThreshold global_auto_threshold(std::span<const Intensity> image, GlobalMethod method,
                                    int nbins) {
  return global_auto_threshold(make_histogram(image, nbins), method);
}

AutoThreshold global_auto_threshold(const Frame& frame, GlobalMethod method, int nbins) {
  return global_auto_threshold(frame.pixels(), method, nbins);
}

double gaussian_sigma_for_window(int window) { return 0.3 * ((window - 1) * 0.5 - 1.0) + 0.8; }

LocalThresholder::LocalThresholder(LocalMethod method, LocalParams params)
    : method_(method), params_(params) {
  if (params_.window < 3 || params_.window % 2 == 0) {
    throw ConfigError("local threshold window must be odd and >= 3");
  }
  if (method_ == LocalMethod::AdaptGauss) {
    const int r = params_.window / 2;
    const double sigma = gaussian_sigma_for_window(params_.window);
    kernel_.resize(static_cast<std::size_t>(params_.window));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
      kernel_[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
      sum += kernel_[i + r];
    }
    for (double& k : kernel_) k /= sum;
  }
}

void LocalThresholder::box_sum(std::span<const double> src, int width, int height,
                               std::span<double> dst) {
  const int r = params_.window / 2;
  tmp_.resize(src.size());
  for (int y = 0; y < height; ++y) {
    const double* row = src.data() + static_cast<std::size_t>(y) * width;
    double* out = tmp_.data() + static_cast<std::size_t>(y) * width;
    double s = 0.0;
    for (int i = -r; i <= r; ++i) s += row[reflect101(i, width)];
    out[0] = s;
    for (int x = 1; x < width; ++x) {
      s += row[reflect101(x + r, width)] - row[reflect101(x - 1 - r, width)];
      out[x] = s;
    }
  }
  for (int x = 0; x < width; ++x) {
    double s = 0.0;
    for (int i = -r; i <= r; ++i) s += tmp_[static_cast<std::size_t>(reflect101(i, height)) * width + x];
    dst[x] = s;
    for (int y = 1; y < height; ++y) {
      s += tmp_[static_cast<std::size_t>(reflect101(y + r, height)) * width + x] -
           tmp_[static_cast<std::size_t>(reflect101(y - 1 - r, height)) * width + x];
      dst[static_cast<std::size_t>(y) * width + x] = s;
    }
  }
}

void LocalThresholder::gaussian_blur(std::span<const double> src, int width, int height,
                                     std::span<double> dst) {
  const int r = params_.window / 2;
  tmp_.resize(src.size());
  for (int y = 0; y < height; ++y) {
    const double* row = src.data() + static_cast<std::size_t>(y) * width;
    double* out = tmp_.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += kernel_[i + r] * row[reflect101(x + i, width)];
      out[x] = s;
    }
  }
  for (int y = 0; y < height; ++y) {
    double* out = dst.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) out[x] = 0.0;
    for (int i = -r; i <= r; ++i) {
      const double kv = kernel_[i + r];
      const double* row = tmp_.data() + static_cast<std::size_t>(reflect101(y + i, height)) * width;
      for (int x = 0; x < width; ++x) out[x] += kv * row[x];
    }
  }
}

void LocalThresholder::apply(std::span<const Intensity> image, int width, int height,
                             std::span<std::uint8_t> out) {
  if (params_.window >= std::min(width, height)) {
    throw ConfigError("local threshold window must be smaller than the frame");
  }
  const std::size_t n = image.size();
  value_.resize(n);
  mean_.resize(n);
  for (std::size_t i = 0; i < n; ++i) value_[i] = image[i];

  if (method_ == LocalMethod::AdaptGauss) {
    gaussian_blur(value_, width, height, mean_);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = image[i] > static_cast<Intensity>(mean_[i] - params_.C);
    }
    return;
  }

  const double area = static_cast<double>(params_.window) * params_.window;
  box_sum(value_, width, height, mean_);
  if (method_ == LocalMethod::AdaptMean) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = image[i] > static_cast<Intensity>(mean_[i] / area - params_.C);
    }
    return;
  }

  // Sauvola: t = m * (1 + k * (s / R - 1)), R = dynamic range of the frame.
  square_.resize(n);
  second_.resize(n);
  for (std::size_t i = 0; i < n; ++i) square_[i] = value_[i] * value_[i];
  box_sum(square_, width, height, second_);
  auto [mn, mx] = std::minmax_element(image.begin(), image.end());
  const double range = static_cast<double>(*mx) - *mn;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = mean_[i] / area;
    const double s = std::sqrt(std::max(0.0, second_[i] / area - m * m));
    const double t = range > 0.0 ? m * (1.0 + params_.k * (s / range - 1.0)) : m;
    out[i] = image[i] > static_cast<Intensity>(t);
  }
}

Mask local_auto_threshold(const Frame& frame, LocalMethod method, int window, double k,
                          double C) {
  LocalThresholder lt(method, LocalParams{window, k, C});
  Mask m(frame.width(), frame.height());
  lt.apply(frame.pixels(), frame.width(), frame.height(), m.mutable_bits());
  return m;
}

}  // namespace lpbfseg

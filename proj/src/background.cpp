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

#include "lpbfseg/background.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <utility>

namespace lpbfseg {

double mixture_learning_rate(std::size_t frames_seen, int history) {
  const std::size_t n = std::max<std::size_t>(frames_seen, 1);
  return 1.0 / static_cast<double>(std::min<std::size_t>(n, static_cast<std::size_t>(history)));
}

namespace {

void check_frame_shape(int& width, int& height, int w, int h, std::size_t frames_seen,
                       const char* who) {
  if (frames_seen == 0) {
    width = w;
    height = h;
    return;
  }
  require_same_shape(width, height, w, h, who);
}

}  // namespace

// ---------------------------------------------------------------------------
// MOG

MogModel::MogModel(MogParams params) : params_(params) {
  if (params_.history < 1) throw ConfigError("MOG history must be >= 1");
  if (params_.nmixtures < 1) throw ConfigError("MOG nmixtures must be >= 1");
  if (!(params_.backRatio > 0.0 && params_.backRatio <= 1.0)) {
    throw ConfigError("MOG backRatio must lie in (0, 1]");
  }
  if (!(params_.noiseSigma > 0.0)) throw ConfigError("MOG noiseSigma must be > 0");
}

std::span<const MogModel::Component> MogModel::mixture(std::size_t pixel) const {
  const auto k = static_cast<std::size_t>(params_.nmixtures);
  return std::span<const Component>(model_).subspan(pixel * k, k);
}

void MogModel::apply(std::span<const Intensity> image, int width, int height,
                     std::span<std::uint8_t> out) {
  check_frame_shape(width_, height_, width, height, frames_seen_, "MOG");
  const int K = params_.nmixtures;
  if (frames_seen_ == 0) model_.assign(image.size() * static_cast<std::size_t>(K), Component{});
  ++frames_seen_;

  const float alpha = static_cast<float>(mixture_learning_rate(frames_seen_, params_.history));
  const double T = params_.backRatio;
  const float match = kMatchSigmas * kMatchSigmas;
  const float sigma0 = static_cast<float>(2.0 * params_.noiseSigma);
  const float w0 = 0.05f;
  const float var0 = sigma0 * sigma0;
  const float sk0 = w0 / sigma0;
  const float min_var = static_cast<float>(params_.noiseSigma * params_.noiseSigma);

  Component* mix = model_.data();
  for (std::size_t i = 0; i < image.size(); ++i, mix += K) {
    const float pix = image[i];
    int hit = -1;
    int k = 0;
    for (; k < K; ++k) {
      const float w = mix[k].weight;
      if (w < FLT_EPSILON) break;
      const float diff = pix - mix[k].mean;
      const float d2 = diff * diff;
      if (d2 < match * mix[k].var) {
        mix[k].weight = w + alpha * (1.0f - w);
        mix[k].mean += alpha * diff;
        const float var = std::max(mix[k].var + alpha * (d2 - mix[k].var), min_var);
        mix[k].var = var;
        mix[k].sort_key = mix[k].weight / std::sqrt(var);
        int k1 = k - 1;
        for (; k1 >= 0; --k1) {
          if (mix[k1].sort_key >= mix[k1 + 1].sort_key) break;
          std::swap(mix[k1], mix[k1 + 1]);
        }
        hit = k1 + 1;
        break;
      }
    }
    if (hit < 0) {
      // Replace the weakest (or first unused) component.
      hit = std::min(k, K - 1);
      mix[hit] = Component{w0, pix, var0, sk0};
      for (int k1 = hit - 1; k1 >= 0; --k1) {
        if (mix[k1].sort_key >= mix[k1 + 1].sort_key) break;
        std::swap(mix[k1], mix[k1 + 1]);
        hit = k1;
      }
    }

    double wsum = 0.0;
    for (int j = 0; j < K; ++j) wsum += mix[j].weight;
    const double scale = 1.0 / wsum;
    double acc = 0.0;
    int first_foreground = K;
    for (int j = 0; j < K; ++j) {
      mix[j].weight = static_cast<float>(mix[j].weight * scale);
      mix[j].sort_key = static_cast<float>(mix[j].sort_key * scale);
      acc += mix[j].weight;
      if (first_foreground == K && acc >= T) first_foreground = j + 1;
    }
    out[i] = hit >= first_foreground;
  }
}

// ---------------------------------------------------------------------------
// MOG2

Mog2Model::Mog2Model(Mog2Params params) : params_(params) {
  if (params_.history < 1) throw ConfigError("MOG2 history must be >= 1");
  if (params_.nmixtures < 1 || params_.nmixtures > 255) {
    throw ConfigError("MOG2 nmixtures must lie in [1, 255]");
  }
  if (!(params_.backRatio > 0.0 && params_.backRatio <= 1.0)) {
    throw ConfigError("MOG2 backRatio must lie in (0, 1]");
  }
  if (!(params_.thresh > 0.0)) throw ConfigError("MOG2 thresh must be > 0");
}

std::span<const Mog2Model::Component> Mog2Model::mixture(std::size_t pixel) const {
  const auto k = static_cast<std::size_t>(params_.nmixtures);
  return std::span<const Component>(model_).subspan(pixel * k, modes_[pixel]);
}

void Mog2Model::apply(std::span<const Intensity> image, int width, int height,
                      std::span<std::uint8_t> out) {
  check_frame_shape(width_, height_, width, height, frames_seen_, "MOG2");
  const int K = params_.nmixtures;
  if (frames_seen_ == 0) {
    model_.assign(image.size() * static_cast<std::size_t>(K), Component{});
    modes_.assign(image.size(), 0);
  }
  ++frames_seen_;

  const float alpha = static_cast<float>(mixture_learning_rate(frames_seen_, params_.history));
  const float decay = 1.0f - alpha;
  const float prune = -alpha * static_cast<float>(params_.complexityReduction);
  const float Tb = static_cast<float>(params_.thresh);
  const float Tg = static_cast<float>(params_.threshGen);
  const float TB = static_cast<float>(params_.backRatio);
  const float var_init = static_cast<float>(params_.varInit);
  const float var_min = static_cast<float>(params_.varMin);
  const float var_max = static_cast<float>(params_.varMax);

  Component* mix = model_.data();
  for (std::size_t i = 0; i < image.size(); ++i, mix += K) {
    const float pix = image[i];
    int n = modes_[i];
    bool fits = false;
    bool background = n == 0;
    float cumulative = 0.0f;
    for (int m = 0; m < n; ++m) {
      float w = decay * mix[m].weight + prune;
      if (!fits) {
        const float d = mix[m].mean - pix;
        const float d2 = d * d;
        if (cumulative < TB && d2 < Tb * mix[m].var) background = true;
        if (d2 < Tg * mix[m].var) {
          fits = true;
          w += alpha;
          const float k = alpha / w;
          mix[m].mean -= k * d;
          mix[m].var = std::clamp(mix[m].var + k * (d2 - mix[m].var), var_min, var_max);
        }
      }
      mix[m].weight = w;
      cumulative += std::max(w, 0.0f);
    }
    // Drop modes whose weight decayed to zero.
    int kept = 0;
    for (int m = 0; m < n; ++m) {
      if (mix[m].weight > 0.0f) mix[kept++] = mix[m];
    }
    n = kept;
    if (!fits) {
      const int slot = n == K ? K - 1 : n++;
      mix[slot] = Component{n == 1 ? 1.0f : alpha, pix, var_init};
    }
    double total = 0.0;
    for (int m = 0; m < n; ++m) total += mix[m].weight;
    const double scale = 1.0 / total;
    for (int m = 0; m < n; ++m) mix[m].weight = static_cast<float>(mix[m].weight * scale);
    for (int m = 1; m < n; ++m) {
      for (int j = m; j > 0 && mix[j].weight > mix[j - 1].weight; --j) std::swap(mix[j], mix[j - 1]);
    }
    modes_[i] = static_cast<std::uint8_t>(n);
    out[i] = !background;
  }
}

// ---------------------------------------------------------------------------
// KNN

KnnModel::KnnModel(KnnParams params)
    : params_(params),
      capacity_(std::min(params.history, params.samples)),
      rng_state_(params.seed * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL) {
  if (params_.history < 1) throw ConfigError("KNN history must be >= 1");
  if (params_.samples < 1) throw ConfigError("KNN samples must be >= 1");
  if (params_.k < 1) throw ConfigError("KNN k must be >= 1");
  if (!(params_.thresh > 0.0)) throw ConfigError("KNN thresh must be > 0");
  if (rng_state_ == 0) rng_state_ = 1;
}

std::uint64_t KnnModel::next_random() {
  // xorshift64*
  rng_state_ ^= rng_state_ >> 12;
  rng_state_ ^= rng_state_ << 25;
  rng_state_ ^= rng_state_ >> 27;
  return rng_state_ * 0x2545F4914F6CDD1DULL;
}

void KnnModel::apply(std::span<const Intensity> image, int width, int height,
                     std::span<std::uint8_t> out) {
  check_frame_shape(width_, height_, width, height, frames_seen_, "KNN");
  const auto cap = static_cast<std::size_t>(capacity_);
  if (frames_seen_ == 0) samples_.assign(image.size() * cap, 0.0f);
  ++frames_seen_;

  const float thresh = static_cast<float>(params_.thresh);
  const std::size_t needed = std::min<std::size_t>(static_cast<std::size_t>(params_.k), filled_);
  const double replace_p = std::min(1.0, static_cast<double>(cap) / params_.history);
  const auto replace_cut = static_cast<std::uint64_t>(replace_p * 18446744073709551615.0);
  const bool filling = filled_ < cap;

  for (std::size_t i = 0; i < image.size(); ++i) {
    const float pix = image[i];
    float* s = samples_.data() + i * cap;
    std::size_t close = 0;
    for (std::size_t j = 0; j < filled_ && close < needed; ++j) {
      const float d = s[j] - pix;
      if (d * d <= thresh) ++close;
    }
    out[i] = close < needed;
    if (filling) {
      s[filled_] = pix;
    } else if (replace_p >= 1.0 || next_random() <= replace_cut) {
      s[next_random() % cap] = pix;
    }
  }
  if (filling) ++filled_;
}

}  // namespace lpbfseg

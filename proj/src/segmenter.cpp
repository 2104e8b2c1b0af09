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

#include "lpbfseg/segmenter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <sstream>

namespace lpbfseg {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct NamedAlgorithm {
  const char* name;
  Algorithm algorithm;
  GlobalMethod global;
  LocalMethod local;
};

constexpr NamedAlgorithm kRoster[] = {
    {"Thresh", Algorithm::Thresh, GlobalMethod::Otsu, LocalMethod::AdaptMean},
    {"SubMax", Algorithm::SubMax, GlobalMethod::Otsu, LocalMethod::AdaptMean},
    {"FD", Algorithm::FD, GlobalMethod::Otsu, LocalMethod::AdaptMean},
    {"Otsu", Algorithm::GlobalAuto, GlobalMethod::Otsu, LocalMethod::AdaptMean},
    {"Li", Algorithm::GlobalAuto, GlobalMethod::Li, LocalMethod::AdaptMean},
    {"isodata", Algorithm::GlobalAuto, GlobalMethod::Isodata, LocalMethod::AdaptMean},
    {"Yen", Algorithm::GlobalAuto, GlobalMethod::Yen, LocalMethod::AdaptMean},
    {"Triangle", Algorithm::GlobalAuto, GlobalMethod::Triangle, LocalMethod::AdaptMean},
    {"Sauvola", Algorithm::LocalAuto, GlobalMethod::Otsu, LocalMethod::Sauvola},
    {"AdaptMean", Algorithm::LocalAuto, GlobalMethod::Otsu, LocalMethod::AdaptMean},
    {"AdaptGauss", Algorithm::LocalAuto, GlobalMethod::Otsu, LocalMethod::AdaptGauss},
    {"MOG", Algorithm::MOG, GlobalMethod::Otsu, LocalMethod::AdaptMean},
    {"MOG2", Algorithm::MOG2, GlobalMethod::Otsu, LocalMethod::AdaptMean},
    {"KNN", Algorithm::KNN, GlobalMethod::Otsu, LocalMethod::AdaptMean},
};

bool is_integer_param(const std::string& key) {
  return key == "history" || key == "nmixtures" || key == "box" || key == "nbins" ||
         key == "samples";
}

// ---------------------------------------------------------------------------
// Adapters that expose the stateless thresholds as ForegroundModels.

class FixedThresholdModel final : public ForegroundModel {
 public:
  explicit FixedThresholdModel(double lambda) : lambda_(lambda) {}
  void apply(std::span<const Intensity> image, int, int, std::span<std::uint8_t> out) override {
    threshold_fixed(image, lambda_, out);
  }

 private:
  double lambda_;
};

class SubMaxModel final : public ForegroundModel {
 public:
  explicit SubMaxModel(double delta) : delta_(delta) {}
  void apply(std::span<const Intensity> image, int, int, std::span<std::uint8_t> out) override {
    submax(image, delta_, out);
  }

 private:
  double delta_;
};

class GlobalAutoModel final : public ForegroundModel {
 public:
  GlobalAutoModel(GlobalMethod method, int nbins) : method_(method), nbins_(nbins) {}
  void apply(std::span<const Intensity> image, int, int, std::span<std::uint8_t> out) override {
    const AutoThreshold t = global_auto_threshold(image, method_, nbins_);
    if (t.degenerate) {
      std::fill(out.begin(), out.end(), std::uint8_t{0});
      return;
    }
    threshold_fixed(image, t.threshold, out);
  }

 private:
  GlobalMethod method_;
  int nbins_;
};

class LocalAutoModel final : public ForegroundModel {
 public:
  LocalAutoModel(LocalMethod method, LocalParams params) : thresholder_(method, params) {}
  void apply(std::span<const Intensity> image, int width, int height,
             std::span<std::uint8_t> out) override {
    thresholder_.apply(image, width, height, out);
  }

 private:
  LocalThresholder thresholder_;
};

std::unique_ptr<ForegroundModel> build_model(const SegmenterSpec& s) {
  switch (s.algorithm) {
    case Algorithm::Thresh: return std::make_unique<FixedThresholdModel>(s.param("lambda"));
    case Algorithm::SubMax: return std::make_unique<SubMaxModel>(s.param("delta"));
    case Algorithm::FD: return nullptr;
    case Algorithm::GlobalAuto:
      return std::make_unique<GlobalAutoModel>(s.global_method,
                                               static_cast<int>(s.param("nbins")));
    case Algorithm::LocalAuto: {
      LocalParams lp;
      lp.window = static_cast<int>(s.param("box"));
      if (s.local_method == LocalMethod::Sauvola) {
        lp.k = s.param("k");
      } else {
        lp.C = s.param("C");
      }
      return std::make_unique<LocalAutoModel>(s.local_method, lp);
    }
    case Algorithm::MOG: {
      MogParams p;
      p.history = static_cast<int>(s.param("history"));
      p.nmixtures = static_cast<int>(s.param("nmixtures"));
      p.backRatio = s.param("backRatio");
      p.noiseSigma = s.param("noiseSigma");
      return std::make_unique<MogModel>(p);
    }
    case Algorithm::MOG2: {
      Mog2Params p;
      p.history = static_cast<int>(s.param("history"));
      p.thresh = s.param("thresh");
      p.nmixtures = static_cast<int>(s.param("nmixtures"));
      p.backRatio = s.param("backRatio");
      return std::make_unique<Mog2Model>(p);
    }
    case Algorithm::KNN: {
      KnnParams p;
      p.history = static_cast<int>(s.param("history"));
      p.thresh = s.param("thresh");
      p.samples = static_cast<int>(s.param("samples"));
      p.seed = s.seed;
      return std::make_unique<KnnModel>(p);
    }
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace

std::string SegmenterSpec::base_name() const {
  for (const auto& r : kRoster) {
    if (r.algorithm != algorithm) continue;
    if (algorithm == Algorithm::GlobalAuto && r.global != global_method) continue;
    if (algorithm == Algorithm::LocalAuto && r.local != local_method) continue;
    return r.name;
  }
  return "?";
}

std::string SegmenterSpec::name() const { return (fd_prefix ? "FD+" : "") + base_name(); }

double SegmenterSpec::param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError(name() + ": missing parameter '" + key + "'");
  return it->second;
}

std::vector<std::string> known_algorithms() {
  std::vector<std::string> out;
  for (const auto& r : kRoster) out.emplace_back(r.name);
  return out;
}

SegmenterSpec parse_spec(std::string_view name) {
  std::string key = lower(name);
  key.erase(std::remove_if(key.begin(), key.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
            key.end());
  SegmenterSpec spec;
  if (key.rfind("fd+", 0) == 0) {
    spec.fd_prefix = true;
    key = key.substr(3);
  }
  for (const auto& r : kRoster) {
    if (lower(r.name) == key) {
      spec.algorithm = r.algorithm;
      spec.global_method = r.global;
      spec.local_method = r.local;
      if (spec.fd_prefix && spec.algorithm == Algorithm::FD) {
        throw ConfigError("FD cannot be wrapped with another FD prefix");
      }
      return spec;
    }
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::vector<std::string> param_names(const SegmenterSpec& spec) {
  switch (spec.algorithm) {
    case Algorithm::Thresh: return {"lambda"};
    case Algorithm::SubMax: return {"delta"};
    case Algorithm::FD: return {};
    case Algorithm::GlobalAuto: return {"nbins"};
    case Algorithm::LocalAuto:
      if (spec.local_method == LocalMethod::Sauvola) return {"box", "k"};
      return {"C", "box"};
    case Algorithm::MOG: return {"backRatio", "history", "nmixtures", "noiseSigma"};
    case Algorithm::MOG2: return {"backRatio", "history", "nmixtures", "thresh"};
    case Algorithm::KNN: return {"history", "samples", "thresh"};
  }
  return {};
}

ParamMap default_params(const SegmenterSpec& spec) {
  switch (spec.algorithm) {
    case Algorithm::Thresh: return {{"lambda", spec.fd_prefix ? 3.0 : 295.0}};
    case Algorithm::SubMax: return {{"delta", 20.0}};
    case Algorithm::FD: return {};
    case Algorithm::GlobalAuto: return {{"nbins", 256.0}};
    case Algorithm::LocalAuto:
      if (spec.local_method == LocalMethod::Sauvola) return {{"box", 15.0}, {"k", 0.2}};
      return {{"C", 2.0}, {"box", 11.0}};
    case Algorithm::MOG:
      return {{"backRatio", 0.7}, {"history", 200.0}, {"nmixtures", 5.0}, {"noiseSigma", 15.0}};
    case Algorithm::MOG2:
      return {{"backRatio", 0.9}, {"history", 500.0}, {"nmixtures", 5.0}, {"thresh", 16.0}};
    case Algorithm::KNN: return {{"history", 500.0}, {"samples", 32.0}, {"thresh", 400.0}};
  }
  return {};
}

ParamMap calibrated_params(const SegmenterSpec& spec) {
  const bool fd = spec.fd_prefix;
  switch (spec.algorithm) {
    case Algorithm::Thresh: return {{"lambda", fd ? 4.44 : 377.60}};
    case Algorithm::SubMax:
      if (fd) return {};
      return {{"delta", 125.81}};
    case Algorithm::MOG:
      if (fd) return {{"backRatio", 0.77}, {"history", 29.0}, {"nmixtures", 327.0}};
      return {{"backRatio", 0.47}, {"history", 14.0}, {"nmixtures", 290.0}};
    case Algorithm::MOG2:
      if (fd) return {{"history", 27.0}, {"thresh", 1.10}};
      return {{"history", 67.0}, {"thresh", 10.10}};
    case Algorithm::KNN:
      if (fd) return {{"history", 2.0}, {"thresh", 4.40}};
      return {{"history", 68.0}, {"thresh", 298.81}};
    case Algorithm::LocalAuto:
      switch (spec.local_method) {
        case LocalMethod::AdaptMean:
          if (fd) return {{"C", 66.0}, {"box", 263.0}};
          return {{"C", 0.0}, {"box", 451.0}};
        case LocalMethod::AdaptGauss:
          if (fd) return {{"C", 78.0}, {"box", 7.0}};
          return {{"C", 2.0}, {"box", 387.0}};
        case LocalMethod::Sauvola:
          if (fd) return {{"box", 37.0}, {"k", 0.23}};
          return {{"box", 79.0}, {"k", 0.41}};
      }
      return {};
    case Algorithm::FD:
    case Algorithm::GlobalAuto: return {};
  }
  return {};
}

void validate_spec(const SegmenterSpec& spec) {
  const auto names = param_names(spec);
  for (const auto& [key, value] : spec.params) {
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      throw ConfigError(spec.name() + ": unknown parameter '" + key + "'");
    }
    if (!std::isfinite(value)) throw ConfigError(spec.name() + ": parameter '" + key + "' is not finite");
    if (is_integer_param(key) && std::floor(value) != value) {
      throw ConfigError(spec.name() + ": parameter '" + key + "' must be an integer");
    }
  }
  for (const auto& key : names) {
    if (!spec.params.count(key)) throw ConfigError(spec.name() + ": missing parameter '" + key + "'");
  }
  auto fail = [&](const std::string& what) { throw ConfigError(spec.name() + ": " + what); };
  auto get = [&](const char* k) { return spec.params.at(k); };
  switch (spec.algorithm) {
    case Algorithm::Thresh:
      if (get("lambda") < 0) fail("lambda must be >= 0");
      break;
    case Algorithm::SubMax:
      if (get("delta") < 0) fail("delta must be >= 0");
      break;
    case Algorithm::GlobalAuto:
      if (get("nbins") < 2) fail("nbins must be >= 2");
      break;
    case Algorithm::LocalAuto: {
      const double box = get("box");
      if (box < 3 || static_cast<long long>(box) % 2 == 0) fail("box must be odd and >= 3");
      break;
    }
    case Algorithm::MOG:
      if (get("history") < 1) fail("history must be >= 1");
      if (get("nmixtures") < 1) fail("nmixtures must be >= 1");
      if (!(get("backRatio") > 0 && get("backRatio") <= 1)) fail("backRatio must lie in (0, 1]");
      if (!(get("noiseSigma") > 0)) fail("noiseSigma must be > 0");
      break;
    case Algorithm::MOG2:
      if (get("history") < 1) fail("history must be >= 1");
      if (get("nmixtures") < 1 || get("nmixtures") > 255) fail("nmixtures must lie in [1, 255]");
      if (!(get("backRatio") > 0 && get("backRatio") <= 1)) fail("backRatio must lie in (0, 1]");
      if (!(get("thresh") > 0)) fail("thresh must be > 0");
      break;
    case Algorithm::KNN:
      if (get("history") < 1) fail("history must be >= 1");
      if (get("samples") < 1) fail("samples must be >= 1");
      if (!(get("thresh") > 0)) fail("thresh must be > 0");
      break;
    case Algorithm::FD: break;
  }
}

SegmenterSpec with_defaults(SegmenterSpec spec) {
  for (const auto& [key, value] : default_params(spec)) spec.params.try_emplace(key, value);
  validate_spec(spec);
  return spec;
}

SegmenterSpec make_spec(std::string_view name, ParamPreset preset) {
  SegmenterSpec spec = parse_spec(name);
  if (preset == ParamPreset::Calibrated) spec.params = calibrated_params(spec);
  return with_defaults(std::move(spec));
}

// ---------------------------------------------------------------------------

Segmenter::Segmenter(SegmenterSpec spec) : spec_(with_defaults(std::move(spec))) {
  name_ = spec_.name();
  plain_fd_ = spec_.algorithm == Algorithm::FD;
  fd_prefix_ = spec_.fd_prefix;
  model_ = build_model(spec_);
}

Segmenter::Segmenter(std::string name, std::unique_ptr<ForegroundModel> model, bool fd_prefix)
    : name_(fd_prefix ? "FD+" + name : name), fd_prefix_(fd_prefix), model_(std::move(model)) {
  if (!model_) throw ConfigError("plug-in segmenter needs a model");
  spec_.fd_prefix = fd_prefix;
}

Mask Segmenter::step(const Frame& frame) {
  Mask out;
  step(frame, out);
  return out;
}

void Segmenter::step(const Frame& frame, Mask& out) {
  const int w = frame.width();
  const int h = frame.height();
  if (frames_seen_ == 0) {
    width_ = w;
    height_ = h;
  } else {
    require_same_shape(width_, height_, w, h, "Segmenter::step");
  }
  if (!out.same_shape(w, h)) out.reset(w, h);
  auto bits = out.mutable_bits();
  auto pixels = frame.pixels();
  ++frames_seen_;

  if (plain_fd_ || fd_prefix_) {
    if (!has_previous_) {
      std::fill(bits.begin(), bits.end(), std::uint8_t{0});
      previous_.assign(pixels.begin(), pixels.end());
      difference_.resize(pixels.size());
      has_previous_ = true;
      return;
    }
    frame_difference(pixels, previous_, difference_, spec_.fd_absolute);
    std::memcpy(previous_.data(), pixels.data(), pixels.size() * sizeof(Intensity));
    if (plain_fd_) {
      threshold_fixed(difference_, 0.0, bits);
      return;
    }
    zero_at_or_below(difference_, kDifferenceFloor);
    model_->apply(difference_, w, h, bits);
    return;
  }
  model_->apply(pixels, w, h, bits);
}

std::vector<Mask> segment_sequence(const SegmenterSpec& spec, const FrameSequence& seq) {
  Segmenter seg(spec);
  std::vector<Mask> out;
  out.reserve(seq.size());
  for (const auto& f : seq) out.push_back(seg.step(f));
  return out;
}

}  // namespace lpbfseg

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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lpbfseg/background.hpp"
#include "lpbfseg/core.hpp"
#include "lpbfseg/thresholds.hpp"

namespace lpbfseg {

enum class Algorithm { Thresh, SubMax, FD, GlobalAuto, LocalAuto, MOG, MOG2, KNN };

enum class ParamPreset { Default, Calibrated };

using ParamMap = std::map<std::string, double>;

/// Algorithm identifier plus parameter set: the unit of tuning and
/// benchmarking. Construct through parse_spec() or make_spec() so that every
/// parameter the algorithm uses is present.
struct SegmenterSpec {
  Algorithm algorithm = Algorithm::Thresh;
  GlobalMethod global_method = GlobalMethod::Otsu;  ///< when algorithm == GlobalAuto
  LocalMethod local_method = LocalMethod::AdaptMean;  ///< when algorithm == LocalAuto
  bool fd_prefix = false;
  bool fd_absolute = false;  ///< |cur - prev| instead of clamping negative differences
  ParamMap params;
  std::uint64_t seed = 0;  ///< KNN reservoir replacement

  /// Display name, e.g. "FD+Thresh", "Otsu", "MOG2".
  std::string name() const;
  /// Name of the wrapped algorithm without any "FD+" prefix.
  std::string base_name() const;
  double param(const std::string& key) const;
  bool operator==(const SegmenterSpec&) const = default;
};

/// Parses "Thresh", "FD+Yen", "fd+mog" ... (case-insensitive). Parameters are
/// left empty; pass through with_defaults() or make_spec().
SegmenterSpec parse_spec(std::string_view name);

/// Parameter names the algorithm accepts, in a stable order.
std::vector<std::string> param_names(const SegmenterSpec& spec);

/// Default parameter values. FD+Thresh defaults lambda to 3, plain Thresh to
/// the cutoff temperature 295.
ParamMap default_params(const SegmenterSpec& spec);

/// Calibrated values for the combinations that have them; empty otherwise.
ParamMap calibrated_params(const SegmenterSpec& spec);

/// Fills missing parameters from the defaults and validates the result.
/// Unknown parameter names and out-of-range values throw ConfigError.
SegmenterSpec with_defaults(SegmenterSpec spec);

/// parse_spec + preset parameters + validation.
SegmenterSpec make_spec(std::string_view name, ParamPreset preset = ParamPreset::Default);

/// Throws ConfigError when a parameter is missing, unknown or out of range.
void validate_spec(const SegmenterSpec& spec);

/// Every algorithm name accepted by parse_spec (without FD prefixes).
std::vector<std::string> known_algorithms();

/// Streaming segmenter: feed frames of one sequence in order, get one mask per
/// frame. Single owner; not thread-safe.
///
/// With fd_prefix set the pipeline per frame is: difference against the
/// previous frame (negative values clamped to 0), zero every pixel <= 1, then
/// hand the difference image to the wrapped algorithm. The first frame yields
/// an all-false mask. Plain FD marks every pixel with a positive difference.
class Segmenter {
 public:
  explicit Segmenter(SegmenterSpec spec);
  /// Plug-in constructor for models outside the built-in roster.
  Segmenter(std::string name, std::unique_ptr<ForegroundModel> model, bool fd_prefix);

  /// Writes the mask for `frame` into `out` (resized as needed). Throws
  /// ShapeError when the frame size differs from earlier frames.
  void step(const Frame& frame, Mask& out);
  Mask step(const Frame& frame);

  const SegmenterSpec& spec() const { return spec_; }
  const std::string& name() const { return name_; }
  std::size_t frames_seen() const { return frames_seen_; }
  bool has_previous_frame() const { return has_previous_; }
  const ForegroundModel* model() const { return model_.get(); }

  /// Intensity at or below which frame differences are zeroed before the
  /// wrapped algorithm runs.
  static constexpr Intensity kDifferenceFloor = 1.0f;

 private:
  SegmenterSpec spec_;
  std::string name_;
  bool plain_fd_ = false;
  bool fd_prefix_ = false;
  std::unique_ptr<ForegroundModel> model_;
  std::vector<Intensity> previous_;
  std::vector<Intensity> difference_;
  bool has_previous_ = false;
  std::size_t frames_seen_ = 0;
  int width_ = 0;
  int height_ = 0;
};

/// Runs a fresh segmenter over a whole sequence.
std::vector<Mask> segment_sequence(const SegmenterSpec& spec, const FrameSequence& seq);

}  // namespace lpbfseg

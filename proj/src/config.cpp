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

#include "lpbfseg/config.hpp"

#include <fstream>
#include <optional>
#include <set>

namespace lpbfseg {

namespace {

template <class T>
void read_field(const Json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  std::set<std::string> known(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(std::string(what) + ": unknown field '" + it.key() + "'");
  }
}

const char* direction_name(ScanDirection d) {
  switch (d) {
    case ScanDirection::LeftToRight: return "left_to_right";
    case ScanDirection::RightToLeft: return "right_to_left";
    case ScanDirection::TopToBottom: return "top_to_bottom";
    case ScanDirection::BottomToTop: return "bottom_to_top";
  }
  return "left_to_right";
}

ScanDirection direction_from(const std::string& s) {
  if (s == "left_to_right") return ScanDirection::LeftToRight;
  if (s == "right_to_left") return ScanDirection::RightToLeft;
  if (s == "top_to_bottom") return ScanDirection::TopToBottom;
  if (s == "bottom_to_top") return ScanDirection::BottomToTop;
  throw ConfigError("unknown scan direction '" + s + "'");
}

Json params_object(const ParamMap& p) {
  Json j = Json::object();
  for (const auto& [k, v] : p) {
    if (std::floor(v) == v && std::abs(v) < 1e15) {
      j[k] = static_cast<long long>(v);
    } else {
      j[k] = v;
    }
  }
  return j;
}

ParamMap params_from(const Json& j) {
  if (!j.is_object()) throw ConfigError("parameters must be a JSON object");
  ParamMap p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number()) throw ConfigError("parameter '" + it.key() + "' must be a number");
    p[it.key()] = it.value().get<double>();
  }
  return p;
}

}  // namespace

Json to_json(const ParamMap& p) { return params_object(p); }

Json to_json(const Rect& r) {
  return Json{{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

Rect rect_from_json(const Json& j) {
  reject_unknown(j, {"x", "y", "width", "height"}, "rectangle");
  Rect r;
  read_field(j, "x", r.x);
  read_field(j, "y", r.y);
  read_field(j, "width", r.width);
  read_field(j, "height", r.height);
  return r;
}

Json to_json(const SegmenterSpec& s) {
  Json j{{"algorithm", s.name()}, {"params", params_object(s.params)}};
  if (s.fd_absolute) j["fd_absolute"] = true;
  if (s.algorithm == Algorithm::KNN) j["seed"] = s.seed;
  return j;
}

SegmenterSpec spec_from_json(const Json& j) {
  reject_unknown(j, {"algorithm", "params", "seed", "fd_absolute"}, "segmenter");
  if (!j.contains("algorithm") || !j["algorithm"].is_string())
    throw ConfigError("segmenter: 'algorithm' must be a string");
  SegmenterSpec s = parse_spec(j["algorithm"].get<std::string>());
  if (j.contains("params")) s.params = params_from(j["params"]);
  read_field(j, "seed", s.seed);
  read_field(j, "fd_absolute", s.fd_absolute);
  return with_defaults(std::move(s));
}

Json to_json(const GtConfig& c) {
  Json j{{"frame_width", c.frame_width},   {"frame_height", c.frame_height},
         {"track_width", c.track_width},   {"cutoff", c.cutoff},
         {"cross_section", to_json(c.cross_section)},
         {"scan_direction", direction_name(c.scan_direction)},
         {"inner_buffer", c.inner_buffer}, {"outer_buffer", c.outer_buffer}};
  if (c.box_height) j["box_height"] = c.box_height;
  return j;
}

GtConfig gt_config_from_json(const Json& j) {
  reject_unknown(j,
                 {"frame_width", "frame_height", "track_width", "cutoff", "cross_section",
                  "scan_direction", "inner_buffer", "outer_buffer", "box_height"},
                 "ground-truth config");
  GtConfig c;
  read_field(j, "frame_width", c.frame_width);
  read_field(j, "frame_height", c.frame_height);
  read_field(j, "track_width", c.track_width);
  read_field(j, "cutoff", c.cutoff);
  if (j.contains("cross_section")) c.cross_section = rect_from_json(j["cross_section"]);
  if (j.contains("scan_direction")) c.scan_direction = direction_from(j["scan_direction"].get<std::string>());
  c.inner_buffer = c.track_width / 2;
  c.outer_buffer = 5 * c.track_width;
  read_field(j, "inner_buffer", c.inner_buffer);
  read_field(j, "outer_buffer", c.outer_buffer);
  read_field(j, "box_height", c.box_height);
  c.validate();
  return c;
}

Json to_json(const SimConfig& c) {
  Json j{{"width", c.width},
         {"height", c.height},
         {"bed_temp", c.bed_temp},
         {"bed_noise_sigma", c.bed_noise_sigma},
         {"bed_pattern_sigma", c.bed_pattern_sigma},
         {"peak_temp", c.peak_temp},
         {"spot_sigma", c.spot_sigma},
         {"scan_speed", c.scan_speed},
         {"track_pitch", c.track_pitch},
         {"track_count", c.track_count},
         {"cross_section", to_json(c.cross_section)},
         {"cooling_time_constant", c.cooling_time_constant},
         {"warmup_frames", c.warmup_frames},
         {"laser_off_gap_frames", c.laser_off_gap_frames},
         {"spatter_rate", c.spatter_rate},
         {"spatter_temp", c.spatter_temp},
         {"seed", c.seed},
         {"calibration_tracks", c.calibration_tracks},
         {"frame_rate", c.frame_rate}};
  if (c.cutoff) j["cutoff"] = *c.cutoff;
  if (c.box_height) j["box_height"] = c.box_height;
  return j;
}

SimConfig sim_config_from_json(const Json& j) {
  reject_unknown(j,
                 {"width", "height", "bed_temp", "bed_noise_sigma", "bed_pattern_sigma", "peak_temp",
                  "spot_sigma", "scan_speed", "track_pitch", "track_count", "cross_section",
                  "cooling_time_constant", "warmup_frames", "laser_off_gap_frames", "spatter_rate",
                  "spatter_temp", "seed", "calibration_tracks", "frame_rate", "cutoff", "box_height"},
                 "simulation config");
  SimConfig c;
  read_field(j, "width", c.width);
  read_field(j, "height", c.height);
  read_field(j, "bed_temp", c.bed_temp);
  read_field(j, "bed_noise_sigma", c.bed_noise_sigma);
  read_field(j, "bed_pattern_sigma", c.bed_pattern_sigma);
  read_field(j, "peak_temp", c.peak_temp);
  read_field(j, "spot_sigma", c.spot_sigma);
  read_field(j, "scan_speed", c.scan_speed);
  read_field(j, "track_pitch", c.track_pitch);
  read_field(j, "track_count", c.track_count);
  if (j.contains("cross_section")) c.cross_section = rect_from_json(j["cross_section"]);
  read_field(j, "cooling_time_constant", c.cooling_time_constant);
  read_field(j, "warmup_frames", c.warmup_frames);
  read_field(j, "laser_off_gap_frames", c.laser_off_gap_frames);
  read_field(j, "spatter_rate", c.spatter_rate);
  read_field(j, "spatter_temp", c.spatter_temp);
  read_field(j, "seed", c.seed);
  read_field(j, "calibration_tracks", c.calibration_tracks);
  read_field(j, "frame_rate", c.frame_rate);
  read_field(j, "box_height", c.box_height);
  if (j.contains("cutoff") && !j["cutoff"].is_null()) {
    double v = 0;
    read_field(j, "cutoff", v);
    c.cutoff = v;
  }
  c.validate();
  return c;
}

Json to_json(const ParamSpace& s) {
  Json j = Json::object();
  for (const auto& [name, r] : s) {
    Json e{{"low", r.low}, {"high", r.high}, {"scale", r.scale == Scale::Log ? "log" : "linear"}};
    if (r.integer) e["integer"] = true;
    if (r.odd) e["odd"] = true;
    j[name] = e;
  }
  return j;
}

ParamSpace param_space_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("parameter space must be a JSON object");
  ParamSpace s;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& e = it.value();
    reject_unknown(e, {"low", "high", "scale", "integer", "odd"}, "parameter range");
    if (!e.contains("low") || !e.contains("high"))
      throw ConfigError("parameter range '" + it.key() + "' needs low and high");
    ParamRange r;
    read_field(e, "low", r.low);
    read_field(e, "high", r.high);
    std::string scale = "linear";
    read_field(e, "scale", scale);
    if (scale == "log") {
      r.scale = Scale::Log;
    } else if (scale != "linear") {
      throw ConfigError("parameter range '" + it.key() + "': scale must be linear or log");
    }
    read_field(e, "integer", r.integer);
    read_field(e, "odd", r.odd);
    if (r.odd) r.integer = true;
    s[it.key()] = r;
  }
  return s;
}

Json to_json(const TuneResult& r) {
  Json trials = Json::array();
  for (const auto& t : r.trials) trials.push_back(Json{{"params", params_object(t.params)}, {"f1", t.f1}});
  return Json{{"algorithm", r.algorithm},   {"seed", r.seed},
              {"best_trial", r.best_trial}, {"best_f1", r.best_f1},
              {"best_params", params_object(r.best_params)}, {"trials", trials}};
}

TuneResult tune_result_from_json(const Json& j) {
  reject_unknown(j, {"algorithm", "seed", "best_trial", "best_f1", "best_params", "trials"}, "tune result");
  TuneResult r;
  read_field(j, "algorithm", r.algorithm);
  read_field(j, "seed", r.seed);
  read_field(j, "best_trial", r.best_trial);
  read_field(j, "best_f1", r.best_f1);
  if (j.contains("best_params")) r.best_params = params_from(j["best_params"]);
  if (j.contains("trials")) {
    for (const auto& t : j["trials"]) {
      Trial tr;
      if (t.contains("params")) tr.params = params_from(t["params"]);
      read_field(t, "f1", tr.f1);
      r.trials.push_back(std::move(tr));
    }
  }
  return r;
}

Json to_json(const BenchReport& r) {
  return Json{{"algorithm", r.name},
              {"params", params_object(r.params)},
              {"frames_timed", r.frames_timed},
              {"warmup_frames_excluded", r.warmup_frames_excluded},
              {"mean_ms", r.mean_ms},
              {"median_ms", r.median_ms},
              {"p99_ms", r.p99_ms}};
}

Json to_json(const Score& s) {
  return Json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

Json to_json(const ConfusionCounts& c) {
  return Json{{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

Json parameter_presets() {
  Json def = Json::object(), cal = Json::object();
  for (const auto& base : known_algorithms()) {
    for (bool fd : {false, true}) {
      if (fd && base == "FD") continue;
      std::string name = fd ? "FD+" + base : base;
      SegmenterSpec s = parse_spec(name);
      def[name] = params_object(default_params(s));
      ParamMap c = calibrated_params(s);
      if (!c.empty()) cal[name] = params_object(c);
    }
  }
  return Json{{"default", def}, {"calibrated", cal}};
}

ParamMap params_from_file(const std::filesystem::path& path, const SegmenterSpec& spec) {
  Json j = read_json(path);
  if (!j.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
  if (j.contains("best_params")) {
    if (j.contains("algorithm") && parse_spec(j["algorithm"].get<std::string>()).name() != spec.name())
      throw ConfigError(path.string() + ": tune result is for " + j["algorithm"].get<std::string>() +
                        ", not " + spec.name());
    return params_from(j["best_params"]);
  }
  if (j.contains("params")) return params_from(j["params"]);
  // Preset table, keyed by preset and/or algorithm name.
  const Json* table = &j;
  if (j.contains("calibrated") && j["calibrated"].is_object()) table = &j["calibrated"];
  for (auto it = table->begin(); it != table->end(); ++it) {
    if (!it.value().is_object()) continue;
    std::optional<SegmenterSpec> keyed;
    try {
      keyed = parse_spec(it.key());
    } catch (const ConfigError&) {
      continue;
    }
    if (keyed->name() == spec.name()) return params_from(it.value());
  }
  if (table != &j) throw ConfigError(path.string() + ": no parameters for " + spec.name());
  return params_from(j);
}

std::vector<GroundTruth> GtSidecar::ground_truth() const {
  GroundTruthBuilder b(gt);
  std::vector<GroundTruth> out;
  out.reserve(laser.size());
  std::optional<Point> prev;
  for (const auto& l : laser) {
    out.push_back(b.build(prev, l.position()));
    prev = l.position();
  }
  return out;
}

Json to_json(const GtSidecar& s) {
  Json frames = Json::array();
  for (std::size_t i = 0; i < s.laser.size(); ++i) {
    const auto& l = s.laser[i];
    Json f{{"index", i}, {"laser_on", l.on}};
    if (l.on) {
      f["center"] = Json::array({l.center.x, l.center.y});
      f["track"] = l.track;
    }
    frames.push_back(std::move(f));
  }
  Json j{{"gt_config", to_json(s.gt)},
         {"cutoff", {{"cutoff", s.cutoff.cutoff}, {"sigma_bs", s.cutoff.sigma_bs}, {"t_max", s.cutoff.t_max}}},
         {"calibration_frames", s.calibration_frames}};
  if (s.sim) j["sim_config"] = to_json(*s.sim);
  j["frames"] = std::move(frames);
  return j;
}

GtSidecar sidecar_from_json(const Json& j) {
  reject_unknown(j, {"gt_config", "cutoff", "calibration_frames", "sim_config", "frames"}, "ground-truth sidecar");
  if (!j.contains("gt_config") || !j.contains("frames"))
    throw ConfigError("ground-truth sidecar needs gt_config and frames");
  GtSidecar s;
  s.gt = gt_config_from_json(j["gt_config"]);
  if (j.contains("sim_config")) s.sim = sim_config_from_json(j["sim_config"]);
  if (j.contains("cutoff")) {
    read_field(j["cutoff"], "cutoff", s.cutoff.cutoff);
    read_field(j["cutoff"], "sigma_bs", s.cutoff.sigma_bs);
    read_field(j["cutoff"], "t_max", s.cutoff.t_max);
  }
  read_field(j, "calibration_frames", s.calibration_frames);
  for (const auto& f : j["frames"]) {
    LaserState l;
    read_field(f, "laser_on", l.on);
    if (l.on) {
      if (!f.contains("center") || f["center"].size() != 2)
        throw ConfigError("ground-truth sidecar: laser-on frame without a center");
      l.center = Point{f["center"][0].get<int>(), f["center"][1].get<int>()};
      read_field(f, "track", l.track);
    }
    s.laser.push_back(l);
  }
  return s;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace lpbfseg

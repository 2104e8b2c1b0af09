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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lpbfseg/bench.hpp"
#include "lpbfseg/config.hpp"
#include "lpbfseg/evaluation.hpp"
#include "lpbfseg/groundtruth.hpp"
#include "lpbfseg/segmenter.hpp"
#include "lpbfseg/seqio.hpp"
#include "lpbfseg/simulator.hpp"
#include "lpbfseg/storage.hpp"
#include "lpbfseg/study.hpp"
#include "lpbfseg/thresholds.hpp"
#include "lpbfseg/tuning.hpp"

namespace py = pybind11;
using namespace lpbfseg;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Frame to_frame(const FloatArray& a, std::size_t index = 0) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-D array (height, width)");
  const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  return Frame(w, h, std::vector<float>(a.data(), a.data() + a.size()), index);
}

Mask to_mask(const ByteArray& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-D array (height, width)");
  return Mask(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
              std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

py::array_t<float> from_frame(const Frame& f) {
  py::array_t<float> out({f.height(), f.width()});
  std::copy(f.pixels().begin(), f.pixels().end(), out.mutable_data());
  return out;
}

py::array_t<bool> from_mask(const Mask& m) {
  py::array_t<bool> out({m.height(), m.width()});
  bool* d = out.mutable_data();
  for (std::size_t i = 0; i < m.size(); ++i) d[i] = m.bits()[i] != 0;
  return out;
}

py::array_t<std::uint8_t> from_labels(const GroundTruth& gt) {
  py::array_t<std::uint8_t> out({gt.height, gt.width});
  std::uint8_t* d = out.mutable_data();
  for (std::size_t i = 0; i < gt.labels.size(); ++i) d[i] = static_cast<std::uint8_t>(gt.labels[i]);
  return out;
}

// Frames from a (N, H, W) array.
std::vector<Frame> to_frames(const FloatArray& a) {
  if (a.ndim() != 3) throw ShapeError("expected a 3-D array (frames, height, width)");
  const auto n = a.shape(0), h = a.shape(1), w = a.shape(2);
  std::vector<Frame> out;
  out.reserve(static_cast<std::size_t>(n));
  for (py::ssize_t i = 0; i < n; ++i) {
    const float* p = a.data() + i * h * w;
    out.emplace_back(static_cast<int>(w), static_cast<int>(h), std::vector<float>(p, p + h * w),
                     static_cast<std::size_t>(i));
  }
  return out;
}

std::vector<GroundTruth> to_truth(const ByteArray& a) {
  if (a.ndim() != 3) throw ShapeError("expected a 3-D label array (frames, height, width)");
  const auto n = a.shape(0), h = a.shape(1), w = a.shape(2);
  std::vector<GroundTruth> out(static_cast<std::size_t>(n));
  for (py::ssize_t i = 0; i < n; ++i) {
    auto& gt = out[static_cast<std::size_t>(i)];
    gt.width = static_cast<int>(w);
    gt.height = static_cast<int>(h);
    gt.labels.resize(static_cast<std::size_t>(h * w));
    const std::uint8_t* p = a.data() + i * h * w;
    for (py::ssize_t k = 0; k < h * w; ++k) {
      if (p[k] > 2) throw ConfigError("labels must be 0 (background), 1 (foreground) or 2 (excluded)");
      gt.labels[static_cast<std::size_t>(k)] = static_cast<Label>(p[k]);
    }
  }
  return out;
}

Json parse(const std::string& s) { return s.empty() ? Json::object() : Json::parse(s); }

SegmenterSpec spec_of(const std::string& name, const std::string& params_json, const std::string& preset) {
  SegmenterSpec s = make_spec(name, preset == "calibrated" ? ParamPreset::Calibrated : ParamPreset::Default);
  if (preset != "default" && preset != "calibrated") throw ConfigError("preset must be default or calibrated");
  Json p = parse(params_json);
  for (auto it = p.begin(); it != p.end(); ++it) s.params[it.key()] = it.value().get<double>();
  validate_spec(s);
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming segmentation of LPBF thermal frames (native core)";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CorruptRecordError>(m, "CorruptRecordError", PyExc_IOError);

  py::class_<Segmenter>(m, "Segmenter")
      .def(py::init([](const std::string& name, const std::string& params, const std::string& preset) {
             return Segmenter(spec_of(name, params, preset));
           }),
           py::arg("name"), py::arg("params_json") = "", py::arg("preset") = "default")
      .def("step", [](Segmenter& s, const FloatArray& frame) { return from_mask(s.step(to_frame(frame, s.frames_seen()))); })
      .def_property_readonly("name", &Segmenter::name)
      .def_property_readonly("params", [](const Segmenter& s) { return s.spec().params; })
      .def_property_readonly("frames_seen", &Segmenter::frames_seen);

  m.def("known_algorithms", &known_algorithms);
  m.def("default_params", [](const std::string& name) { return default_params(parse_spec(name)); });
  m.def("calibrated_params", [](const std::string& name) { return calibrated_params(parse_spec(name)); });
  m.def("presets_json", [] { return parameter_presets().dump(); });

  m.def("threshold_fixed", [](const FloatArray& f, double lambda) { return from_mask(threshold_fixed(to_frame(f), lambda)); });
  m.def("global_auto_threshold",
        [](const FloatArray& f, const std::string& method, int nbins) {
          static const std::map<std::string, GlobalMethod> methods{{"otsu", GlobalMethod::Otsu},
                                                                   {"li", GlobalMethod::Li},
                                                                   {"isodata", GlobalMethod::Isodata},
                                                                   {"yen", GlobalMethod::Yen},
                                                                   {"triangle", GlobalMethod::Triangle}};
          std::string key = method;
          std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
          auto it = methods.find(key);
          if (it == methods.end()) throw ConfigError("unknown method " + method);
          return global_auto_threshold(to_frame(f), it->second, nbins).threshold;
        },
        py::arg("frame"), py::arg("method"), py::arg("nbins") = 256);

  m.def("compute_cutoff", [](const FloatArray& frames) {
    CutoffStats s = compute_cutoff(to_frames(frames));
    return py::dict(py::arg("cutoff") = s.cutoff, py::arg("sigma_bs") = s.sigma_bs, py::arg("t_max") = s.t_max);
  });

  m.def("confusion", [](const ByteArray& pred, ByteArray labels) {
    Mask p = to_mask(pred);
    if (labels.ndim() != 2) throw ShapeError("expected 2-D labels");
    auto t = to_truth(labels.reshape({py::ssize_t{1}, labels.shape(0), labels.shape(1)}));
    ConfusionCounts c = confusion(p, t[0]);
    return py::dict(py::arg("tp") = c.tp, py::arg("fp") = c.fp, py::arg("tn") = c.tn, py::arg("fn") = c.fn);
  });
  m.def("f1", [](std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) { return f1(ConfusionCounts{tp, fp, 0, fn}).f1; },
        py::arg("tp"), py::arg("fp"), py::arg("fn"));
  m.def("spatter_outside_fraction",
        [](const ByteArray& comp, std::array<int, 4> region, int overflow) {
          return spatter_outside_fraction(to_mask(comp), Rect{region[0], region[1], region[2], region[3]}, overflow);
        },
        py::arg("composite"), py::arg("region"), py::arg("overflow"));

  m.def("simulate",
        [](const std::string& config_json) {
          SimConfig cfg = sim_config_from_json(parse(config_json));
          SimulatedBatch b = simulate(cfg);
          const auto n = static_cast<py::ssize_t>(b.frames.size());
          py::array_t<float> frames({n, py::ssize_t{cfg.height}, py::ssize_t{cfg.width}});
          py::array_t<std::uint8_t> labels({n, py::ssize_t{cfg.height}, py::ssize_t{cfg.width}});
          const std::size_t plane = static_cast<std::size_t>(cfg.width) * cfg.height;
          py::list laser;
          for (std::size_t i = 0; i < b.frames.size(); ++i) {
            std::copy(b.frames[i].pixels().begin(), b.frames[i].pixels().end(), frames.mutable_data() + i * plane);
            for (std::size_t k = 0; k < plane; ++k)
              labels.mutable_data()[i * plane + k] = static_cast<std::uint8_t>(b.truth[i].labels[k]);
            const auto& l = b.laser[i];
            laser.append(l.on ? py::object(py::make_tuple(l.center.x, l.center.y)) : py::object(py::none()));
          }
          py::dict info(py::arg("cutoff") = b.cutoff.cutoff, py::arg("track_width") = b.gt.track_width,
                        py::arg("calibration_frames") = cfg.calibration_frame_count(),
                        py::arg("config_json") = to_json(cfg).dump());
          return py::make_tuple(frames, labels, laser, info);
        },
        py::arg("config_json") = "");
  m.def("batch_config_json", [](const std::string& name, std::uint64_t seed) {
    if (name == "standard") return to_json(standard_batch_config(seed)).dump();
    if (name == "spatter") return to_json(spatter_batch_config(seed)).dump();
    if (name == "benchmark") return to_json(benchmark_batch_config(seed)).dump();
    throw ConfigError("unknown batch " + name);
  }, py::arg("name"), py::arg("seed") = 42);

  m.def("evaluate",
        [](const std::string& name, const FloatArray& frames, const ByteArray& labels, const std::string& params,
           const std::string& preset) {
          auto fs = to_frames(frames);
          auto ts = to_truth(labels);
          auto rows = evaluate_stream({spec_of(name, params, preset)}, vector_source(fs, ts));
          const auto& r = rows.front();
          return py::dict(py::arg("precision") = r.micro.precision, py::arg("recall") = r.micro.recall,
                          py::arg("f1") = r.micro.f1, py::arg("macro_f1") = r.macro_f1);
        },
        py::arg("name"), py::arg("frames"), py::arg("labels"), py::arg("params_json") = "",
        py::arg("preset") = "default");

  m.def("tune",
        [](const std::string& name, const FloatArray& frames, const ByteArray& labels, std::size_t trials,
           std::uint64_t seed, const std::string& space_json) {
          SegmenterSpec spec = make_spec(name);
          ParamSpace space = space_json.empty() ? default_param_space(spec) : param_space_from_json(parse(space_json));
          auto fs = to_frames(frames);
          auto ts = to_truth(labels);
          return to_json(random_search(spec, space, fs, ts, trials, seed)).dump();
        },
        py::arg("name"), py::arg("frames"), py::arg("labels"), py::arg("trials"), py::arg("seed") = 0,
        py::arg("space_json") = "");

  m.def("bench",
        [](const std::string& name, const FloatArray& frames, const std::string& params) {
          FrameSequence seq(to_frames(frames));
          return to_json(bench(spec_of(name, params, "default"), seq)).dump();
        },
        py::arg("name"), py::arg("frames"), py::arg("params_json") = "");

  m.def("encode", [](const FloatArray& frame, const ByteArray& mask) {
    SparseForeground sf = encode(to_frame(frame), to_mask(mask));
    py::list runs;
    for (const auto& r : sf.runs) runs.append(py::make_tuple(r.y, r.x_start, r.values));
    return runs;
  });
  m.def("decode", [](const std::vector<std::tuple<std::uint32_t, std::uint32_t, std::vector<float>>>& runs, int width,
                     int height) {
    SparseForeground sf;
    for (const auto& [y, x, v] : runs) sf.runs.push_back(Run{y, x, v});
    return from_frame(decode(sf, width, height));
  });

  m.def("write_sequence", [](const std::string& path, const FloatArray& frames, std::uint32_t warmup) {
    FrameSequence seq(to_frames(frames), 60.0, warmup);
    write_sequence(path, seq);
  }, py::arg("path"), py::arg("frames"), py::arg("warmup") = 0);
  m.def("read_sequence", [](const std::string& path) {
    SequenceReader r(path);
    const auto n = static_cast<py::ssize_t>(r.frame_count());
    py::array_t<float> out({n, py::ssize_t{r.height()}, py::ssize_t{r.width()}});
    const std::size_t plane = static_cast<std::size_t>(r.width()) * r.height();
    std::size_t i = 0;
    while (auto f = r.next()) std::copy(f->pixels().begin(), f->pixels().end(), out.mutable_data() + plane * i++);
    return out;
  });
}

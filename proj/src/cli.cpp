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

#include "lpbfseg/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lpbfseg/bench.hpp"
#include "lpbfseg/config.hpp"
#include "lpbfseg/seqio.hpp"
#include "lpbfseg/storage.hpp"
#include "lpbfseg/study.hpp"
#include "lpbfseg/tuning.hpp"

namespace lpbfseg::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string algos;
  std::string params;
  std::string out_dir = ".";
  std::string input;
  std::string gt_path;
  std::string batch;
  std::optional<std::size_t> trials;
  std::string sparse;
  std::optional<int> overflow;
  std::string dtype;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Remembers every file a command creates so a failure can delete them.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  fs::path add(const std::string& name) {
    fs::path p = dir_ / name;
    created_.push_back(p);
    return p;
  }
  void discard() {
    std::error_code ec;
    for (const auto& p : created_) fs::remove(p, ec);
  }

 private:
  fs::path dir_;
  std::vector<fs::path> created_;
};

struct Context {
  Options opt;
  Json cfg = Json::object();
  std::ostream& out;
  std::ostream& err;
  Outputs outputs;
};

std::string file_safe(std::string name) {
  std::replace(name.begin(), name.end(), '+', '-');
  return name;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string cfg_string(const Context& c, const char* key) {
  if (c.cfg.contains(key) && c.cfg[key].is_string()) return c.cfg[key].get<std::string>();
  return {};
}

std::string input_path(const Context& c) {
  return !c.opt.input.empty() ? c.opt.input : cfg_string(c, "input");
}

fs::path sidecar_path(const Context& c, const fs::path& input) {
  std::string p = !c.opt.gt_path.empty() ? c.opt.gt_path : cfg_string(c, "ground_truth");
  if (!p.empty()) return p;
  fs::path s = input;
  s.replace_extension(".gt.json");
  return s;
}

SimConfig sim_config(const Context& c, const std::string& default_batch) {
  std::string batch = !c.opt.batch.empty() ? c.opt.batch : cfg_string(c, "batch");
  if (batch.empty() && !c.cfg.contains("simulation")) batch = default_batch;
  SimConfig s;
  if (batch == "standard") {
    s = standard_batch_config();
  } else if (batch == "spatter") {
    s = spatter_batch_config();
  } else if (batch == "benchmark") {
    s = benchmark_batch_config();
  } else if (!batch.empty()) {
    throw UsageError("unknown batch '" + batch + "' (standard, spatter, benchmark)");
  }
  if (c.cfg.contains("simulation")) {
    Json merged = to_json(s);
    for (auto it = c.cfg["simulation"].begin(); it != c.cfg["simulation"].end(); ++it) merged[it.key()] = it.value();
    s = sim_config_from_json(merged);
  }
  if (c.opt.seed) s.seed = *c.opt.seed;
  s.validate();
  return s;
}

std::vector<SegmenterSpec> specs(const Context& c, const std::string& fallback) {
  std::string list = c.opt.algos;
  if (list.empty() && c.cfg.contains("algorithms")) {
    const Json& a = c.cfg["algorithms"];
    if (a.is_string()) {
      list = a.get<std::string>();
    } else {
      for (const auto& e : a) list += (list.empty() ? "" : ",") + e.get<std::string>();
    }
  }
  if (list.empty()) list = fallback;
  std::string preset = !c.opt.params.empty() ? c.opt.params : cfg_string(c, "params");
  if (preset.empty()) preset = "default";

  std::vector<SegmenterSpec> out;
  for (const auto& name : split_list(list)) {
    SegmenterSpec s;
    try {
      s = parse_spec(name);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    if (preset == "calibrated") {
      s.params = calibrated_params(s);
    } else if (preset != "default") {
      s.params = params_from_file(preset, s);
    }
    if (c.opt.seed) s.seed = *c.opt.seed;
    out.push_back(with_defaults(std::move(s)));
  }
  if (out.empty()) throw UsageError("no algorithm given");
  return out;
}

// Frames from a sequence file with ground truth rebuilt from its sidecar.
struct FileStream {
  SequenceReader reader;
  GtSidecar sidecar;
  GroundTruthBuilder builder;
  std::optional<Point> prev;

  FileStream(const fs::path& seq, const fs::path& gt)
      : reader(seq), sidecar(sidecar_from_json(read_json(gt))), builder(sidecar.gt) {
    if (sidecar.laser.size() != reader.frame_count())
      throw ConfigError("ground truth covers " + std::to_string(sidecar.laser.size()) + " frames, sequence has " +
                        std::to_string(reader.frame_count()));
    require_same_shape(reader.width(), reader.height(), sidecar.gt.frame_width, sidecar.gt.frame_height,
                       "ground truth");
  }

  LabeledSource source(std::size_t limit = SIZE_MAX) {
    return [this, limit]() -> std::optional<LabeledFrame> {
      if (reader.position() >= limit) return std::nullopt;
      auto f = reader.next();
      if (!f) return std::nullopt;
      auto cur = sidecar.laser[f->index()].position();
      GroundTruth gt = builder.build(prev, cur);
      prev = cur;
      return LabeledFrame{std::move(*f), std::move(gt)};
    };
  }
};

void print_table(std::ostream& os, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << std::left << std::setw(static_cast<int>(width[i]) + 2) << r[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void write_tsv(const fs::path& p, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(p, std::ios::trunc);
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "\t" : "") << r[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!os) throw std::runtime_error("write failed: " + p.string());
}

void write_pgm(const fs::path& p, const Mask& m) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os << "P5\n" << m.width() << ' ' << m.height() << "\n255\n";
  for (std::uint8_t b : m.bits()) os.put(static_cast<char>(b ? 255 : 0));
  if (!os) throw std::runtime_error("write failed: " + p.string());
}

// ---------------------------------------------------------------------------

int cmd_simulate(Context& c) {
  SimConfig s = sim_config(c, "standard");
  Simulator sim(s);
  fs::path seq = c.outputs.add("sequence.lpbfseq");
  fs::path gt = c.outputs.add("sequence.gt.json");
  GtSidecar side;
  side.gt = sim.gt_config();
  side.sim = s;
  side.cutoff = sim.cutoff();
  side.calibration_frames = s.calibration_frame_count();
  {
    SequenceWriter w(seq, s.width, s.height, IntensityTag::F32, static_cast<std::uint32_t>(s.warmup_frames));
    while (!sim.done()) {
      auto o = sim.next();
      side.laser.push_back(o.laser);
      w.write(o.frame);
    }
    w.close();
  }
  write_json(gt, to_json(side));
  c.out << "wrote " << side.laser.size() << " frames (" << side.calibration_frames
        << " tagged for calibration, track width " << side.gt.track_width << ", cutoff "
        << fmt(side.gt.cutoff, 2) << ") to " << seq.string() << '\n';
  return kOk;
}

int cmd_segment(Context& c) {
  std::string in = input_path(c);
  if (in.empty()) throw UsageError("segment needs --input");
  auto sp = specs(c, "FD+Thresh");
  SequenceReader reader(in);
  std::vector<Segmenter> segs;
  std::vector<std::unique_ptr<SparseWriter>> writers;
  std::vector<std::vector<std::size_t>> counts(sp.size());
  for (const auto& s : sp) {
    segs.emplace_back(s);
    writers.push_back(std::make_unique<SparseWriter>(
        c.outputs.add(file_safe(segs.back().name()) + ".lpbfsparse"), reader.width(), reader.height()));
  }
  Mask m;
  while (auto f = reader.next()) {
    for (std::size_t i = 0; i < segs.size(); ++i) {
      segs[i].step(*f, m);
      writers[i]->write(encode(*f, m));
      counts[i].push_back(m.count());
    }
  }
  Json summary = Json::array();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    writers[i]->close();
    std::size_t nonempty = static_cast<std::size_t>(std::count_if(counts[i].begin(), counts[i].end(), [](std::size_t n) { return n > 0; }));
    summary.push_back(Json{{"spec", to_json(segs[i].spec())}, {"frames", counts[i].size()},
                           {"nonempty_frames", nonempty}, {"foreground_pixels", counts[i]}});
    c.out << segs[i].name() << ": " << counts[i].size() << " frames, " << nonempty << " with foreground\n";
  }
  write_json(c.outputs.add("segment.json"), summary);
  return kOk;
}

std::vector<EvalRow> run_evaluation(Context& c, const std::vector<SegmenterSpec>& sp) {
  std::string in = input_path(c);
  if (!in.empty()) {
    FileStream fsrc(in, sidecar_path(c, in));
    return evaluate_stream(sp, fsrc.source());
  }
  Simulator sim(sim_config(c, "standard"));
  return evaluate_stream(sp, simulator_source(sim));
}

int cmd_evaluate(Context& c) {
  auto sp = specs(c, "Thresh,FD+Thresh,Otsu,FD+Yen");
  auto rows = run_evaluation(c, sp);
  std::vector<std::vector<std::string>> table;
  Json j = Json::array();
  for (const auto& r : rows) {
    table.push_back({r.name, fmt(r.micro.precision), fmt(r.micro.recall), fmt(r.micro.f1), fmt(r.macro_f1)});
    j.push_back(Json{{"algorithm", r.name}, {"params", to_json(r.params)},
                     {"score", to_json(r.micro)}, {"macro_f1", r.macro_f1}, {"counts", to_json(r.counts)}});
  }
  std::vector<std::string> header{"algorithm", "precision", "recall", "f1", "macro_f1"};
  print_table(c.out, header, table);
  write_tsv(c.outputs.add("scores.tsv"), header, table);
  write_json(c.outputs.add("scores.json"), j);
  return kOk;
}

int cmd_tune(Context& c) {
  auto sp = specs(c, "FD+Thresh");
  std::size_t trials = c.opt.trials.value_or(c.cfg.value("trials", std::size_t{300}));
  std::uint64_t seed = c.opt.seed.value_or(c.cfg.value("seed", std::uint64_t{0}));

  CalibrationSet calib;
  std::string in = input_path(c);
  if (!in.empty()) {
    FileStream fsrc(in, sidecar_path(c, in));
    std::size_t n = fsrc.sidecar.calibration_frames ? fsrc.sidecar.calibration_frames : fsrc.reader.frame_count();
    auto src = fsrc.source(n);
    while (auto lf = src()) {
      calib.frames.push_back(std::move(lf->frame));
      calib.truth.push_back(std::move(lf->truth));
    }
  } else {
    calib = calibration_set(sim_config(c, "standard"));
  }

  std::vector<std::vector<std::string>> table;
  for (const auto& s : sp) {
    ParamSpace space = default_param_space(s);
    if (c.cfg.contains("space") && c.cfg["space"].contains(s.name())) {
      for (const auto& [k, r] : param_space_from_json(c.cfg["space"][s.name()])) space[k] = r;
    }
    if (space.empty()) throw UsageError(s.name() + " has no tunable parameters");
    TuneResult r = random_search(s, space, calib.frames, calib.truth, trials, seed);
    write_json(c.outputs.add("tune_" + file_safe(s.name()) + ".json"), to_json(r));
    std::string params;
    for (const auto& [k, v] : r.best_params) params += (params.empty() ? "" : " ") + k + "=" + fmt(v, 4);
    table.push_back({s.name(), fmt(r.best_f1), std::to_string(r.best_trial), params});
  }
  print_table(c.out, {"algorithm", "best_f1", "trial", "params"}, table);
  return kOk;
}

int cmd_bench(Context& c) {
  auto sp = specs(c, "Thresh,FD,FD+Thresh,MOG");
  std::vector<BenchReport> reports;
  std::string in = input_path(c);
  if (!in.empty()) {
    SequenceReader reader(in);
    reports = bench_stream(sp, [&reader] { return reader.next(); });
  } else {
    Simulator sim(sim_config(c, "benchmark"));
    reports = bench_stream(sp, [&sim]() -> std::optional<Frame> {
      if (sim.done()) return std::nullopt;
      return sim.next().frame;
    });
  }
  std::vector<std::vector<std::string>> table;
  Json j{{"machine", machine_info()}, {"reports", Json::array()}};
  for (const auto& r : reports) {
    table.push_back({r.name, fmt(r.mean_ms, 4), fmt(r.median_ms, 4), fmt(r.p99_ms, 4), std::to_string(r.frames_timed)});
    j["reports"].push_back(to_json(r));
  }
  std::vector<std::string> header{"algorithm", "mean_ms", "median_ms", "p99_ms", "frames"};
  c.out << "# " << machine_info() << '\n';
  print_table(c.out, header, table);
  write_tsv(c.outputs.add("bench.tsv"), header, table);
  write_json(c.outputs.add("bench.json"), j);
  return kOk;
}

int cmd_compress(Context& c) {
  std::string existing = !c.opt.sparse.empty() ? c.opt.sparse : cfg_string(c, "sparse");
  if (!existing.empty()) {
    SparseReader r(existing);
    std::size_t runs = 0, pixels = 0;
    while (auto sf = r.next()) {
      runs += sf->runs.size();
      pixels += sf->pixel_count();
    }
    c.out << existing << ": " << r.frame_count() << " frames, " << runs << " runs, " << pixels
          << " foreground pixels\n";
    return kOk;
  }
  std::string in = input_path(c);
  if (in.empty()) throw UsageError("compress needs --input (a sequence) or --sparse (a file to check)");
  auto sp = specs(c, "FD+Thresh");
  if (sp.size() != 1) throw UsageError("compress takes exactly one algorithm");

  fs::path sparse = c.outputs.add("foreground.lpbfsparse");
  Segmenter seg(sp.front());
  std::uint32_t frames = 0;
  std::size_t dense_bytes = 0;
  {
    SequenceReader reader(in);
    dense_bytes = fs::file_size(in);
    SparseWriter w(sparse, reader.width(), reader.height());
    Mask m;
    while (auto f = reader.next()) {
      seg.step(*f, m);
      w.write(encode(*f, m));
      ++frames;
    }
    w.close();
  }
  // Read back and compare against the masked input.
  bool exact = true;
  {
    SequenceReader reader(in);
    SparseReader sr(sparse);
    Segmenter again(sp.front());
    Mask m;
    while (auto f = reader.next()) {
      again.step(*f, m);
      auto sf = sr.next();
      if (!sf) throw CorruptRecordError("sparse file ended early");
      Frame d = decode(*sf, reader.width(), reader.height());
      Frame expect = mask_apply(*f, m);
      if (!std::equal(d.pixels().begin(), d.pixels().end(), expect.pixels().begin())) exact = false;
    }
  }
  std::size_t sparse_bytes = fs::file_size(sparse);
  double ratio = dense_bytes ? static_cast<double>(sparse_bytes) / static_cast<double>(dense_bytes) : 0.0;
  write_json(c.outputs.add("compress.json"),
             Json{{"algorithm", to_json(sp.front())}, {"frames", frames}, {"dense_bytes", dense_bytes},
                  {"sparse_bytes", sparse_bytes}, {"ratio", ratio}, {"round_trip_exact", exact}});
  c.out << "dense " << dense_bytes << " B, sparse " << sparse_bytes << " B, ratio " << fmt(ratio, 5)
        << (exact ? ", round trip exact\n" : ", ROUND TRIP MISMATCH\n");
  return exact ? kOk : kFailure;
}

int cmd_spatter(Context& c) {
  auto sp = specs(c, "MOG,Thresh,FD,FD+Thresh");
  std::vector<SpatterRow> rows;
  std::string in = input_path(c);
  Rect region;
  int overflow = 0;
  auto settle = [&](const GtConfig& gt) {
    region = c.cfg.contains("region") ? rect_from_json(c.cfg["region"]) : gt.cross_section;
    overflow = c.opt.overflow.value_or(c.cfg.value("overflow", gt.track_width));
  };
  if (!in.empty()) {
    FileStream fsrc(in, sidecar_path(c, in));
    settle(fsrc.sidecar.gt);
    rows = spatter_stream(sp, fsrc.source(), region, overflow);
  } else {
    Simulator sim(sim_config(c, "spatter"));
    settle(sim.gt_config());
    rows = spatter_stream(sp, simulator_source(sim), region, overflow);
  }
  std::vector<std::vector<std::string>> table;
  Json j{{"region", to_json(region)}, {"overflow", overflow}, {"results", Json::array()}};
  for (const auto& r : rows) {
    fs::path pgm = c.outputs.add("composite_" + file_safe(r.name) + ".pgm");
    write_pgm(pgm, r.composite);
    table.push_back({r.name, fmt(r.outside_fraction, 4), fmt(r.f1), std::to_string(r.composite.count())});
    j["results"].push_back(Json{{"algorithm", r.name}, {"outside_fraction", r.outside_fraction}, {"f1", r.f1},
                                {"composite_pixels", r.composite.count()}, {"composite", pgm.filename().string()}});
  }
  std::vector<std::string> header{"algorithm", "outside_fraction", "f1", "composite_pixels"};
  print_table(c.out, header, table);
  write_tsv(c.outputs.add("spatter.tsv"), header, table);
  write_json(c.outputs.add("spatter.json"), j);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming segmentation of LPBF thermal frames", "lpbfseg"};
  app.require_subcommand(1);
  Options opt;
  auto common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_option("--algo", opt.algos, "Algorithm name(s), comma separated");
    sub->add_option("--params", opt.params, "default | calibrated | parameter FILE");
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--input", opt.input, "Frame sequence (LPBFSEQ1)");
    sub->add_option("--gt", opt.gt_path, "Ground-truth sidecar (default: <input stem>.gt.json)");
    sub->add_option("--batch", opt.batch, "Built-in simulation: standard | spatter | benchmark");
  };
  std::map<std::string, std::function<int(Context&)>> handlers{
      {"simulate", cmd_simulate}, {"segment", cmd_segment}, {"evaluate", cmd_evaluate},
      {"tune", cmd_tune},         {"bench", cmd_bench},     {"compress", cmd_compress},
      {"spatter", cmd_spatter}};
  const std::map<std::string, std::string> help{
      {"simulate", "Write a synthetic sequence and its ground-truth sidecar"},
      {"segment", "Segment a sequence into sparse foreground files"},
      {"evaluate", "Score segmenters against ground truth"},
      {"tune", "Random-search parameters on the calibration frames"},
      {"bench", "Per-frame timing of segmenters"},
      {"compress", "Sparse foreground file with size report and round-trip check"},
      {"spatter", "Composite masks and the fraction outside the cross-section"}};
  for (const auto& [name, h] : help) {
    CLI::App* sub = app.add_subcommand(name, h);
    common(sub);
    if (name == "tune") sub->add_option("--trials", opt.trials, "Number of random trials (default 300)");
    if (name == "compress") sub->add_option("--sparse", opt.sparse, "Check an existing LPBFSPARSE1 file");
    if (name == "spatter") sub->add_option("--overflow", opt.overflow, "Pixels added around the region");
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  std::string verb = app.get_subcommands().front()->get_name();
  Context ctx{opt, Json::object(), out, err, Outputs(opt.out_dir)};
  try {
    if (!opt.config_path.empty()) {
      ctx.cfg = read_json(opt.config_path);
      if (!ctx.cfg.is_object()) throw ConfigError("configuration must be a JSON object");
    }
    fs::create_directories(opt.out_dir);
    return handlers.at(verb)(ctx);
  } catch (const UsageError& e) {
    ctx.outputs.discard();
    err << "error: " << e.what() << "\n\n" << app.get_subcommand(verb)->help();
    return kUsage;
  } catch (const ConfigError& e) {
    ctx.outputs.discard();
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CorruptRecordError& e) {
    ctx.outputs.discard();
    err << "corrupt record: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    ctx.outputs.discard();
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace lpbfseg::cli

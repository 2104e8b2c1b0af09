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

#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "lpbfseg/evaluation.hpp"
#include "lpbfseg/tuning.hpp"

using namespace lpbfseg;

namespace {

// Independent F1 for a plain threshold over the constructed sequence.
double oracle_thresh_f1(const testing::Constructed& c, double lambda) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < c.frames.size(); ++i) {
    auto px = c.frames[i].pixels();
    for (std::size_t k = 0; k < px.size(); ++k) {
      const bool p = px[k] > lambda;
      const bool t = c.truth[i].labels[k] == Label::Foreground;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
  }
  return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

}  // namespace

TEST_CASE("random search finds the constructed optimum") {
  auto c = testing::constructed_sequence(3);
  SegmenterSpec spec = make_spec("Thresh");
  ParamSpace space{{"lambda", {250, 500}}};
  TuneResult r = random_search(spec, space, c.frames, c.truth, 200, 11);
  CHECK(r.best_f1 == doctest::Approx(1.0));
  CHECK(r.best_params.at("lambda") >= c.max_background);
  CHECK(r.best_params.at("lambda") < 400.0);
  REQUIRE(r.trials.size() == 200);
  double best = -1;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    const double lam = r.trials[i].params.at("lambda");
    CHECK(lam >= 250.0);
    CHECK(lam <= 500.0);
    const double f = oracle_thresh_f1(c, lam);
    CHECK(r.trials[i].f1 == doctest::Approx(f).epsilon(1e-12));
    if (f > best) {
      best = f;
      best_i = i;
    }
  }
  CHECK(r.best_trial == best_i);
}

TEST_CASE("random search is deterministic and monotone in the trial budget") {
  auto c = testing::constructed_sequence(5, 8);
  SegmenterSpec spec = make_spec("FD+Thresh");
  ParamSpace space{{"lambda", {1, 200}}};
  TuneResult a = random_search(spec, space, c.frames, c.truth, 30, 99);
  TuneResult b = random_search(spec, space, c.frames, c.truth, 30, 99);
  CHECK(a.best_params == b.best_params);
  CHECK(a.best_f1 == b.best_f1);
  double prev = -1;
  for (std::size_t n : {1, 5, 10, 20, 30}) {
    TuneResult r = random_search(spec, space, c.frames, c.truth, n, 99);
    CHECK(r.best_f1 >= prev);
    prev = r.best_f1;
    // Trials form a common prefix across budgets.
    CHECK(r.trials.front().params == a.trials.front().params);
  }
  CHECK(prev == a.best_f1);
}

TEST_CASE("one trial is the sampled point and a degenerate range is a point") {
  auto c = testing::constructed_sequence(7, 5);
  SegmenterSpec spec = make_spec("Thresh");
  ParamSpace space{{"lambda", {250, 500}}};
  TuneResult r = random_search(spec, space, c.frames, c.truth, 1, 4);
  CHECK(r.best_params == sample_params(space, 4, 0));
  CHECK(r.best_f1 == doctest::Approx(oracle_thresh_f1(c, r.best_params.at("lambda"))));

  ParamSpace point{{"lambda", {350, 350}}};
  for (std::size_t t = 0; t < 10; ++t) CHECK(sample_params(point, 1, t).at("lambda") == 350.0);
  TuneResult p = random_search(spec, point, c.frames, c.truth, 3, 1);
  CHECK(p.best_f1 == doctest::Approx(1.0));
}

TEST_CASE("samples respect scale, integer and odd flags") {
  ParamSpace space{{"box", {3, 51, Scale::Linear, true, true}},
                   {"h", {1, 500, Scale::Log, true, false}},
                   {"x", {0.01, 10, Scale::Log}}};
  int below_one = 0;
  for (std::size_t t = 0; t < 2000; ++t) {
    ParamMap p = sample_params(space, 17, t);
    const double box = p.at("box"), h = p.at("h"), x = p.at("x");
    CHECK(box >= 3);
    CHECK(box <= 51);
    CHECK(std::fmod(box, 2.0) == 1.0);
    CHECK(h == std::round(h));
    CHECK(h >= 1);
    CHECK(h <= 500);
    CHECK(x >= 0.01);
    CHECK(x <= 10);
    below_one += x < 1.0;
  }
  // Log-uniform over [0.01, 10]: two of three decades lie below 1.
  CHECK(below_one > 2000 * 0.6);
  CHECK(below_one < 2000 * 0.73);
}

TEST_CASE("invalid spaces and inputs are rejected") {
  auto c = testing::constructed_sequence(1, 3);
  SegmenterSpec spec = make_spec("Thresh");
  CHECK_THROWS_AS(validate_space({{"lambda", {5, 1}}}, spec), ConfigError);
  CHECK_THROWS_AS(validate_space({{"nope", {1, 2}}}, spec), ConfigError);
  CHECK_THROWS_AS(validate_space({{"lambda", {0, 2, Scale::Log}}}, spec), ConfigError);
  CHECK_THROWS_AS(validate_space({{"lambda", {2.2, 2.8, Scale::Linear, true}}}, spec), ConfigError);
  ParamSpace ok{{"lambda", {250, 500}}};
  CHECK_THROWS_AS(random_search(spec, ok, c.frames, c.truth, 0, 1), ConfigError);
  std::span<const GroundTruth> short_truth(c.truth.data(), 2);
  CHECK_THROWS_AS(random_search(spec, ok, c.frames, short_truth, 5, 1), ConfigError);
}

TEST_CASE("default spaces bracket default and calibrated values") {
  for (const std::string name : {"Thresh", "FD+Thresh", "SubMax", "MOG", "MOG2", "KNN", "AdaptMean",
                                 "AdaptGauss", "Sauvola"}) {
    SegmenterSpec spec = make_spec(name);
    ParamSpace space = default_param_space(spec);
    CAPTURE(name);
    CHECK_FALSE(space.empty());
    CHECK_NOTHROW(validate_space(space, spec));
    for (auto preset : {ParamPreset::Default, ParamPreset::Calibrated}) {
      ParamMap values = make_spec(name, preset).params;
      for (const auto& [key, range] : space) {
        CAPTURE(key);
        CHECK(values.at(key) >= range.low);
        CHECK(values.at(key) <= range.high);
      }
    }
  }
}

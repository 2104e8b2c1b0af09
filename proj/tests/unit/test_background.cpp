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
#include "lpbfseg/background.hpp"

using namespace lpbfseg;

namespace {

std::vector<std::uint8_t> run(ForegroundModel& m, const Frame& f) {
  std::vector<std::uint8_t> out(f.size());
  m.apply(f.pixels(), f.width(), f.height(), out);
  return out;
}

std::size_t ones(const std::vector<std::uint8_t>& v) {
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1));
}

Frame spike(const Frame& base, int x, int y, float value) {
  std::vector<float> px(base.pixels().begin(), base.pixels().end());
  px[static_cast<std::size_t>(y) * base.width() + x] = value;
  return Frame(base.width(), base.height(), px);
}

}  // namespace

TEST_CASE("mixture learning rate is 1 / min(frames, history)") {
  CHECK(mixture_learning_rate(1, 200) == doctest::Approx(1.0));
  CHECK(mixture_learning_rate(10, 200) == doctest::Approx(0.1));
  CHECK(mixture_learning_rate(500, 200) == doctest::Approx(1.0 / 200));
}

TEST_CASE("constant sequence is learned as background, a far spike is foreground") {
  Frame bed = Frame::filled(12, 10, 277.0f);
  MogParams mp;
  mp.history = 10;
  Mog2Params m2;
  m2.history = 10;
  KnnParams kp;
  kp.history = 10;
  MogModel mog(mp);
  Mog2Model mog2(m2);
  KnnModel knn(kp);
  for (ForegroundModel* m : std::initializer_list<ForegroundModel*>{&mog, &mog2, &knn}) {
    for (int i = 0; i < 25; ++i) {
      auto out = run(*m, bed);
      if (i >= 10) CHECK(ones(out) == 0);
    }
    auto out = run(*m, spike(bed, 3, 4, 900.0f));
    CHECK(ones(out) == 1);
    CHECK(out[4 * 12 + 3] == 1);
  }
}

TEST_CASE("MOG weights stay normalized under random updates") {
  std::mt19937 rng(123);
  for (int nm : {1, 3, 5}) {
    MogParams p;
    p.history = 7;
    p.nmixtures = nm;
    MogModel mog(p);
    for (int i = 0; i < 60; ++i) {
      Frame f = testing::random_frame(rng, 6, 5, 250.0f, i % 7 ? 300.0f : 600.0f);
      run(mog, f);
      for (std::size_t px = 0; px < 30; ++px) {
        double sum = 0;
        for (const auto& c : mog.mixture(px)) sum += c.weight;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("MOG2 weights stay normalized and modes stay bounded") {
  std::mt19937 rng(321);
  Mog2Params p;
  p.history = 9;
  p.nmixtures = 4;
  Mog2Model mog2(p);
  for (int i = 0; i < 60; ++i) {
    Frame f = testing::random_frame(rng, 6, 5, 250.0f, 320.0f);
    run(mog2, f);
    for (std::size_t px = 0; px < 30; ++px) {
      CHECK(mog2.modes_used(px) >= 1);
      CHECK(mog2.modes_used(px) <= 4);
      double sum = 0;
      for (const auto& c : mog2.mixture(px)) sum += c.weight;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-5));
    }
  }
}

TEST_CASE("KNN is deterministic per seed and caps its reservoir") {
  KnnParams p;
  p.history = 20;
  p.samples = 8;
  p.seed = 9;
  CHECK(KnnModel(p).capacity() == 8);
  p.history = 3;
  CHECK(KnnModel(p).capacity() == 3);
  p.history = 20;

  std::mt19937 rng(4);
  std::vector<Frame> frames;
  for (int i = 0; i < 40; ++i) frames.push_back(testing::random_frame(rng, 8, 8, 270.0f, 330.0f));
  KnnModel a(p), b(p);
  for (const auto& f : frames) CHECK(run(a, f) == run(b, f));
}

TEST_CASE("KNN first frame is background") {
  KnnModel knn(KnnParams{});
  Frame f = Frame::filled(5, 5, 300.0f);
  CHECK(ones(run(knn, f)) == 0);
}

TEST_CASE("models reject a change of frame size") {
  MogModel mog(MogParams{});
  run(mog, Frame::filled(4, 4, 1.0f));
  std::vector<std::uint8_t> out(20);
  Frame g = Frame::filled(5, 4, 1.0f);
  CHECK_THROWS_AS(mog.apply(g.pixels(), 5, 4, out), ShapeError);
}

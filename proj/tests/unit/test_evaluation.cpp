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

#include "doctest.h"
#include "helpers.hpp"
#include "lpbfseg/evaluation.hpp"

using namespace lpbfseg;

namespace {

GroundTruth labels_gt(int w, int h, std::vector<Label> labels) {
  GroundTruth gt;
  gt.width = w;
  gt.height = h;
  gt.labels = std::move(labels);
  return gt;
}

GroundTruth random_gt(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> u(0, 2);
  std::vector<Label> l(static_cast<std::size_t>(w) * h);
  for (auto& v : l) v = static_cast<Label>(u(rng));
  return labels_gt(w, h, l);
}

}  // namespace

TEST_CASE("confusion examples") {
  SUBCASE("three pixels, one excluded") {
    GroundTruth gt = labels_gt(3, 1, {Label::Foreground, Label::Excluded, Label::Background});
    ConfusionCounts c = confusion(Mask(3, 1, true), gt);
    CHECK(c == ConfusionCounts{1, 1, 0, 0});
  }
  SUBCASE("prediction equals foreground") {
    std::mt19937 rng(1);
    GroundTruth gt = random_gt(rng, 10, 10);
    ConfusionCounts c = confusion(gt.foreground_mask(), gt);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
    CHECK(f1(c).f1 == 1.0);
  }
  SUBCASE("all-false prediction") {
    std::mt19937 rng(2);
    GroundTruth gt = random_gt(rng, 10, 10);
    ConfusionCounts c = confusion(Mask(10, 10), gt);
    CHECK(c.tp == 0);
    CHECK(c.fn == gt.count(Label::Foreground));
    CHECK(f1(c).f1 == 0.0);
  }
  SUBCASE("shape mismatch") {
    GroundTruth gt = labels_gt(2, 1, {Label::Background, Label::Background});
    CHECK_THROWS_AS(confusion(Mask(1, 2), gt), ShapeError);
  }
}

TEST_CASE("f1 arithmetic") {
  Score s = f1(ConfusionCounts{8, 2, 0, 2});
  CHECK(s.precision == doctest::Approx(0.8));
  CHECK(s.recall == doctest::Approx(0.8));
  CHECK(s.f1 == 0.8);
  CHECK(f1(ConfusionCounts{5, 0, 3, 0}).f1 == 1.0);
  CHECK(f1(ConfusionCounts{0, 4, 3, 2}).f1 == 0.0);
  CHECK(f1(ConfusionCounts{}).f1 == 0.0);
}

TEST_CASE("f1 is the harmonic mean and symmetric in FP and FN") {
  std::mt19937 rng(9);
  std::uniform_int_distribution<std::uint64_t> u(0, 1000);
  for (int i = 0; i < 1000; ++i) {
    ConfusionCounts c{u(rng), u(rng), u(rng), u(rng)};
    Score s = f1(c);
    double p = c.tp + c.fp ? double(c.tp) / double(c.tp + c.fp) : 0;
    double r = c.tp + c.fn ? double(c.tp) / double(c.tp + c.fn) : 0;
    CHECK(s.precision == doctest::Approx(p));
    CHECK(s.recall == doctest::Approx(r));
    CHECK(s.f1 == doctest::Approx(p + r > 0 ? 2 * p * r / (p + r) : 0));
    ConfusionCounts swapped{c.tp, c.fn, c.tn, c.fp};
    CHECK(f1(swapped).f1 == doctest::Approx(s.f1));
  }
}

TEST_CASE("predictions inside excluded pixels never change the score") {
  std::mt19937 rng(44);
  for (int i = 0; i < 100; ++i) {
    GroundTruth gt = random_gt(rng, 12, 9);
    Mask pred = testing::random_mask(rng, 12, 9);
    Mask flipped = pred;
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 12; ++x)
        if (gt.at(x, y) == Label::Excluded) flipped.set(x, y, rng() % 2);
    CHECK(confusion(pred, gt) == confusion(flipped, gt));
  }
}

TEST_CASE("composite") {
  std::mt19937 rng(5);
  SUBCASE("single mask") {
    Mask m = testing::random_mask(rng, 6, 6);
    std::vector<Mask> ms{m};
    CHECK(composite(ms) == m);
  }
  SUBCASE("disjoint columns") {
    std::vector<Mask> ms;
    for (int x = 0; x < 10; ++x) {
      Mask m(20, 4);
      for (int y = 0; y < 4; ++y) m.set(x, y, true);
      ms.push_back(m);
    }
    Mask c = composite(ms);
    CHECK(c.count() == 40);
    for (int x = 0; x < 20; ++x) CHECK(c.at(x, 2) == (x < 10));
  }
  SUBCASE("fold of mask_or") {
    std::vector<Mask> ms;
    for (int i = 0; i < 7; ++i) ms.push_back(testing::random_mask(rng, 8, 5, 0.1));
    Mask fold = ms[0];
    for (std::size_t i = 1; i < ms.size(); ++i) fold = mask_or(fold, ms[i]);
    CHECK(composite(ms) == fold);
    CompositeBuilder b;
    for (const auto& m : ms) b.add(m);
    CHECK(b.result() == fold);
  }
  SUBCASE("empty list") {
    Mask c = composite(std::span<const Mask>{}, 4, 3);
    CHECK(c.width() == 4);
    CHECK(c.count() == 0);
  }
}

TEST_CASE("spatter outside fraction") {
  Rect region{10, 10, 20, 20};
  SUBCASE("all inside") {
    Mask m(50, 50);
    m.set(15, 15, true);
    m.set(29, 29, true);
    CHECK(spatter_outside_fraction(m, region, 0) == 0.0);
  }
  SUBCASE("all outside") {
    Mask m(50, 50);
    m.set(45, 45, true);
    m.set(0, 0, true);
    CHECK(spatter_outside_fraction(m, region, 2) == 1.0);
  }
  SUBCASE("ten pixels, three outside") {
    Mask m(50, 50);
    for (int x = 12; x < 19; ++x) m.set(x, 20, true);
    m.set(40, 1, true);
    m.set(41, 1, true);
    m.set(3, 44, true);
    CHECK(spatter_outside_fraction(m, region, 3) == doctest::Approx(0.3));
  }
  SUBCASE("whole-frame region") {
    std::mt19937 rng(8);
    Mask m = testing::random_mask(rng, 30, 20);
    CHECK(spatter_outside_fraction(m, Rect{0, 0, 30, 20}, 0) == 0.0);
  }
  SUBCASE("non-increasing in overflow") {
    std::mt19937 rng(3);
    Mask m = testing::random_mask(rng, 50, 50, 0.05);
    double last = 1.0;
    for (int o = 0; o < 25; ++o) {
      double f = spatter_outside_fraction(m, region, o);
      CHECK(f <= last);
      last = f;
    }
  }
  SUBCASE("empty mask") { CHECK(spatter_outside_fraction(Mask(5, 5), Rect{0, 0, 2, 2}, 0) == 0.0); }
}

TEST_CASE("score accumulator micro-averages") {
  ScoreAccumulator acc;
  acc.add(ConfusionCounts{8, 2, 10, 2});
  acc.add(ConfusionCounts{0, 0, 30, 0});
  acc.add(ConfusionCounts{2, 0, 5, 8});
  CHECK(acc.totals() == ConfusionCounts{10, 2, 45, 10});
  CHECK(acc.micro().f1 == doctest::Approx(f1(ConfusionCounts{10, 2, 45, 10}).f1));
  CHECK(acc.per_frame().size() == 3);
  double f_a = 0.8, f_c = 2 * 1.0 * 0.2 / 1.2;
  CHECK(acc.macro_f1() == doctest::Approx((f_a + f_c) / 2));
}

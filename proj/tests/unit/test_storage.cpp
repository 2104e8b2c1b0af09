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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "lpbfseg/storage.hpp"

using namespace lpbfseg;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("lpbfseg_test_storage_" + name);
}

std::vector<unsigned char> slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

void spit(const fs::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void le32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

// Masked pixels keep their value, everything else becomes 0.
Frame masked_oracle(const Frame& f, const Mask& m) {
  std::vector<float> px(f.size());
  for (std::size_t k = 0; k < px.size(); ++k) px[k] = m.bits()[k] ? f.pixels()[k] : 0.0f;
  return Frame(f.width(), f.height(), std::move(px), f.index());
}

}  // namespace

TEST_CASE("empty mask encodes to zero runs") {
  Frame f = Frame::filled(8, 4, 300.0f, 5);
  SparseForeground sf = encode(f, Mask(8, 4));
  CHECK(sf.runs.empty());
  CHECK(sf.frame_index == 5);
  CHECK(encoded_size(sf) == 8);
  Frame back = decode(sf, 8, 4);
  for (float v : back.pixels()) CHECK(v == 0.0f);
}

TEST_CASE("a 2x2 block becomes one run per row") {
  std::vector<float> px(6 * 5, 280.0f);
  Mask m(6, 5);
  for (int y = 1; y <= 2; ++y)
    for (int x = 3; x <= 4; ++x) {
      m.set(x, y, true);
      px[y * 6 + x] = 300.0f + y * 10 + x;
    }
  Frame f(6, 5, px);
  SparseForeground sf = encode(f, m);
  REQUIRE(sf.runs.size() == 2);
  CHECK(sf.runs[0] == Run{1, 3, {313.0f, 314.0f}});
  CHECK(sf.runs[1] == Run{2, 3, {323.0f, 324.0f}});
  CHECK(sf.pixel_count() == 4);
  CHECK(encoded_size(sf) == 8 + 2 * 12 + 4 * 4);
  CHECK(encoded_size(sf, IntensityTag::U16) == 8 + 2 * 12 + 4 * 2);
}

TEST_CASE("file layout of a single run matches the byte-level description") {
  const fs::path p = temp_path("layout.bin");
  {
    SparseWriter w(p, 10, 6, IntensityTag::U16);
    w.write(SparseForeground{7, {Run{3, 5, {301.0f, 302.0f}}}});
    w.close();
  }
  std::vector<unsigned char> expect;
  for (char ch : std::string("LPBFSPARSE1")) expect.push_back(static_cast<unsigned char>(ch));
  le32(expect, 10);
  le32(expect, 6);
  le32(expect, 1);
  expect.push_back(0);
  le32(expect, 7);
  le32(expect, 1);
  le32(expect, 3);
  le32(expect, 5);
  le32(expect, 2);
  expect.insert(expect.end(), {0x2d, 0x01, 0x2e, 0x01});  // 301, 302 as u16 LE
  CHECK(slurp(p) == expect);

  SparseReader r(p);
  CHECK(r.width() == 10);
  CHECK(r.height() == 6);
  CHECK(r.frame_count() == 1);
  CHECK(r.tag() == IntensityTag::U16);
  auto all = r.read_all();
  REQUIRE(all.size() == 1);
  CHECK(all[0] == SparseForeground{7, {Run{3, 5, {301.0f, 302.0f}}}});
  fs::remove(p);
}

TEST_CASE("random masks round-trip through memory and disk") {
  std::mt19937 rng(2024);
  const fs::path p = temp_path("random.bin");
  std::vector<SparseForeground> written;
  std::vector<Frame> frames;
  std::vector<Mask> masks;
  {
    SparseWriter w(p, 64, 64);
    for (int i = 0; i < 40; ++i) {
      Frame f = testing::random_frame(rng, 64, 64, 1.0f, 900.0f).with_index(static_cast<std::size_t>(i));
      Mask m = testing::random_mask(rng, 64, 64, i % 5 == 0 ? 0.0 : 0.05 * (i % 7));
      SparseForeground sf = encode(f, m);
      CHECK(sf.pixel_count() == m.count());
      Frame back = decode(sf, 64, 64);
      Frame oracle = masked_oracle(f, m);
      CHECK(std::equal(back.pixels().begin(), back.pixels().end(), oracle.pixels().begin()));
      w.write(sf);
      written.push_back(sf);
      frames.push_back(f);
      masks.push_back(m);
    }
    w.close();
  }
  std::size_t expect_bytes = 11 + 13;
  for (const auto& sf : written) expect_bytes += encoded_size(sf);
  CHECK(fs::file_size(p) == expect_bytes);
  SparseReader r(p);
  std::size_t i = 0;
  while (auto sf = r.next()) {
    REQUIRE(i < written.size());
    CHECK(*sf == written[i]);
    ++i;
  }
  CHECK(i == written.size());
  fs::remove(p);
}

TEST_CASE("u16 storage rejects values it cannot hold exactly") {
  const fs::path p = temp_path("u16.bin");
  SparseWriter w(p, 4, 4, IntensityTag::U16);
  CHECK_THROWS_AS(w.write(SparseForeground{0, {Run{0, 0, {300.5f}}}}), ConfigError);
  CHECK_THROWS_AS(w.write(SparseForeground{0, {Run{0, 0, {70000.0f}}}}), ConfigError);
  w.close();
  fs::remove(p);
}

TEST_CASE("decode rejects malformed runs") {
  CHECK_THROWS_AS(decode(SparseForeground{0, {Run{0, 0, {}}}}, 4, 4), CorruptRecordError);
  CHECK_THROWS_AS(decode(SparseForeground{0, {Run{4, 0, {1.0f}}}}, 4, 4), CorruptRecordError);
  CHECK_THROWS_AS(decode(SparseForeground{0, {Run{0, 3, {1.0f, 2.0f}}}}, 4, 4), CorruptRecordError);
  CHECK_THROWS_AS(decode(SparseForeground{0, {Run{1, 0, {1.0f, 1.0f}}, Run{1, 1, {1.0f}}}}, 4, 4),
                  CorruptRecordError);
  CHECK_THROWS_AS(decode(SparseForeground{0, {Run{2, 0, {1.0f}}, Run{1, 0, {1.0f}}}}, 4, 4),
                  CorruptRecordError);
  CHECK_THROWS_AS(encode(Frame::filled(4, 4, 1.0f), Mask(3, 4)), ShapeError);
}

TEST_CASE("corrupt files raise CorruptRecordError") {
  const fs::path p = temp_path("corrupt.bin");
  {
    SparseWriter w(p, 16, 16);
    std::mt19937 rng(1);
    for (int i = 0; i < 3; ++i) w.write(encode(testing::random_frame(rng, 16, 16, 1, 500), testing::random_mask(rng, 16, 16, 0.2)));
    w.close();
  }
  const auto good = slurp(p);
  const fs::path q = temp_path("corrupt_copy.bin");

  auto read_all = [&](const std::vector<unsigned char>& bytes) {
    spit(q, bytes);
    SparseReader r(q);
    return r.read_all();
  };
  CHECK(read_all(good).size() == 3);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(read_all(bad_magic), CorruptRecordError);

  auto truncated = good;
  truncated.resize(good.size() - 3);
  CHECK_THROWS_AS(read_all(truncated), CorruptRecordError);

  auto short_header = good;
  short_header.resize(15);
  CHECK_THROWS_AS(read_all(short_header), CorruptRecordError);

  auto bad_tag = good;
  bad_tag[23] = 9;
  CHECK_THROWS_AS(read_all(bad_tag), CorruptRecordError);

  // First run of the first frame: push its row past the frame height.
  auto bad_row = good;
  bad_row[24 + 8] = 200;
  CHECK_THROWS_AS(read_all(bad_row), CorruptRecordError);

  auto bad_count = good;
  bad_count[19] = 5;
  CHECK_THROWS_AS(read_all(bad_count), CorruptRecordError);

  fs::remove(p);
  fs::remove(q);
}

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

#include "lpbfseg/seqio.hpp"

#include <cmath>
#include <cstring>

#include "binio.hpp"

namespace lpbfseg {

namespace {
constexpr char kMagic[] = "LPBFSEQ1";
constexpr std::size_t kMagicLen = 8;
constexpr std::size_t kHeaderLen = kMagicLen + 4 + 4 + 4 + 1 + 4;
}  // namespace

SequenceWriter::SequenceWriter(const std::filesystem::path& path, int width, int height,
                               IntensityTag dtype, std::uint32_t warmup_count)
    : os_(path, std::ios::binary | std::ios::trunc), width_(width), height_(height), dtype_(dtype) {
  if (!os_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (width < 1 || height < 1) throw ConfigError("sequence file: dimensions must be positive");
  os_.write(kMagic, kMagicLen);
  binio::put_u32(os_, static_cast<std::uint32_t>(width));
  binio::put_u32(os_, static_cast<std::uint32_t>(height));
  binio::put_u32(os_, 0);
  binio::put_u8(os_, static_cast<std::uint8_t>(dtype));
  binio::put_u32(os_, warmup_count);
}

SequenceWriter::~SequenceWriter() {
  try {
    close();
  } catch (...) {
  }
}

void SequenceWriter::write(const Frame& frame) {
  if (closed_) throw std::logic_error("sequence writer is closed");
  require_same_shape(frame.width(), frame.height(), width_, height_, "sequence file");
  const auto px = frame.pixels();
  if (dtype_ == IntensityTag::F32) {
    os_.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size() * 4));
  } else {
    std::vector<std::uint16_t> buf(px.size());
    for (std::size_t i = 0; i < px.size(); ++i) {
      if (px[i] > 65535.0f || std::floor(px[i]) != px[i])
        throw ConfigError("sequence file: value not representable as u16");
      buf[i] = static_cast<std::uint16_t>(px[i]);
    }
    os_.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 2));
  }
  ++count_;
}

void SequenceWriter::close() {
  if (closed_) return;
  closed_ = true;
  os_.seekp(static_cast<std::streamoff>(kMagicLen + 8));
  binio::put_u32(os_, count_);
  os_.close();
  if (os_.fail()) throw std::runtime_error("sequence file: write failed");
}

SequenceReader::SequenceReader(const std::filesystem::path& path) : is_(path, std::ios::binary) {
  if (!is_) throw std::runtime_error("cannot open " + path.string());
  char magic[kMagicLen];
  if (!is_.read(magic, kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0)
    throw CorruptRecordError("not an LPBFSEQ1 file: " + path.string());
  std::uint32_t w = binio::get<std::uint32_t>(is_, "width");
  std::uint32_t h = binio::get<std::uint32_t>(is_, "height");
  count_ = binio::get<std::uint32_t>(is_, "frame count");
  std::uint8_t dtype = binio::get<std::uint8_t>(is_, "dtype");
  warmup_ = binio::get<std::uint32_t>(is_, "warm-up count");
  if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16))
    throw CorruptRecordError("sequence file: bad dimensions");
  if (dtype > 1) throw CorruptRecordError("sequence file: unknown dtype tag");
  width_ = static_cast<int>(w);
  height_ = static_cast<int>(h);
  dtype_ = static_cast<IntensityTag>(dtype);

  std::error_code ec;
  auto size = std::filesystem::file_size(path, ec);
  const std::uint64_t frame_bytes = static_cast<std::uint64_t>(w) * h * (dtype_ == IntensityTag::F32 ? 4 : 2);
  if (!ec && size < kHeaderLen + frame_bytes * count_)
    throw CorruptRecordError("sequence file: shorter than its header declares");
}

std::optional<Frame> SequenceReader::next() {
  if (read_ >= count_) return std::nullopt;
  const std::size_t n = static_cast<std::size_t>(width_) * height_;
  std::vector<Intensity> px(n);
  if (dtype_ == IntensityTag::F32) {
    if (!is_.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(n * 4)))
      throw CorruptRecordError("sequence file: truncated frame");
    for (Intensity v : px)
      if (!std::isfinite(v) || v < 0.0f) throw CorruptRecordError("sequence file: invalid intensity");
  } else {
    u16_.resize(n);
    if (!is_.read(reinterpret_cast<char*>(u16_.data()), static_cast<std::streamsize>(n * 2)))
      throw CorruptRecordError("sequence file: truncated frame");
    for (std::size_t i = 0; i < n; ++i) px[i] = static_cast<Intensity>(u16_[i]);
  }
  return Frame(width_, height_, std::move(px), read_++);
}

void write_sequence(const std::filesystem::path& path, const FrameSequence& seq, IntensityTag dtype) {
  if (seq.empty()) throw ConfigError("cannot write an empty sequence without dimensions");
  SequenceWriter w(path, seq.width(), seq.height(), dtype, static_cast<std::uint32_t>(seq.warmup_count()));
  for (const auto& f : seq) w.write(f);
  w.close();
}

FrameSequence read_sequence(const std::filesystem::path& path, double frame_rate) {
  SequenceReader r(path);
  std::vector<Frame> frames;
  frames.reserve(r.frame_count());
  while (auto f = r.next()) frames.push_back(std::move(*f));
  return FrameSequence(std::move(frames), frame_rate, r.warmup_count());
}

}  // namespace lpbfseg

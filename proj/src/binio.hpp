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

// Little-endian primitives shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "lpbfseg/core.hpp"

namespace lpbfseg::binio {

static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");

inline void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
inline void put_u16(std::ostream& os, std::uint16_t v) { os.write(reinterpret_cast<const char*>(&v), 2); }
inline void put_u8(std::ostream& os, std::uint8_t v) { os.put(static_cast<char>(v)); }
inline void put_f32(std::ostream& os, float v) { os.write(reinterpret_cast<const char*>(&v), 4); }

template <class T>
T get(std::istream& is, const char* what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw CorruptRecordError(std::string("truncated file while reading ") + what);
  return v;
}

}  // namespace lpbfseg::binio

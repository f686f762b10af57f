/*
 * Copyright 2026 The Fwchain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fwchain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest32 = std::array<std::uint8_t, 32>;

inline ByteView as_view(const Bytes& b) { return ByteView(b.data(), b.size()); }

inline ByteView as_view(std::string_view s) {
  return ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

inline ByteView as_view(const Digest32& d) { return ByteView(d.data(), d.size()); }

inline Bytes to_bytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

inline Bytes to_bytes(ByteView v) { return Bytes(v.begin(), v.end()); }

inline bool is_zero(const Digest32& d) {
  for (auto b : d)
    if (b != 0) return false;
  return true;
}

std::string to_hex(ByteView data);
std::optional<Bytes> from_hex(std::string_view hex);
std::optional<Digest32> digest_from_hex(std::string_view hex);

// Big-endian fixed-width integer helpers shared by the canonical codec,
// the bootloader framing and the key derivation paths.
void put_be32(std::uint8_t* out, std::uint32_t v);
void put_be64(std::uint8_t* out, std::uint64_t v);
std::uint32_t get_be32(const std::uint8_t* in);
std::uint64_t get_be64(const std::uint8_t* in);

}  // namespace fwchain

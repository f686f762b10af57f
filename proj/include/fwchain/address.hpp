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
#include <compare>
#include <string>

#include "fwchain/bytes.hpp"
#include "fwchain/crypto/ec.hpp"
#include "fwchain/result.hpp"

namespace fwchain {

// 20-byte account identifier: the last 20 bytes of SHA-256 over the 64-byte
// public key encoding.
struct Address {
  std::array<std::uint8_t, 20> bytes{};

  static Address from_public_key(const crypto::PublicKey& pub);
  static Result<Address> from_hex_string(std::string_view hex);

  std::string hex() const { return to_hex(ByteView(bytes.data(), bytes.size())); }
  ByteView view() const { return ByteView(bytes.data(), bytes.size()); }

  friend bool operator==(const Address&, const Address&) = default;
  friend auto operator<=>(const Address&, const Address&) = default;
};

// Deterministic PRNG used wherever the simulation needs reproducible
// randomness (element entropy, boot-sector choice).
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

}  // namespace fwchain

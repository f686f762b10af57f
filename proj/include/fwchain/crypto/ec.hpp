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

#include <cstdint>

#include "fwchain/bytes.hpp"
#include "fwchain/result.hpp"

// Elliptic-curve signing and key agreement for the registry wallet and the
// secure element model. One curve is used system-wide, chosen at build time
// (FWCHAIN_CURVE); both NIST P-256 and secp256k1 are implemented so either
// choice links.
//
// Signatures use a deterministic nonce derived from the secret key and the
// message digest, so repeated signing of the same digest yields the same
// signature and test vectors stay stable. This is simulation-grade ECDSA:
// the arithmetic is not constant-time and must not guard real keys.

namespace fwchain::crypto {

enum class CurveId { p256, secp256k1 };

CurveId default_curve();
const char* curve_name(CurveId id);

// Affine public point, 32-byte big-endian coordinates.
struct PublicKey {
  std::array<std::uint8_t, 32> x{};
  std::array<std::uint8_t, 32> y{};

  Bytes encoded() const;  // 64 bytes, x || y
  static Result<PublicKey> from_encoded(ByteView b);

  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct SecretKey {
  std::array<std::uint8_t, 32> d{};  // big-endian scalar, 1 <= d < n
};

struct KeyPair {
  SecretKey secret;
  PublicKey pub;
};

// r || s, 32-byte big-endian halves.
struct Signature {
  std::array<std::uint8_t, 32> r{};
  std::array<std::uint8_t, 32> s{};

  Bytes encoded() const;  // 64 bytes
  static Result<Signature> from_encoded(ByteView b);

  friend bool operator==(const Signature&, const Signature&) = default;
};

// Derive a key pair from 32 bytes of seed material: the scalar is the seed
// reduced into [1, n-1]. Deterministic.
KeyPair keypair_from_seed(CurveId curve, const Digest32& seed);

bool on_curve(CurveId curve, const PublicKey& pub);

Signature sign_digest(CurveId curve, const SecretKey& sk, const Digest32& digest);
bool verify_digest(CurveId curve, const PublicKey& pub, const Digest32& digest,
                   const Signature& sig);

// ECDH: x-coordinate of sk * peer, 32 bytes big-endian.
Result<Digest32> ecdh(CurveId curve, const SecretKey& sk, const PublicKey& peer);

}  // namespace fwchain::crypto

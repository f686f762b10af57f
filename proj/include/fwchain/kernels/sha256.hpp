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
#include <optional>
#include <vector>

#include "fwchain/bytes.hpp"

// SHA-256 is the hot inner loop of the whole toolkit: every DAG node, every
// block digest, every firmware image and every boot-sector attestation goes
// through it. The kernel ships a portable scalar reference plus SIMD
// variants selected at runtime:
//
//   scalar   — FIPS 180-4 straight-line reference, always available
//   shani    — single-stream x86 SHA extension path
//   avx2_x8  — 8-lane multi-buffer path for batches of equal-length inputs
//              (the content-store hashes all full-size chunks of an image
//              in lockstep)
//
// All variants are equivalence-tested against the scalar reference.

namespace fwchain::kernels {

enum class Sha256Backend { scalar, shani, avx2_x8 };

const char* backend_name(Sha256Backend b);

// Backend the dispatcher would pick for single-stream hashing on this CPU.
Sha256Backend active_single_backend();

// True when the 8-lane batch path is usable on this CPU.
bool avx2_batch_available();

// Test hook: pin single-stream hashing to one backend (nullopt = auto).
// Pinning shani on a CPU without the extension is ignored.
void force_single_backend(std::optional<Sha256Backend> b);

// Incremental single-stream hasher.
class Sha256 {
 public:
  Sha256();

  void update(ByteView data);
  Digest32 finish();

  static Digest32 digest(ByteView data);

 private:
  std::uint32_t state_[8];
  std::uint8_t buf_[64];
  std::size_t fill_ = 0;
  std::uint64_t total_ = 0;
};

inline Digest32 sha256(ByteView data) { return Sha256::digest(data); }

// Hash a batch of messages. Equal-length groups go through the 8-lane AVX2
// kernel when available; everything else falls back to the single-stream
// path. Output order matches input order.
std::vector<Digest32> sha256_batch(const std::vector<ByteView>& msgs);

// Direct backend entry points for equivalence tests.
namespace detail {
void compress_scalar(std::uint32_t state[8], const std::uint8_t* block, std::size_t nblocks);
void compress_shani(std::uint32_t state[8], const std::uint8_t* block, std::size_t nblocks);
// Hash up to 8 equal-length messages in lockstep. lanes ≤ 8.
void sha256_avx2_8lane(const std::uint8_t* const* msg, std::size_t len, std::size_t lanes,
                       Digest32* out);
Digest32 sha256_single(ByteView data, Sha256Backend backend);
}  // namespace detail

}  // namespace fwchain::kernels

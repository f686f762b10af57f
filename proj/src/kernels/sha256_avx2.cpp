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

// 8-lane multi-buffer SHA-256: each 32-bit lane of a YMM register carries
// one message's state, so eight equal-length messages are compressed in
// lockstep. This TU is compiled with -mavx2; callers must gate on
// cpu_has_avx2().

#include "fwchain/kernels/sha256.hpp"
#include "fwchain/kernels/xor_fold.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cstring>

#include "sha256_k.hpp"

namespace fwchain::kernels::detail {

namespace {

inline __m256i rotr32(__m256i x, int n) {
  return _mm256_or_si256(_mm256_srli_epi32(x, n), _mm256_slli_epi32(x, 32 - n));
}

inline __m256i big_sigma0(__m256i x) {
  return _mm256_xor_si256(rotr32(x, 2), _mm256_xor_si256(rotr32(x, 13), rotr32(x, 22)));
}
inline __m256i big_sigma1(__m256i x) {
  return _mm256_xor_si256(rotr32(x, 6), _mm256_xor_si256(rotr32(x, 11), rotr32(x, 25)));
}
inline __m256i small_sigma0(__m256i x) {
  return _mm256_xor_si256(rotr32(x, 7),
                          _mm256_xor_si256(rotr32(x, 18), _mm256_srli_epi32(x, 3)));
}
inline __m256i small_sigma1(__m256i x) {
  return _mm256_xor_si256(rotr32(x, 17),
                          _mm256_xor_si256(rotr32(x, 19), _mm256_srli_epi32(x, 10)));
}

inline __m256i ch(__m256i e, __m256i f, __m256i g) {
  return _mm256_xor_si256(g, _mm256_and_si256(e, _mm256_xor_si256(f, g)));
}
inline __m256i maj(__m256i a, __m256i b, __m256i c) {
  return _mm256_or_si256(_mm256_and_si256(a, b),
                         _mm256_and_si256(c, _mm256_or_si256(a, b)));
}

inline std::uint32_t load_be32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return __builtin_bswap32(v);
}

// One 64-byte block per lane, all eight lanes advanced together.
void compress_8lane_block(__m256i state[8], const std::uint8_t* const block[8]) {
  __m256i w[64];
  for (int t = 0; t < 16; ++t) {
    w[t] = _mm256_set_epi32(
        static_cast<int>(load_be32(block[7] + t * 4)), static_cast<int>(load_be32(block[6] + t * 4)),
        static_cast<int>(load_be32(block[5] + t * 4)), static_cast<int>(load_be32(block[4] + t * 4)),
        static_cast<int>(load_be32(block[3] + t * 4)), static_cast<int>(load_be32(block[2] + t * 4)),
        static_cast<int>(load_be32(block[1] + t * 4)), static_cast<int>(load_be32(block[0] + t * 4)));
  }
  for (int t = 16; t < 64; ++t) {
    w[t] = _mm256_add_epi32(
        _mm256_add_epi32(small_sigma1(w[t - 2]), w[t - 7]),
        _mm256_add_epi32(small_sigma0(w[t - 15]), w[t - 16]));
  }

  __m256i a = state[0], b = state[1], c = state[2], d = state[3];
  __m256i e = state[4], f = state[5], g = state[6], h = state[7];

  for (int t = 0; t < 64; ++t) {
    __m256i t1 = _mm256_add_epi32(
        _mm256_add_epi32(h, big_sigma1(e)),
        _mm256_add_epi32(ch(e, f, g),
                         _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(kSha256K[t])), w[t])));
    __m256i t2 = _mm256_add_epi32(big_sigma0(a), maj(a, b, c));
    h = g;
    g = f;
    f = e;
    e = _mm256_add_epi32(d, t1);
    d = c;
    c = b;
    b = a;
    a = _mm256_add_epi32(t1, t2);
  }

  state[0] = _mm256_add_epi32(state[0], a);
  state[1] = _mm256_add_epi32(state[1], b);
  state[2] = _mm256_add_epi32(state[2], c);
  state[3] = _mm256_add_epi32(state[3], d);
  state[4] = _mm256_add_epi32(state[4], e);
  state[5] = _mm256_add_epi32(state[5], f);
  state[6] = _mm256_add_epi32(state[6], g);
  state[7] = _mm256_add_epi32(state[7], h);
}

}  // namespace

void sha256_avx2_8lane(const std::uint8_t* const* msg, std::size_t len, std::size_t lanes,
                       Digest32* out) {
  __m256i state[8];
  for (int i = 0; i < 8; ++i) state[i] = _mm256_set1_epi32(static_cast<int>(kSha256Init[i]));

  // Standard merkle-damgard padding: all lanes share one layout because the
  // lengths are equal. tail holds the final 1-2 blocks per lane.
  const std::size_t full_blocks = len / 64;
  const std::size_t rem = len % 64;
  const std::size_t tail_blocks = (rem + 1 + 8 > 64) ? 2 : 1;

  std::uint8_t tail[8][128];
  for (std::size_t l = 0; l < 8; ++l) {
    const std::uint8_t* src = msg[l < lanes ? l : lanes - 1];
    std::memset(tail[l], 0, sizeof(tail[l]));
    if (rem) std::memcpy(tail[l], src + full_blocks * 64, rem);
    tail[l][rem] = 0x80;
    put_be64(tail[l] + tail_blocks * 64 - 8, std::uint64_t(len) * 8);
  }

  const std::uint8_t* block[8];
  for (std::size_t b = 0; b < full_blocks + tail_blocks; ++b) {
    for (std::size_t l = 0; l < 8; ++l) {
      const std::uint8_t* src = msg[l < lanes ? l : lanes - 1];
      block[l] = (b < full_blocks) ? src + b * 64 : tail[l] + (b - full_blocks) * 64;
    }
    compress_8lane_block(state, block);
  }

  // Un-transpose: lane l's digest is word l of each state vector.
  alignas(32) std::uint32_t words[8][8];
  for (int i = 0; i < 8; ++i)
    _mm256_store_si256(reinterpret_cast<__m256i*>(words[i]), state[i]);
  for (std::size_t l = 0; l < lanes; ++l) {
    for (int i = 0; i < 8; ++i) put_be32(out[l].data() + i * 4, words[i][l]);
  }
}

std::uint8_t xor_fold_avx2(ByteView data) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= data.size(); i += 32) {
    acc = _mm256_xor_si256(acc,
                           _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data.data() + i)));
  }
  alignas(32) std::uint8_t lanes[32];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::uint8_t x = 0;
  for (auto b : lanes) x ^= b;
  for (; i < data.size(); ++i) x ^= data[i];
  return x;
}

}  // namespace fwchain::kernels::detail

#else

namespace fwchain::kernels::detail {

void sha256_avx2_8lane(const std::uint8_t* const* msg, std::size_t len, std::size_t lanes,
                       Digest32* out) {
  for (std::size_t l = 0; l < lanes; ++l) out[l] = sha256_single(ByteView(msg[l], len), Sha256Backend::scalar);
}

std::uint8_t xor_fold_avx2(ByteView data) { return xor_fold_scalar(data); }

}  // namespace fwchain::kernels::detail

#endif

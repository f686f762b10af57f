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

#include "u256.hpp"

namespace fwchain::crypto {

using u128 = unsigned __int128;

U256 U256::from_be_bytes(const std::uint8_t b[32]) {
  U256 v;
  for (int i = 0; i < 4; ++i) {
    std::uint64_t w = 0;
    for (int j = 0; j < 8; ++j) w = (w << 8) | b[(3 - i) * 8 + j];
    v.limb[i] = w;
  }
  return v;
}

void U256::to_be_bytes(std::uint8_t out[32]) const {
  for (int i = 0; i < 4; ++i) {
    std::uint64_t w = limb[3 - i];
    for (int j = 7; j >= 0; --j) {
      out[i * 8 + j] = std::uint8_t(w);
      w >>= 8;
    }
  }
}

int U256::top_bit() const {
  for (int i = 3; i >= 0; --i) {
    if (limb[i]) return i * 64 + 63 - __builtin_clzll(limb[i]);
  }
  return -1;
}

bool geq(const U256& a, const U256& b) {
  for (int i = 3; i >= 0; --i) {
    if (a.limb[i] != b.limb[i]) return a.limb[i] > b.limb[i];
  }
  return true;
}

std::uint64_t add(U256& out, const U256& a, const U256& b) {
  u128 c = 0;
  for (int i = 0; i < 4; ++i) {
    u128 s = u128(a.limb[i]) + b.limb[i] + std::uint64_t(c);
    out.limb[i] = std::uint64_t(s);
    c = s >> 64;
  }
  return std::uint64_t(c);
}

std::uint64_t sub(U256& out, const U256& a, const U256& b) {
  std::uint64_t borrow = 0;
  for (int i = 0; i < 4; ++i) {
    u128 d = u128(a.limb[i]) - b.limb[i] - borrow;
    out.limb[i] = std::uint64_t(d);
    borrow = std::uint64_t(d >> 64) ? 1 : 0;
  }
  return borrow;
}

MontCtx::MontCtx(const U256& modulus) : m_(modulus) {
  // m0inv = -m^-1 mod 2^64 by Newton iteration (m odd).
  std::uint64_t inv = m_.limb[0];
  for (int i = 0; i < 5; ++i) inv *= 2 - m_.limb[0] * inv;
  m0inv_ = ~inv + 1;

  // 2^256 mod m = 2^256 - m, valid because 2^255 < m < 2^256.
  U256 zero;
  sub(one_, zero, m_);  // wraps to 2^256 - m

  // rr = (2^256 mod m) << 256 mod m via 256 modular doublings.
  U256 r = one_;
  for (int i = 0; i < 256; ++i) r = add_mod(r, r);
  rr_ = r;

  U256 two;
  two.limb[0] = 2;
  sub(m_minus_2_, m_, two);
}

U256 MontCtx::mul(const U256& a, const U256& b) const {
  std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    // t += a[i] * b
    u128 c = 0;
    for (int j = 0; j < 4; ++j) {
      u128 s = u128(a.limb[i]) * b.limb[j] + t[j] + std::uint64_t(c);
      t[j] = std::uint64_t(s);
      c = s >> 64;
    }
    u128 s4 = u128(t[4]) + std::uint64_t(c);
    t[4] = std::uint64_t(s4);
    t[5] += std::uint64_t(s4 >> 64);

    // fold out the low limb: t = (t + mi*m) >> 64
    std::uint64_t mi = t[0] * m0inv_;
    c = (u128(mi) * m_.limb[0] + t[0]) >> 64;
    for (int j = 1; j < 4; ++j) {
      u128 s = u128(mi) * m_.limb[j] + t[j] + std::uint64_t(c);
      t[j - 1] = std::uint64_t(s);
      c = s >> 64;
    }
    u128 s5 = u128(t[4]) + std::uint64_t(c);
    t[3] = std::uint64_t(s5);
    t[4] = t[5] + std::uint64_t(s5 >> 64);
    t[5] = 0;
  }

  U256 r;
  r.limb[0] = t[0];
  r.limb[1] = t[1];
  r.limb[2] = t[2];
  r.limb[3] = t[3];
  if (t[4] || geq(r, m_)) sub(r, r, m_);
  return r;
}

U256 MontCtx::add_mod(const U256& a, const U256& b) const {
  U256 r;
  std::uint64_t carry = add(r, a, b);
  if (carry || geq(r, m_)) sub(r, r, m_);
  return r;
}

U256 MontCtx::sub_mod(const U256& a, const U256& b) const {
  U256 r;
  if (sub(r, a, b)) add(r, r, m_);
  return r;
}

U256 MontCtx::pow(const U256& a_mont, const U256& e) const {
  U256 result = one_;
  int top = e.top_bit();
  for (int i = top; i >= 0; --i) {
    result = sqr(result);
    if (e.bit(i)) result = mul(result, a_mont);
  }
  return result;
}

U256 MontCtx::reduce(const U256& a) const {
  U256 r = a;
  if (geq(r, m_)) sub(r, r, m_);
  return r;
}

}  // namespace fwchain::crypto

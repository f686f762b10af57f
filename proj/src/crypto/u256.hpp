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

namespace fwchain::crypto {

// 256-bit unsigned integer, little-endian 64-bit limbs. Internal to the
// curve arithmetic; not exposed through public headers.
struct U256 {
  std::uint64_t limb[4] = {0, 0, 0, 0};

  static U256 zero() { return U256{}; }
  static U256 one() {
    U256 v;
    v.limb[0] = 1;
    return v;
  }
  static U256 from_be_bytes(const std::uint8_t b[32]);
  void to_be_bytes(std::uint8_t out[32]) const;

  bool is_zero() const { return (limb[0] | limb[1] | limb[2] | limb[3]) == 0; }
  bool bit(int i) const { return (limb[i / 64] >> (i % 64)) & 1; }
  int top_bit() const;  // index of highest set bit, -1 if zero

  friend bool operator==(const U256& a, const U256& b) {
    return a.limb[0] == b.limb[0] && a.limb[1] == b.limb[1] && a.limb[2] == b.limb[2] &&
           a.limb[3] == b.limb[3];
  }
};

// a >= b
bool geq(const U256& a, const U256& b);
// a + b, returns carry
std::uint64_t add(U256& out, const U256& a, const U256& b);
// a - b, returns borrow
std::uint64_t sub(U256& out, const U256& a, const U256& b);

// Montgomery arithmetic modulo an odd 256-bit prime m with 2^255 < m < 2^256.
class MontCtx {
 public:
  explicit MontCtx(const U256& modulus);

  const U256& modulus() const { return m_; }

  U256 to_mont(const U256& a) const { return mul(a, rr_); }
  U256 from_mont(const U256& a) const { return mul(a, U256::one()); }
  const U256& one_mont() const { return one_; }

  // Montgomery product: a*b*2^-256 mod m.
  U256 mul(const U256& a, const U256& b) const;
  U256 sqr(const U256& a) const { return mul(a, a); }
  U256 add_mod(const U256& a, const U256& b) const;
  U256 sub_mod(const U256& a, const U256& b) const;
  // a^e mod m, a in Montgomery form, result in Montgomery form.
  U256 pow(const U256& a_mont, const U256& e) const;
  // Modular inverse by Fermat (m prime), Montgomery in/out.
  U256 inv(const U256& a_mont) const { return pow(a_mont, m_minus_2_); }

  // Reduce an arbitrary 256-bit value mod m (single conditional subtract is
  // enough because m > 2^255).
  U256 reduce(const U256& a) const;

 private:
  U256 m_;
  U256 rr_;         // 2^512 mod m
  U256 one_;        // 2^256 mod m
  U256 m_minus_2_;
  std::uint64_t m0inv_;  // -m^-1 mod 2^64
};

}  // namespace fwchain::crypto

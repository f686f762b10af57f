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

#include "fwchain/crypto/ec.hpp"

#include <cstdlib>
#include <cstring>

#include "fwchain/kernels/sha256.hpp"
#include "u256.hpp"

namespace fwchain::crypto {

namespace {

U256 u256_from_hex(const char* hex) {
  auto bytes = from_hex(hex);
  if (!bytes || bytes->size() != 32) std::abort();  // curve constants are compile-time fixed
  std::uint8_t buf[32];
  std::memcpy(buf, bytes->data(), 32);
  return U256::from_be_bytes(buf);
}

// Short-Weierstrass curve y^2 = x^3 + ax + b over F_p, group order n.
struct Curve {
  MontCtx fp;
  MontCtx fn;
  U256 a_mont;
  U256 b_mont;
  U256 gx;  // affine, Montgomery form
  U256 gy;
  bool a_is_zero;

  Curve(const char* p_hex, const char* n_hex, const char* a_hex, const char* b_hex,
        const char* gx_hex, const char* gy_hex)
      : fp(u256_from_hex(p_hex)),
        fn(u256_from_hex(n_hex)),
        a_mont(fp.to_mont(u256_from_hex(a_hex))),
        b_mont(fp.to_mont(u256_from_hex(b_hex))),
        gx(fp.to_mont(u256_from_hex(gx_hex))),
        gy(fp.to_mont(u256_from_hex(gy_hex))),
        a_is_zero(u256_from_hex(a_hex).is_zero()) {}
};

const Curve& curve_for(CurveId id) {
  static const Curve p256(
      "ffffffff" "00000001" "00000000" "00000000" "00000000" "ffffffff" "ffffffff" "ffffffff",
      "ffffffff" "00000000" "ffffffff" "ffffffff" "bce6faad" "a7179e84" "f3b9cac2" "fc632551",
      "ffffffff" "00000001" "00000000" "00000000" "00000000" "ffffffff" "ffffffff" "fffffffc",
      "5ac635d8" "aa3a93e7" "b3ebbd55" "769886bc" "651d06b0" "cc53b0f6" "3bce3c3e" "27d2604b",
      "6b17d1f2" "e12c4247" "f8bce6e5" "63a440f2" "77037d81" "2deb33a0" "f4a13945" "d898c296",
      "4fe342e2" "fe1a7f9b" "8ee7eb4a" "7c0f9e16" "2bce3357" "6b315ece" "cbb64068" "37bf51f5");
  static const Curve k256(
      "ffffffff" "ffffffff" "ffffffff" "ffffffff" "ffffffff" "ffffffff" "fffffffe" "fffffc2f",
      "ffffffff" "ffffffff" "ffffffff" "fffffffe" "baaedce6" "af48a03b" "bfd25e8c" "d0364141",
      "00000000" "00000000" "00000000" "00000000" "00000000" "00000000" "00000000" "00000000",
      "00000000" "00000000" "00000000" "00000000" "00000000" "00000000" "00000000" "00000007",
      "79be667e" "f9dcbbac" "55a06295" "ce870b07" "029bfcdb" "2dce28d9" "59f2815b" "16f81798",
      "483ada77" "26a3c465" "5da4fbfc" "0e1108a8" "fd17b448" "a6855419" "9c47d08f" "fb10d4b8");
  return id == CurveId::p256 ? p256 : k256;
}

// Jacobian point, coordinates in Montgomery form. Z == 0 means infinity.
struct JPoint {
  U256 x, y, z;
  bool inf = true;
};

JPoint infinity() { return JPoint{}; }

JPoint from_affine(const Curve& c, const U256& x_mont, const U256& y_mont) {
  JPoint p;
  p.x = x_mont;
  p.y = y_mont;
  p.z = c.fp.one_mont();
  p.inf = false;
  return p;
}

JPoint dbl(const Curve& c, const JPoint& p) {
  const MontCtx& f = c.fp;
  if (p.inf || p.y.is_zero()) return infinity();

  U256 y2 = f.sqr(p.y);
  U256 s = f.mul(p.x, y2);
  s = f.add_mod(s, s);
  s = f.add_mod(s, s);  // 4*x*y^2

  U256 x2 = f.sqr(p.x);
  U256 m = f.add_mod(x2, f.add_mod(x2, x2));  // 3*x^2
  if (!c.a_is_zero) {
    U256 z2 = f.sqr(p.z);
    m = f.add_mod(m, f.mul(c.a_mont, f.sqr(z2)));  // + a*z^4
  }

  U256 x3 = f.sub_mod(f.sqr(m), f.add_mod(s, s));
  U256 y4 = f.sqr(y2);
  U256 y4_8 = f.add_mod(y4, y4);
  y4_8 = f.add_mod(y4_8, y4_8);
  y4_8 = f.add_mod(y4_8, y4_8);  // 8*y^4
  U256 y3 = f.sub_mod(f.mul(m, f.sub_mod(s, x3)), y4_8);
  U256 z3 = f.mul(f.add_mod(p.y, p.y), p.z);

  JPoint r;
  r.x = x3;
  r.y = y3;
  r.z = z3;
  r.inf = false;
  return r;
}

JPoint add(const Curve& c, const JPoint& p, const JPoint& q) {
  const MontCtx& f = c.fp;
  if (p.inf) return q;
  if (q.inf) return p;

  U256 z1z1 = f.sqr(p.z);
  U256 z2z2 = f.sqr(q.z);
  U256 u1 = f.mul(p.x, z2z2);
  U256 u2 = f.mul(q.x, z1z1);
  U256 s1 = f.mul(p.y, f.mul(z2z2, q.z));
  U256 s2 = f.mul(q.y, f.mul(z1z1, p.z));

  if (u1 == u2) {
    if (!(s1 == s2)) return infinity();
    return dbl(c, p);
  }

  U256 h = f.sub_mod(u2, u1);
  U256 r = f.sub_mod(s2, s1);
  U256 h2 = f.sqr(h);
  U256 h3 = f.mul(h2, h);
  U256 u1h2 = f.mul(u1, h2);

  U256 x3 = f.sub_mod(f.sub_mod(f.sqr(r), h3), f.add_mod(u1h2, u1h2));
  U256 y3 = f.sub_mod(f.mul(r, f.sub_mod(u1h2, x3)), f.mul(s1, h3));
  U256 z3 = f.mul(h, f.mul(p.z, q.z));

  JPoint out;
  out.x = x3;
  out.y = y3;
  out.z = z3;
  out.inf = false;
  return out;
}

// Left-to-right double-and-add. Not constant-time; simulation use only.
JPoint scalar_mul(const Curve& c, const U256& k, const JPoint& p) {
  JPoint acc = infinity();
  int top = k.top_bit();
  for (int i = top; i >= 0; --i) {
    acc = dbl(c, acc);
    if (k.bit(i)) acc = add(c, acc, p);
  }
  return acc;
}

struct Affine {
  U256 x, y;  // plain (non-Montgomery) form
};

bool to_affine(const Curve& c, const JPoint& p, Affine& out) {
  if (p.inf) return false;
  const MontCtx& f = c.fp;
  U256 zinv = f.inv(p.z);
  U256 zinv2 = f.sqr(zinv);
  out.x = f.from_mont(f.mul(p.x, zinv2));
  out.y = f.from_mont(f.mul(p.y, f.mul(zinv2, zinv)));
  return true;
}

U256 scalar_from_bytes_mod_n(const Curve& c, const std::uint8_t b[32]) {
  return c.fn.reduce(U256::from_be_bytes(b));
}

bool pub_to_point(const Curve& c, const PublicKey& pub, JPoint& out) {
  U256 x = U256::from_be_bytes(pub.x.data());
  U256 y = U256::from_be_bytes(pub.y.data());
  if (geq(x, c.fp.modulus()) || geq(y, c.fp.modulus())) return false;

  const MontCtx& f = c.fp;
  U256 xm = f.to_mont(x);
  U256 ym = f.to_mont(y);
  // y^2 == x^3 + a*x + b
  U256 lhs = f.sqr(ym);
  U256 rhs = f.add_mod(f.mul(f.sqr(xm), xm), c.b_mont);
  if (!c.a_is_zero) rhs = f.add_mod(rhs, f.mul(c.a_mont, xm));
  if (!(lhs == rhs)) return false;
  if (x.is_zero() && y.is_zero()) return false;

  out = from_affine(c, xm, ym);
  return true;
}

PublicKey pub_from_affine(const Affine& a) {
  PublicKey pk;
  a.x.to_be_bytes(pk.x.data());
  a.y.to_be_bytes(pk.y.data());
  return pk;
}

JPoint generator(const Curve& c) { return from_affine(c, c.gx, c.gy); }

// Deterministic nonce: k = SHA-256(d || digest || counter) mod n, first
// counter that yields a usable k. Stable across runs by construction.
U256 derive_nonce(const Curve& c, const SecretKey& sk, const Digest32& digest,
                  std::uint32_t counter) {
  Bytes material;
  material.insert(material.end(), sk.d.begin(), sk.d.end());
  material.insert(material.end(), digest.begin(), digest.end());
  std::uint8_t ctr[4];
  put_be32(ctr, counter);
  material.insert(material.end(), ctr, ctr + 4);
  Digest32 h = kernels::sha256(as_view(material));
  return scalar_from_bytes_mod_n(c, h.data());
}

}  // namespace

CurveId default_curve() {
#if defined(FWCHAIN_CURVE_SECP256K1)
  return CurveId::secp256k1;
#else
  return CurveId::p256;
#endif
}

const char* curve_name(CurveId id) { return id == CurveId::p256 ? "p256" : "secp256k1"; }

Bytes PublicKey::encoded() const {
  Bytes out(x.begin(), x.end());
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

Result<PublicKey> PublicKey::from_encoded(ByteView b) {
  if (b.size() != 64) return err(Errc::parse_error, "public key must be 64 bytes");
  PublicKey pk;
  std::memcpy(pk.x.data(), b.data(), 32);
  std::memcpy(pk.y.data(), b.data() + 32, 32);
  return pk;
}

Bytes Signature::encoded() const {
  Bytes out(r.begin(), r.end());
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

Result<Signature> Signature::from_encoded(ByteView b) {
  if (b.size() != 64) return err(Errc::parse_error, "signature must be 64 bytes");
  Signature sig;
  std::memcpy(sig.r.data(), b.data(), 32);
  std::memcpy(sig.s.data(), b.data() + 32, 32);
  return sig;
}

KeyPair keypair_from_seed(CurveId curve, const Digest32& seed) {
  const Curve& c = curve_for(curve);
  U256 d = scalar_from_bytes_mod_n(c, seed.data());
  if (d.is_zero()) d = U256::one();

  KeyPair kp;
  d.to_be_bytes(kp.secret.d.data());

  Affine a;
  to_affine(c, scalar_mul(c, d, generator(c)), a);
  kp.pub = pub_from_affine(a);
  return kp;
}

bool on_curve(CurveId curve, const PublicKey& pub) {
  JPoint p;
  return pub_to_point(curve_for(curve), pub, p);
}

Signature sign_digest(CurveId curve, const SecretKey& sk, const Digest32& digest) {
  const Curve& c = curve_for(curve);
  U256 d = U256::from_be_bytes(sk.d.data());
  U256 z = scalar_from_bytes_mod_n(c, digest.data());

  for (std::uint32_t counter = 0;; ++counter) {
    U256 k = derive_nonce(c, sk, digest, counter);
    if (k.is_zero()) continue;

    Affine rp;
    if (!to_affine(c, scalar_mul(c, k, generator(c)), rp)) continue;
    U256 r = c.fn.reduce(rp.x);
    if (r.is_zero()) continue;

    // s = k^-1 (z + r d) mod n
    const MontCtx& fn = c.fn;
    U256 rd = fn.from_mont(fn.mul(fn.to_mont(r), fn.to_mont(d)));
    U256 zrd = fn.add_mod(fn.reduce(z), rd);
    U256 kinv = fn.inv(fn.to_mont(k));
    U256 s = fn.from_mont(fn.mul(kinv, fn.to_mont(zrd)));
    if (s.is_zero()) continue;

    Signature sig;
    r.to_be_bytes(sig.r.data());
    s.to_be_bytes(sig.s.data());
    return sig;
  }
}

bool verify_digest(CurveId curve, const PublicKey& pub, const Digest32& digest,
                   const Signature& sig) {
  const Curve& c = curve_for(curve);
  JPoint q;
  if (!pub_to_point(c, pub, q)) return false;

  U256 r = U256::from_be_bytes(sig.r.data());
  U256 s = U256::from_be_bytes(sig.s.data());
  if (r.is_zero() || s.is_zero()) return false;
  if (geq(r, c.fn.modulus()) || geq(s, c.fn.modulus())) return false;

  const MontCtx& fn = c.fn;
  U256 z = scalar_from_bytes_mod_n(c, digest.data());
  U256 sinv = fn.inv(fn.to_mont(s));
  U256 u1 = fn.from_mont(fn.mul(fn.to_mont(z), sinv));
  U256 u2 = fn.from_mont(fn.mul(fn.to_mont(r), sinv));

  JPoint rp = add(c, scalar_mul(c, u1, generator(c)), scalar_mul(c, u2, q));
  Affine a;
  if (!to_affine(c, rp, a)) return false;
  return c.fn.reduce(a.x) == r;
}

Result<Digest32> ecdh(CurveId curve, const SecretKey& sk, const PublicKey& peer) {
  const Curve& c = curve_for(curve);
  JPoint q;
  if (!pub_to_point(c, peer, q)) return err(Errc::invalid_peer_key, "peer point not on curve");

  U256 d = U256::from_be_bytes(sk.d.data());
  Affine shared;
  if (!to_affine(c, scalar_mul(c, d, q), shared))
    return err(Errc::invalid_peer_key, "agreement degenerated to infinity");

  Digest32 out;
  shared.x.to_be_bytes(out.data());
  return out;
}

}  // namespace fwchain::crypto

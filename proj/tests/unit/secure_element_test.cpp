#include <doctest.h>

#include <random>

#include "fwchain/kernels/sha256.hpp"
#include "fwchain/secure_element.hpp"
#include "support/ref_sha256.hpp"
#include "support/testutil.hpp"

using namespace fwchain;
using namespace fwchain::se;

TEST_CASE("key generation and signing") {
  SecureElement el(42);

  auto pub = el.generate_key(0);
  REQUIRE(pub.ok());
  CHECK(el.public_key(0).value() == pub.value());

  Digest32 digest = kernels::sha256(as_view(std::string_view("tx")));
  auto sig = el.sign(0, digest);
  REQUIRE(sig.ok());
  CHECK(crypto::verify_digest(crypto::default_curve(), pub.value(), digest, sig.value()));

  // Deterministic nonce: repeat signing gives an identical signature.
  CHECK(el.sign(0, digest).value() == sig.value());

  // Verification against another slot's key fails.
  auto pub2 = el.generate_key(1);
  REQUIRE(pub2.ok());
  CHECK(!crypto::verify_digest(crypto::default_curve(), pub2.value(), digest, sig.value()));

  // Distinct generations draw distinct entropy.
  CHECK(!(pub.value() == pub2.value()));

  // Same seed reproduces the same keys.
  SecureElement el2(42);
  CHECK(el2.generate_key(0).value() == pub.value());
}

TEST_CASE("slot errors") {
  SecureElement el(1);
  CHECK(el.generate_key(16).error().code == Errc::bad_slot);
  CHECK(el.sign(16, Digest32{}).error().code == Errc::bad_slot);
  CHECK(el.store_digest(16, Digest32{}, false).error().code == Errc::bad_slot);
  CHECK(el.sign(2, Digest32{}).error().code == Errc::wrong_slot_kind);
  CHECK(el.public_key(2).error().code == Errc::wrong_slot_kind);
}

TEST_CASE("lock permanence") {
  SecureElement el(2);
  Digest32 d = kernels::sha256(as_view(std::string_view("boot")));

  REQUIRE(el.store_digest(4, d, true).ok());
  CHECK(el.is_locked(4).value());
  CHECK(el.store_digest(4, d, false).error().code == Errc::slot_locked);
  CHECK(el.generate_key(4).error().code == Errc::slot_locked);
  CHECK(el.store_certificate(4, Bytes{1, 2}, false).error().code == Errc::slot_locked);
  CHECK(el.lock_slot(4).error().code == Errc::slot_locked);
  // Reading the stored digest is still fine; only mutation is gated.
  CHECK(el.stored_digest(4).value() == d);

  // Unlocked slots can be overwritten freely.
  REQUIRE(el.store_digest(5, d, false).ok());
  Digest32 d2 = kernels::sha256(as_view(std::string_view("boot2")));
  REQUIRE(el.store_digest(5, d2, false).ok());
  CHECK(el.stored_digest(5).value() == d2);

  // generate into a locked slot that held a key: lock first, then refuse.
  REQUIRE(el.generate_key(6).ok());
  REQUIRE(el.lock_slot(6).ok());
  CHECK(el.generate_key(6).error().code == Errc::slot_locked);
}

TEST_CASE("sha256 role matches the reference") {
  SecureElement el(3);
  CHECK(to_hex(as_view(el.sha256(ByteView{}))) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

  std::mt19937_64 rng(9);
  Bytes big = testutil::random_bytes(rng, 1024 * 1024);
  Digest32 before = el.sha256(as_view(big));
  auto want = testref::ref_sha256(big);
  CHECK(to_hex(as_view(before)) == to_hex(ByteView(want.data(), want.size())));

  big[123456] ^= 0x01;  // single bit deep inside
  CHECK(!(el.sha256(as_view(big)) == before));
}

TEST_CASE("boot sector attestation is window scoped") {
  SecureElement el(4);
  std::mt19937_64 rng(10);
  Bytes flash = testutil::random_bytes(rng, 8192);
  const std::size_t start = 2048, len = 1024;

  REQUIRE(el.store_digest(8, el.sha256(ByteView(flash.data() + start, len)), false).ok());

  auto a = el.check_boot_sector(8, as_view(flash), start, len);
  REQUIRE(a.ok());
  CHECK(a.value().matched);
  CHECK(a.value().slot == 8);

  SUBCASE("flip inside the window breaks the match") {
    flash[start + 100] ^= 0x20;
    CHECK(!el.check_boot_sector(8, as_view(flash), start, len).value().matched);
  }
  SUBCASE("flip outside the window does not affect the check") {
    flash[start + len + 5] ^= 0xff;
    flash[start - 1] ^= 0xff;
    CHECK(el.check_boot_sector(8, as_view(flash), start, len).value().matched);
  }
  SUBCASE("window must stay within flash") {
    CHECK(el.check_boot_sector(8, as_view(flash), 8192, 1).error().code == Errc::out_of_bounds);
    CHECK(el.check_boot_sector(8, as_view(flash), 8000, 1000).error().code ==
          Errc::out_of_bounds);
  }
  SUBCASE("slot without a digest cannot attest") {
    CHECK(el.check_boot_sector(9, as_view(flash), 0, 16).error().code == Errc::bad_slot);
  }
}

TEST_CASE("key agreement across two elements") {
  SecureElement a(100), b(200);
  auto pub_a = a.generate_key(0);
  auto pub_b = b.generate_key(0);
  REQUIRE(pub_a.ok());
  REQUIRE(pub_b.ok());

  auto s_ab = a.key_agree(0, pub_b.value());
  auto s_ba = b.key_agree(0, pub_a.value());
  REQUIRE(s_ab.ok());
  REQUIRE(s_ba.ok());
  CHECK(s_ab.value() == s_ba.value());

  auto pub_c = b.generate_key(1);
  auto s_ac = a.key_agree(0, pub_c.value());
  REQUIRE(s_ac.ok());
  CHECK(!(s_ac.value() == s_ab.value()));

  crypto::PublicKey off_curve = pub_b.value();
  off_curve.y[7] ^= 0x04;
  CHECK(a.key_agree(0, off_curve).error().code == Errc::invalid_peer_key);
}

TEST_CASE("certificate storage") {
  SecureElement el(5);
  Bytes cert = to_bytes(std::string_view("-----CERT-----"));
  REQUIRE(el.store_certificate(15, cert, true).ok());
  CHECK(el.certificate(15).value() == cert);
  CHECK(el.store_certificate(15, cert, false).error().code == Errc::slot_locked);
}

TEST_CASE("state serialization carries the SIMULATION ONLY banner") {
  SecureElement el(6);
  REQUIRE(el.generate_key(0).ok());
  REQUIRE(el.store_digest(8, kernels::sha256(as_view(std::string_view("img"))), true).ok());
  REQUIRE(el.store_certificate(15, Bytes{9, 9, 9}, false).ok());

  Bytes state = el.serialize();
  std::string head(state.begin(), state.begin() + 40);
  CHECK(head.find("SIMULATION ONLY") != std::string::npos);

  auto back = SecureElement::deserialize(as_view(state));
  REQUIRE(back.ok());
  CHECK(back.value() == el);
  // Restored element signs identically and keeps lock bits.
  Digest32 digest = kernels::sha256(as_view(std::string_view("x")));
  CHECK(back.value().sign(0, digest).value() == el.sign(0, digest).value());
  CHECK(back.value().is_locked(8).value());
  CHECK(back.value().store_digest(8, Digest32{}, false).error().code == Errc::slot_locked);

  Bytes no_banner(state.begin() + 4, state.end());
  CHECK(!SecureElement::deserialize(as_view(no_banner)).ok());
}

TEST_CASE("hash authenticator property: equal iff same bytes at test scale") {
  std::mt19937_64 rng(11);
  SecureElement el(7);
  for (int i = 0; i < 200; ++i) {
    Bytes a = testutil::random_bytes(rng, 1 + rng() % 64);
    Bytes b = a;
    CHECK(el.sha256(as_view(a)) == el.sha256(as_view(b)));
    b[rng() % b.size()] ^= std::uint8_t(1 + rng() % 255);
    CHECK(!(el.sha256(as_view(a)) == el.sha256(as_view(b))));
  }
}

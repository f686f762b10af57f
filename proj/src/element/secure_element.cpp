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

#include "fwchain/secure_element.hpp"

#include <cstring>

#include "fwchain/codec.hpp"
#include "fwchain/kernels/sha256.hpp"

namespace fwchain::se {

namespace {

constexpr char kStateBanner[] = "FWCHAIN-SE-STATE SIMULATION ONLY v1\n";

constexpr std::uint8_t kKindEmpty = 0;
constexpr std::uint8_t kKindPrivateKey = 1;
constexpr std::uint8_t kKindDigest = 2;
constexpr std::uint8_t kKindCertificate = 3;

}  // namespace

SecureElement::SecureElement(std::uint64_t entropy_seed) : entropy_(entropy_seed) {}

Result<const SecureElement::Slot*> SecureElement::slot_at(std::uint8_t slot) const {
  if (slot >= kSlotCount) return err(Errc::bad_slot, "slot " + std::to_string(slot));
  return &slots_[slot];
}

Result<SecureElement::Slot*> SecureElement::writable_slot(std::uint8_t slot) {
  if (slot >= kSlotCount) return err(Errc::bad_slot, "slot " + std::to_string(slot));
  if (slots_[slot].locked) return err(Errc::slot_locked, "slot " + std::to_string(slot));
  return &slots_[slot];
}

Result<crypto::PublicKey> SecureElement::generate_key(std::uint8_t slot) {
  auto s = writable_slot(slot);
  if (!s) return s.error();

  Digest32 seed{};
  for (int i = 0; i < 4; ++i) put_be64(seed.data() + i * 8, entropy_.next());
  crypto::KeyPair pair = crypto::keypair_from_seed(crypto::default_curve(), seed);
  s.value()->contents = PrivateKey{pair};
  return pair.pub;
}

Result<crypto::PublicKey> SecureElement::public_key(std::uint8_t slot) const {
  auto s = slot_at(slot);
  if (!s) return s.error();
  const auto* key = std::get_if<PrivateKey>(&s.value()->contents);
  if (!key) return err(Errc::wrong_slot_kind, "slot holds no key");
  return key->pair.pub;
}

Result<crypto::Signature> SecureElement::sign(std::uint8_t slot, const Digest32& digest) const {
  auto s = slot_at(slot);
  if (!s) return s.error();
  const auto* key = std::get_if<PrivateKey>(&s.value()->contents);
  if (!key) return err(Errc::wrong_slot_kind, "slot holds no key");
  return crypto::sign_digest(crypto::default_curve(), key->pair.secret, digest);
}

Result<Digest32> SecureElement::key_agree(std::uint8_t slot, const crypto::PublicKey& peer) const {
  auto s = slot_at(slot);
  if (!s) return s.error();
  const auto* key = std::get_if<PrivateKey>(&s.value()->contents);
  if (!key) return err(Errc::wrong_slot_kind, "slot holds no key");
  return crypto::ecdh(crypto::default_curve(), key->pair.secret, peer);
}

Digest32 SecureElement::sha256(ByteView data) const { return kernels::sha256(data); }

Result<void> SecureElement::store_digest(std::uint8_t slot, const Digest32& digest,
                                         bool then_lock) {
  auto s = writable_slot(slot);
  if (!s) return s.error();
  s.value()->contents = StoredDigest{digest};
  if (then_lock) s.value()->locked = true;
  return {};
}

Result<Digest32> SecureElement::stored_digest(std::uint8_t slot) const {
  auto s = slot_at(slot);
  if (!s) return s.error();
  const auto* d = std::get_if<StoredDigest>(&s.value()->contents);
  if (!d) return err(Errc::wrong_slot_kind, "slot holds no digest");
  return d->digest;
}

Result<void> SecureElement::store_certificate(std::uint8_t slot, Bytes certificate,
                                              bool then_lock) {
  auto s = writable_slot(slot);
  if (!s) return s.error();
  s.value()->contents = Certificate{std::move(certificate)};
  if (then_lock) s.value()->locked = true;
  return {};
}

Result<Bytes> SecureElement::certificate(std::uint8_t slot) const {
  auto s = slot_at(slot);
  if (!s) return s.error();
  const auto* c = std::get_if<Certificate>(&s.value()->contents);
  if (!c) return err(Errc::wrong_slot_kind, "slot holds no certificate");
  return c->der;
}

Result<void> SecureElement::lock_slot(std::uint8_t slot) {
  auto s = writable_slot(slot);
  if (!s) return s.error();
  s.value()->locked = true;
  return {};
}

Result<bool> SecureElement::is_locked(std::uint8_t slot) const {
  auto s = slot_at(slot);
  if (!s) return s.error();
  return s.value()->locked;
}

Result<Attestation> SecureElement::check_boot_sector(std::uint8_t slot, ByteView flash,
                                                     std::size_t start, std::size_t len) const {
  auto stored = stored_digest(slot);
  if (!stored) {
    if (stored.error().code == Errc::wrong_slot_kind)
      return err(Errc::bad_slot, "slot holds no reference digest");
    return stored.error();
  }
  if (start > flash.size() || len > flash.size() - start)
    return err(Errc::out_of_bounds, "window exceeds flash");

  Attestation a;
  a.slot = slot;
  a.data_digest = kernels::sha256(flash.subspan(start, len));
  a.matched = (a.data_digest == stored.value());
  return a;
}

bool operator==(const SecureElement& a, const SecureElement& b) {
  for (std::size_t i = 0; i < kSlotCount; ++i)
    if (!(a.slots_[i] == b.slots_[i])) return false;
  return a.entropy_.state == b.entropy_.state;
}

Bytes SecureElement::serialize() const {
  Encoder e;
  e.put_raw(as_view(std::string_view(kStateBanner)));
  e.put_u64(entropy_.state);
  for (const auto& slot : slots_) {
    e.put_u8(slot.locked ? 1 : 0);
    if (std::holds_alternative<Empty>(slot.contents)) {
      e.put_u8(kKindEmpty);
    } else if (const auto* k = std::get_if<PrivateKey>(&slot.contents)) {
      e.put_u8(kKindPrivateKey);
      e.put_bytes(ByteView(k->pair.secret.d.data(), 32));
      e.put_bytes(as_view(k->pair.pub.encoded()));
    } else if (const auto* d = std::get_if<StoredDigest>(&slot.contents)) {
      e.put_u8(kKindDigest);
      e.put_digest(d->digest);
    } else {
      e.put_u8(kKindCertificate);
      e.put_bytes(as_view(std::get<Certificate>(slot.contents).der));
    }
  }
  return e.take();
}

Result<SecureElement> SecureElement::deserialize(ByteView data) {
  constexpr std::size_t banner_len = sizeof(kStateBanner) - 1;
  if (data.size() < banner_len ||
      std::memcmp(data.data(), kStateBanner, banner_len) != 0)
    return err(Errc::parse_error, "missing SIMULATION ONLY element banner");

  Decoder d(data.subspan(banner_len));
  SecureElement se(0);
  auto state = d.u64_field();
  if (!state) return state.error();
  se.entropy_.state = state.value();

  for (std::size_t i = 0; i < kSlotCount; ++i) {
    auto locked = d.u8_field();
    if (!locked) return locked.error();
    auto kind = d.u8_field();
    if (!kind) return kind.error();
    Slot& slot = se.slots_[i];
    switch (kind.value()) {
      case kKindEmpty:
        slot.contents = Empty{};
        break;
      case kKindPrivateKey: {
        auto sk = d.bytes_field();
        if (!sk) return sk.error();
        if (sk.value().size() != 32) return err(Errc::parse_error, "bad secret length");
        auto pk = d.bytes_field();
        if (!pk) return pk.error();
        auto pub = crypto::PublicKey::from_encoded(pk.value());
        if (!pub) return pub.error();
        PrivateKey key;
        std::memcpy(key.pair.secret.d.data(), sk.value().data(), 32);
        key.pair.pub = pub.take();
        slot.contents = key;
        break;
      }
      case kKindDigest: {
        auto digest = d.digest_field();
        if (!digest) return digest.error();
        slot.contents = StoredDigest{digest.value()};
        break;
      }
      case kKindCertificate: {
        auto der = d.owned_bytes_field();
        if (!der) return der.error();
        slot.contents = Certificate{der.take()};
        break;
      }
      default:
        return err(Errc::parse_error, "unknown slot kind");
    }
    slot.locked = locked.value() != 0;
  }
  if (!d.done()) return err(Errc::parse_error, "trailing bytes after element state");
  return se;
}

}  // namespace fwchain::se

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
#include <variant>

#include "fwchain/address.hpp"
#include "fwchain/bytes.hpp"
#include "fwchain/crypto/ec.hpp"
#include "fwchain/result.hpp"

// Software model of a crypto co-processor with 16 lockable slots: key
// generation, digest signing, hashing, key agreement and boot-sector
// attestation. Private keys are never readable through the API — only
// usable via sign/agree. A locked slot rejects every mutation for the life
// of the element state.
//
// This is a behavioral model with injectable entropy, not a bus-level
// emulation of any real part.

namespace fwchain::se {

inline constexpr std::size_t kSlotCount = 16;

struct Attestation {
  std::uint8_t slot = 0;
  Digest32 data_digest{};
  bool matched = false;
};

class SecureElement {
 public:
  // Entropy is a seeded deterministic stream so tests are reproducible.
  explicit SecureElement(std::uint64_t entropy_seed = 0);

  Result<crypto::PublicKey> generate_key(std::uint8_t slot);
  Result<crypto::PublicKey> public_key(std::uint8_t slot) const;
  Result<crypto::Signature> sign(std::uint8_t slot, const Digest32& digest) const;
  Result<Digest32> key_agree(std::uint8_t slot, const crypto::PublicKey& peer) const;

  Digest32 sha256(ByteView data) const;

  Result<void> store_digest(std::uint8_t slot, const Digest32& digest, bool then_lock);
  Result<Digest32> stored_digest(std::uint8_t slot) const;

  Result<void> store_certificate(std::uint8_t slot, Bytes certificate, bool then_lock);
  Result<Bytes> certificate(std::uint8_t slot) const;

  Result<void> lock_slot(std::uint8_t slot);
  Result<bool> is_locked(std::uint8_t slot) const;

  // Hash flash[start, start+len) and compare against the digest stored in
  // the slot. The caller guarantees the slot's digest was taken over
  // exactly this window.
  Result<Attestation> check_boot_sector(std::uint8_t slot, ByteView flash, std::size_t start,
                                        std::size_t len) const;

  // State serialization. Private keys are written as-is: the file format
  // opens with a SIMULATION ONLY banner for that reason.
  Bytes serialize() const;
  static Result<SecureElement> deserialize(ByteView data);

  friend bool operator==(const SecureElement&, const SecureElement&);

 private:
  struct Empty {
    friend bool operator==(const Empty&, const Empty&) = default;
  };
  struct PrivateKey {
    crypto::KeyPair pair;
    friend bool operator==(const PrivateKey& a, const PrivateKey& b) {
      return a.pair.secret.d == b.pair.secret.d && a.pair.pub == b.pair.pub;
    }
  };
  struct StoredDigest {
    Digest32 digest{};
    friend bool operator==(const StoredDigest&, const StoredDigest&) = default;
  };
  struct Certificate {
    Bytes der;
    friend bool operator==(const Certificate&, const Certificate&) = default;
  };
  struct Slot {
    std::variant<Empty, PrivateKey, StoredDigest, Certificate> contents;
    bool locked = false;
    friend bool operator==(const Slot&, const Slot&) = default;
  };

  Result<const Slot*> slot_at(std::uint8_t slot) const;
  Result<Slot*> writable_slot(std::uint8_t slot);

  Slot slots_[kSlotCount];
  SplitMix64 entropy_;
};

}  // namespace fwchain::se

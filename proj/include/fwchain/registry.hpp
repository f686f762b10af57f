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
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fwchain/address.hpp"
#include "fwchain/bytes.hpp"
#include "fwchain/result.hpp"

// The firmware registry state machine: a multisig wallet gating record
// publication, living entirely inside ledger state. Mutations arrive as
// encoded actions carried by transactions; the ledger calls apply() once
// per transaction during block production.

namespace fwchain::registry {

// Product and model tags are short lookup keys, not prose.
inline constexpr std::size_t kMaxTagLen = 64;

// The five publish arguments: product, version, content id, firmware
// digest, compatibility tag. Exactly these are supplied at publish.
struct FirmwareRecord {
  std::string product_id;
  std::uint64_t version = 0;
  Digest32 content_id{};
  Digest32 firmware_digest{};
  std::string target_model;

  Bytes canonical() const;
  static Result<FirmwareRecord> decode(ByteView data);
  std::string to_json() const;

  friend bool operator==(const FirmwareRecord&, const FirmwareRecord&) = default;
};

Result<void> validate_record(const FirmwareRecord& r);

struct OwnerSet {
  Digest32 root_commitment{};
  std::vector<Address> owners;
  std::uint32_t threshold = 0;

  bool is_owner(const Address& a) const;
  Result<void> validate() const;
  Bytes canonical() const;
  static Result<OwnerSet> decode(ByteView data);
};

struct Proposal {
  std::uint64_t id = 0;
  Bytes action;  // encoded inner action (publish)
  std::vector<Address> confirmations;
  bool executed = false;

  bool confirmed_by(const Address& a) const;
};

// Wire actions. Publish is only ever executed through a proposal; a direct
// Publish transaction is rejected as Unauthorized.
struct DeployAction {
  OwnerSet owner_set;
};
struct ProposeAction {
  Bytes inner;
};
struct ConfirmAction {
  std::uint64_t proposal_id = 0;
};
struct PublishAction {
  FirmwareRecord record;
};

using Action = std::variant<DeployAction, ProposeAction, ConfirmAction, PublishAction>;

Bytes encode_action(const Action& a);
Result<Action> decode_action(ByteView data);

Bytes make_publish_inner(const FirmwareRecord& r);

struct ApplyOutcome {
  std::optional<std::uint64_t> proposal_id;
  std::optional<FirmwareRecord> published;
  std::string note;
};

struct RegistryState {
  bool deployed = false;
  OwnerSet owner_set;
  std::map<std::string, std::vector<FirmwareRecord>> records;
  std::map<std::uint64_t, Proposal> proposals;
  std::uint64_t next_proposal_id = 0;

  // One transaction's worth of state transition. Errors leave the caller
  // responsible for discarding the mutated copy (the ledger applies each
  // transaction to a scratch copy).
  Result<ApplyOutcome> apply(const Address& sender, ByteView action_bytes);

  Result<FirmwareRecord> get_latest(const std::string& product) const;
  Result<FirmwareRecord> get_version(const std::string& product, std::uint64_t version) const;
  Result<std::vector<FirmwareRecord>> history(const std::string& product) const;
  Result<Proposal> proposal(std::uint64_t id) const;
};

}  // namespace fwchain::registry

namespace fwchain::multisig {

struct OwnerKey {
  std::uint32_t index = 0;
  crypto::KeyPair keys;
  Address address;
};

// secret scalar seed = SHA-256(root_seed || be32(index)); same inputs, same
// address.
OwnerKey derive_owner(const Digest32& root_seed, std::uint32_t index);

registry::OwnerSet make_owner_set(const Digest32& root_seed, std::uint32_t count,
                                  std::uint32_t threshold);

}  // namespace fwchain::multisig

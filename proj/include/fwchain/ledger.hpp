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

#include <deque>
#include <filesystem>
#include <variant>
#include <vector>

#include "fwchain/address.hpp"
#include "fwchain/registry.hpp"

// Deterministic, replayable, append-only simulated chain. One writer
// serializes submissions and block production; queries run against the last
// confirmed state snapshot. No consensus, forks or gas — the registry state
// machine is executed natively during block application.

namespace fwchain::ledger {

struct ChainConfig {
  std::uint64_t block_interval = 15;       // simulated seconds
  std::uint32_t confirmations_required = 1;
};

struct Transaction {
  Address sender;
  crypto::PublicKey sender_pubkey;
  std::uint64_t nonce = 0;
  Bytes action;
  crypto::Signature signature;

  Bytes signing_payload() const;   // sender, pubkey, nonce, action
  Digest32 signing_digest() const;
  Bytes encoded() const;           // signing payload + signature
  static Result<Transaction> decode(ByteView data);
  Digest32 txid() const;
};

Transaction make_signed_transaction(const crypto::KeyPair& keys, std::uint64_t nonce,
                                    Bytes action);

struct Block {
  std::uint64_t height = 0;
  Digest32 parent_digest{};
  std::uint64_t timestamp = 0;  // simulated seconds
  std::vector<Transaction> transactions;
  Digest32 digest{};

  Bytes hashed_payload() const;  // everything except the digest field
  Digest32 compute_digest() const;
  Bytes encoded() const;
  static Result<Block> decode(ByteView data);
};

struct Receipt {
  enum class Status { pending, applied, failed };
  std::uint64_t id = 0;
  Digest32 txid{};
  Status status = Status::pending;
  std::uint64_t block_height = 0;
  std::string error;
};

struct VerifyReport {
  bool ok = true;
  std::uint64_t first_bad_height = 0;
  std::string detail;
};

// Digest and linkage re-check over any block sequence (position 0 must be
// the genesis block).
VerifyReport verify_blocks(const std::vector<Block>& blocks);

// Read-only registry calls, servable without keys or signatures.
struct GetLatest {
  std::string product;
};
struct GetVersion {
  std::string product;
  std::uint64_t version = 0;
};
struct History {
  std::string product;
};
struct GetProposal {
  std::uint64_t id = 0;
};
struct GetOwnerSet {};

using Query = std::variant<GetLatest, GetVersion, History, GetProposal, GetOwnerSet>;
using QueryResult = std::variant<registry::FirmwareRecord, std::vector<registry::FirmwareRecord>,
                                 registry::Proposal, registry::OwnerSet>;

Bytes encode_query(const Query& q);
Result<Query> decode_query(ByteView data);  // unknown tag -> UnknownCall

class Ledger {
 public:
  explicit Ledger(ChainConfig cfg = {});

  const ChainConfig& config() const { return cfg_; }

  Result<std::uint64_t> submit(Transaction tx);  // returns pending receipt id
  Result<Block> advance_block(std::uint64_t now);
  Result<QueryResult> query(const Query& q) const;
  VerifyReport verify_chain() const { return verify_blocks(blocks_); }

  const std::vector<Block>& blocks() const { return blocks_; }
  std::uint64_t height() const { return blocks_.back().height; }
  std::uint64_t last_timestamp() const { return blocks_.back().timestamp; }
  std::size_t pending_count() const { return pending_.size(); }
  std::uint64_t next_nonce(const Address& sender) const;
  const Receipt* receipt(std::uint64_t id) const;

  // Confirmed state snapshot (depth >= confirmations_required) and the tip.
  const registry::RegistryState& confirmed_state() const;
  const registry::RegistryState& tip_state() const { return state_; }

  // Rebuild from an append-only block log; every block is re-verified and
  // re-applied.
  static Result<Ledger> replay(const std::vector<Block>& blocks, ChainConfig cfg);

 private:
  Result<void> apply_block(const Block& b, std::vector<Receipt*> receipts);

  ChainConfig cfg_;
  std::vector<Block> blocks_;
  std::vector<Transaction> pending_;
  std::vector<std::uint64_t> pending_receipts_;
  std::vector<Receipt> receipts_;
  std::map<Address, std::uint64_t> next_nonce_;
  registry::RegistryState state_;
  std::deque<registry::RegistryState> recent_states_;  // last confirmations_required post-block states
};

// Append-only chain persistence: length-framed canonical block encodings.
Result<void> append_block_to_log(const std::filesystem::path& file, const Block& b);
Result<std::vector<Block>> read_block_log(const std::filesystem::path& file);

}  // namespace fwchain::ledger

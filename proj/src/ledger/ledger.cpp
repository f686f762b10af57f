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

#include "fwchain/ledger.hpp"

#include <fstream>

#include "fwchain/codec.hpp"
#include "fwchain/kernels/sha256.hpp"

namespace fwchain::ledger {

namespace {

constexpr std::uint8_t kQueryLatest = 0x01;
constexpr std::uint8_t kQueryVersion = 0x02;
constexpr std::uint8_t kQueryHistory = 0x03;
constexpr std::uint8_t kQueryProposal = 0x04;
constexpr std::uint8_t kQueryOwnerSet = 0x05;

}  // namespace

Bytes Transaction::signing_payload() const {
  Encoder e;
  e.put_bytes(sender.view())
      .put_bytes(as_view(sender_pubkey.encoded()))
      .put_u64(nonce)
      .put_bytes(as_view(action));
  return e.take();
}

Digest32 Transaction::signing_digest() const {
  return kernels::sha256(as_view(signing_payload()));
}

Bytes Transaction::encoded() const {
  Encoder e;
  e.put_raw(as_view(signing_payload())).put_bytes(as_view(signature.encoded()));
  return e.take();
}

Result<Transaction> Transaction::decode(ByteView data) {
  Decoder d(data);
  Transaction tx;

  auto sender = d.bytes_field();
  if (!sender) return sender.error();
  if (sender.value().size() != 20) return err(Errc::parse_error, "sender not 20 bytes");
  std::copy(sender.value().begin(), sender.value().end(), tx.sender.bytes.begin());

  auto pk = d.bytes_field();
  if (!pk) return pk.error();
  auto pub = crypto::PublicKey::from_encoded(pk.value());
  if (!pub) return pub.error();
  tx.sender_pubkey = pub.take();

  auto nonce = d.u64_field();
  if (!nonce) return nonce.error();
  tx.nonce = nonce.value();

  auto action = d.owned_bytes_field();
  if (!action) return action.error();
  tx.action = action.take();

  auto sig = d.bytes_field();
  if (!sig) return sig.error();
  auto s = crypto::Signature::from_encoded(sig.value());
  if (!s) return s.error();
  tx.signature = s.take();

  if (!d.done()) return err(Errc::parse_error, "trailing bytes after transaction");
  return tx;
}

Digest32 Transaction::txid() const { return kernels::sha256(as_view(encoded())); }

Transaction make_signed_transaction(const crypto::KeyPair& keys, std::uint64_t nonce,
                                    Bytes action) {
  Transaction tx;
  tx.sender = Address::from_public_key(keys.pub);
  tx.sender_pubkey = keys.pub;
  tx.nonce = nonce;
  tx.action = std::move(action);
  tx.signature = crypto::sign_digest(crypto::default_curve(), keys.secret, tx.signing_digest());
  return tx;
}

Bytes Block::hashed_payload() const {
  Encoder e;
  e.put_u64(height).put_digest(parent_digest).put_u64(timestamp);
  e.put_u32(static_cast<std::uint32_t>(transactions.size()));
  for (const auto& tx : transactions) e.put_bytes(as_view(tx.encoded()));
  return e.take();
}

Digest32 Block::compute_digest() const { return kernels::sha256(as_view(hashed_payload())); }

Bytes Block::encoded() const {
  Encoder e;
  e.put_raw(as_view(hashed_payload())).put_digest(digest);
  return e.take();
}

Result<Block> Block::decode(ByteView data) {
  Decoder d(data);
  Block b;
  auto height = d.u64_field();
  if (!height) return height.error();
  b.height = height.value();
  auto parent = d.digest_field();
  if (!parent) return parent.error();
  b.parent_digest = parent.value();
  auto ts = d.u64_field();
  if (!ts) return ts.error();
  b.timestamp = ts.value();
  auto count = d.u32_field();
  if (!count) return count.error();
  for (std::uint32_t i = 0; i < count.value(); ++i) {
    auto txb = d.bytes_field();
    if (!txb) return txb.error();
    auto tx = Transaction::decode(txb.value());
    if (!tx) return tx.error();
    b.transactions.push_back(tx.take());
  }
  auto digest = d.digest_field();
  if (!digest) return digest.error();
  b.digest = digest.value();
  if (!d.done()) return err(Errc::parse_error, "trailing bytes after block");
  return b;
}

VerifyReport verify_blocks(const std::vector<Block>& blocks) {
  for (std::size_t h = 0; h < blocks.size(); ++h) {
    const Block& b = blocks[h];
    if (b.height != h)
      return {false, h, "height field does not match chain position"};
    if (!(b.compute_digest() == b.digest))
      return {false, h, "digest does not recompute from contents"};
    if (h == 0) {
      if (!is_zero(b.parent_digest)) return {false, h, "genesis parent not zero"};
    } else if (!(b.parent_digest == blocks[h - 1].digest)) {
      return {false, h, "parent linkage broken"};
    }
  }
  return {};
}

Bytes encode_query(const Query& q) {
  Encoder e;
  if (const auto* g = std::get_if<GetLatest>(&q)) {
    e.put_u8(kQueryLatest).put_string(g->product);
  } else if (const auto* v = std::get_if<GetVersion>(&q)) {
    e.put_u8(kQueryVersion).put_string(v->product).put_u64(v->version);
  } else if (const auto* hist = std::get_if<History>(&q)) {
    e.put_u8(kQueryHistory).put_string(hist->product);
  } else if (const auto* p = std::get_if<GetProposal>(&q)) {
    e.put_u8(kQueryProposal).put_u64(p->id);
  } else {
    e.put_u8(kQueryOwnerSet);
  }
  return e.take();
}

Result<Query> decode_query(ByteView data) {
  Decoder d(data);
  auto tag = d.u8_field();
  if (!tag) return err(Errc::unknown_call, "query tag unreadable");
  switch (tag.value()) {
    case kQueryLatest: {
      auto p = d.string_field();
      if (!p) return p.error();
      return Query(GetLatest{p.take()});
    }
    case kQueryVersion: {
      auto p = d.string_field();
      if (!p) return p.error();
      auto v = d.u64_field();
      if (!v) return v.error();
      return Query(GetVersion{p.take(), v.value()});
    }
    case kQueryHistory: {
      auto p = d.string_field();
      if (!p) return p.error();
      return Query(History{p.take()});
    }
    case kQueryProposal: {
      auto id = d.u64_field();
      if (!id) return id.error();
      return Query(GetProposal{id.value()});
    }
    case kQueryOwnerSet:
      return Query(GetOwnerSet{});
    default:
      return err(Errc::unknown_call, "unknown query tag");
  }
}

Ledger::Ledger(ChainConfig cfg) : cfg_(cfg) {
  if (cfg_.block_interval == 0) cfg_.block_interval = 1;
  if (cfg_.confirmations_required == 0) cfg_.confirmations_required = 1;

  Block genesis;
  genesis.height = 0;
  genesis.timestamp = 0;
  genesis.digest = genesis.compute_digest();
  blocks_.push_back(std::move(genesis));
  recent_states_.push_back(state_);
}

Result<std::uint64_t> Ledger::submit(Transaction tx) {
  if (!(Address::from_public_key(tx.sender_pubkey) == tx.sender))
    return err(Errc::bad_signature, "sender address does not match public key");
  if (!crypto::verify_digest(crypto::default_curve(), tx.sender_pubkey, tx.signing_digest(),
                             tx.signature))
    return err(Errc::bad_signature, "signature does not verify");

  std::uint64_t expected = 0;
  if (auto it = next_nonce_.find(tx.sender); it != next_nonce_.end()) expected = it->second;
  if (tx.nonce != expected)
    return err(Errc::bad_nonce, "expected nonce " + std::to_string(expected) + ", got " +
                                    std::to_string(tx.nonce));

  next_nonce_[tx.sender] = expected + 1;

  Receipt r;
  r.id = receipts_.size();
  r.txid = tx.txid();
  r.status = Receipt::Status::pending;
  receipts_.push_back(r);
  pending_receipts_.push_back(r.id);
  pending_.push_back(std::move(tx));
  return r.id;
}

Result<Block> Ledger::advance_block(std::uint64_t now) {
  if (now < last_timestamp() + cfg_.block_interval)
    return err(Errc::too_early,
               "next block not before t=" + std::to_string(last_timestamp() + cfg_.block_interval));

  Block b;
  b.height = blocks_.back().height + 1;
  b.parent_digest = blocks_.back().digest;
  b.timestamp = now;
  b.transactions = std::move(pending_);
  pending_.clear();
  b.digest = b.compute_digest();

  std::vector<Receipt*> rs;
  for (auto id : pending_receipts_) rs.push_back(&receipts_[id]);
  pending_receipts_.clear();

  auto applied = apply_block(b, rs);
  if (!applied) return applied.error();
  blocks_.push_back(b);
  return b;
}

Result<void> Ledger::apply_block(const Block& b, std::vector<Receipt*> receipts) {
  for (std::size_t i = 0; i < b.transactions.size(); ++i) {
    const Transaction& tx = b.transactions[i];
    // Atomic per transaction: mutate a scratch copy, commit only on success.
    registry::RegistryState scratch = state_;
    auto outcome = scratch.apply(tx.sender, as_view(tx.action));
    Receipt* r = i < receipts.size() ? receipts[i] : nullptr;
    if (outcome) {
      state_ = std::move(scratch);
      if (r) {
        r->status = Receipt::Status::applied;
        r->block_height = b.height;
        r->error.clear();
      }
    } else if (r) {
      r->status = Receipt::Status::failed;
      r->block_height = b.height;
      r->error = std::string(errc_name(outcome.error().code)) + ": " + outcome.error().message;
    }
  }
  recent_states_.push_back(state_);
  while (recent_states_.size() > cfg_.confirmations_required) recent_states_.pop_front();
  return {};
}

Result<QueryResult> Ledger::query(const Query& q) const {
  const registry::RegistryState& st = confirmed_state();
  if (const auto* g = std::get_if<GetLatest>(&q)) {
    auto r = st.get_latest(g->product);
    if (!r) return r.error();
    return QueryResult(r.take());
  }
  if (const auto* v = std::get_if<GetVersion>(&q)) {
    auto r = st.get_version(v->product, v->version);
    if (!r) return r.error();
    return QueryResult(r.take());
  }
  if (const auto* h = std::get_if<History>(&q)) {
    auto r = st.history(h->product);
    if (!r) return r.error();
    return QueryResult(r.take());
  }
  if (const auto* p = std::get_if<GetProposal>(&q)) {
    auto r = st.proposal(p->id);
    if (!r) return r.error();
    return QueryResult(r.take());
  }
  if (!st.deployed) return err(Errc::not_deployed, "no owner set deployed");
  return QueryResult(st.owner_set);
}

std::uint64_t Ledger::next_nonce(const Address& sender) const {
  auto it = next_nonce_.find(sender);
  return it == next_nonce_.end() ? 0 : it->second;
}

const Receipt* Ledger::receipt(std::uint64_t id) const {
  return id < receipts_.size() ? &receipts_[id] : nullptr;
}

const registry::RegistryState& Ledger::confirmed_state() const {
  // recent_states_ holds the post-states of the newest blocks; the front is
  // the newest one with depth >= confirmations_required.
  return recent_states_.front();
}

Result<Ledger> Ledger::replay(const std::vector<Block>& blocks, ChainConfig cfg) {
  auto report = verify_blocks(blocks);
  if (!report.ok)
    return err(Errc::chain_corrupt,
               "block " + std::to_string(report.first_bad_height) + ": " + report.detail);
  if (blocks.empty()) return err(Errc::chain_corrupt, "missing genesis block");

  Ledger led(cfg);
  if (!(blocks[0].digest == led.blocks_[0].digest))
    return err(Errc::chain_corrupt, "genesis block mismatch");

  for (std::size_t h = 1; h < blocks.size(); ++h) {
    const Block& b = blocks[h];
    for (const auto& tx : b.transactions) {
      auto id = led.submit(tx);
      if (!id)
        return err(Errc::chain_corrupt, "block " + std::to_string(h) + " replay: " +
                                            id.error().message);
    }
    auto adv = led.advance_block(b.timestamp);
    if (!adv) return err(Errc::chain_corrupt, adv.error().message);
    if (!(adv.value().digest == b.digest))
      return err(Errc::chain_corrupt,
                 "replayed digest differs at height " + std::to_string(h));
  }
  return led;
}

Result<void> append_block_to_log(const std::filesystem::path& file, const Block& b) {
  std::ofstream out(file, std::ios::binary | std::ios::app);
  if (!out) return err(Errc::io_failure, "cannot open " + file.string());
  Bytes body = b.encoded();
  std::uint8_t len[4];
  put_be32(len, static_cast<std::uint32_t>(body.size()));
  out.write(reinterpret_cast<const char*>(len), 4);
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) return err(Errc::io_failure, "short write to " + file.string());
  return {};
}

Result<std::vector<Block>> read_block_log(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return err(Errc::io_failure, "cannot open " + file.string());
  std::vector<Block> blocks;
  for (;;) {
    std::uint8_t len[4];
    in.read(reinterpret_cast<char*>(len), 4);
    if (in.gcount() == 0) break;
    if (in.gcount() != 4) return err(Errc::chain_corrupt, "truncated frame length");
    std::uint32_t n = get_be32(len);
    Bytes body(n);
    in.read(reinterpret_cast<char*>(body.data()), n);
    if (in.gcount() != static_cast<std::streamsize>(n))
      return err(Errc::chain_corrupt, "truncated block frame");
    auto b = Block::decode(as_view(body));
    if (!b) return err(Errc::chain_corrupt, b.error().message);
    blocks.push_back(b.take());
  }
  return blocks;
}

}  // namespace fwchain::ledger

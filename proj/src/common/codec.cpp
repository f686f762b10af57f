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

#include "fwchain/codec.hpp"

#include <cstring>

namespace fwchain {

Encoder& Encoder::put_bytes(ByteView v) {
  std::uint8_t len[4];
  put_be32(len, static_cast<std::uint32_t>(v.size()));
  out_.insert(out_.end(), len, len + 4);
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

Encoder& Encoder::put_u8(std::uint8_t v) { return put_bytes(ByteView(&v, 1)); }

Encoder& Encoder::put_u32(std::uint32_t v) {
  std::uint8_t buf[4];
  put_be32(buf, v);
  return put_bytes(ByteView(buf, 4));
}

Encoder& Encoder::put_u64(std::uint64_t v) {
  std::uint8_t buf[8];
  put_be64(buf, v);
  return put_bytes(ByteView(buf, 8));
}

Encoder& Encoder::put_raw(ByteView v) {
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

Result<ByteView> Decoder::bytes_field() {
  if (data_.size() - pos_ < 4) return err(Errc::parse_error, "truncated field length");
  std::uint32_t len = get_be32(data_.data() + pos_);
  if (data_.size() - pos_ - 4 < len) return err(Errc::parse_error, "truncated field body");
  ByteView v = data_.subspan(pos_ + 4, len);
  pos_ += 4 + len;
  return v;
}

Result<Bytes> Decoder::owned_bytes_field() {
  auto v = bytes_field();
  if (!v) return v.error();
  return to_bytes(v.value());
}

Result<std::string> Decoder::string_field() {
  auto v = bytes_field();
  if (!v) return v.error();
  return std::string(v.value().begin(), v.value().end());
}

Result<Digest32> Decoder::digest_field() {
  auto v = bytes_field();
  if (!v) return v.error();
  if (v.value().size() != 32) return err(Errc::parse_error, "digest field not 32 bytes");
  Digest32 d;
  std::memcpy(d.data(), v.value().data(), 32);
  return d;
}

Result<std::uint8_t> Decoder::u8_field() {
  auto v = bytes_field();
  if (!v) return v.error();
  if (v.value().size() != 1) return err(Errc::parse_error, "u8 field not 1 byte");
  return v.value()[0];
}

Result<std::uint32_t> Decoder::u32_field() {
  auto v = bytes_field();
  if (!v) return v.error();
  if (v.value().size() != 4) return err(Errc::parse_error, "u32 field not 4 bytes");
  return get_be32(v.value().data());
}

Result<std::uint64_t> Decoder::u64_field() {
  auto v = bytes_field();
  if (!v) return v.error();
  if (v.value().size() != 8) return err(Errc::parse_error, "u64 field not 8 bytes");
  return get_be64(v.value().data());
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ok: return "ok";
    case Errc::bad_signature: return "BadSignature";
    case Errc::bad_nonce: return "BadNonce";
    case Errc::too_early: return "TooEarly";
    case Errc::unknown_call: return "UnknownCall";
    case Errc::chain_corrupt: return "ChainCorrupt";
    case Errc::not_owner: return "NotOwner";
    case Errc::unknown_proposal: return "UnknownProposal";
    case Errc::already_executed: return "AlreadyExecuted";
    case Errc::already_deployed: return "AlreadyDeployed";
    case Errc::not_deployed: return "NotDeployed";
    case Errc::version_not_monotonic: return "VersionNotMonotonic";
    case Errc::unauthorized: return "Unauthorized";
    case Errc::malformed_record: return "MalformedRecord";
    case Errc::not_found: return "NotFound";
    case Errc::tampered: return "Tampered";
    case Errc::bad_slot: return "BadSlot";
    case Errc::slot_locked: return "SlotLocked";
    case Errc::wrong_slot_kind: return "WrongSlotKind";
    case Errc::out_of_bounds: return "OutOfBounds";
    case Errc::invalid_peer_key: return "InvalidPeerKey";
    case Errc::registry_unavailable: return "RegistryUnavailable";
    case Errc::incompatible_model: return "IncompatibleModel";
    case Errc::download_failed: return "DownloadFailed";
    case Errc::digest_mismatch: return "DigestMismatch";
    case Errc::insufficient_space: return "InsufficientSpace";
    case Errc::write_failure: return "WriteFailure";
    case Errc::invalid_plan: return "InvalidPlan";
    case Errc::no_response: return "NoResponse";
    case Errc::nack: return "Nack";
    case Errc::id_mismatch: return "IdMismatch";
    case Errc::write_protected: return "WriteProtected";
    case Errc::bad_checksum: return "BadChecksum";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::io_failure: return "IoFailure";
    case Errc::parse_error: return "ParseError";
    case Errc::usage: return "Usage";
  }
  return "unknown";
}

}  // namespace fwchain

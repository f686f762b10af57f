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
#include <string>

#include "fwchain/bytes.hpp"
#include "fwchain/result.hpp"

namespace fwchain {

// Canonical field framing used for everything that gets hashed, signed or
// persisted: fields in declared order, each prefixed by a 4-byte big-endian
// length; integers big-endian fixed width. The same byte stream must be
// reproducible from any implementation, so there is exactly one way to
// encode a value.
class Encoder {
 public:
  Encoder& put_bytes(ByteView v);
  Encoder& put_string(std::string_view s) { return put_bytes(as_view(s)); }
  Encoder& put_digest(const Digest32& d) { return put_bytes(as_view(d)); }
  Encoder& put_u8(std::uint8_t v);
  Encoder& put_u32(std::uint32_t v);
  Encoder& put_u64(std::uint64_t v);

  // Unframed append, for containers that carry their own framing.
  Encoder& put_raw(ByteView v);

  const Bytes& bytes() const { return out_; }
  ByteView view() const { return as_view(out_); }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Decoder {
 public:
  explicit Decoder(ByteView data) : data_(data) {}

  Result<ByteView> bytes_field();
  Result<Bytes> owned_bytes_field();
  Result<std::string> string_field();
  Result<Digest32> digest_field();
  Result<std::uint8_t> u8_field();
  Result<std::uint32_t> u32_field();
  Result<std::uint64_t> u64_field();

  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace fwchain

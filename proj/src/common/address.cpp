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

#include "fwchain/address.hpp"

#include <algorithm>

#include "fwchain/kernels/sha256.hpp"

namespace fwchain {

Address Address::from_public_key(const crypto::PublicKey& pub) {
  Digest32 d = kernels::sha256(as_view(pub.encoded()));
  Address a;
  std::copy(d.begin() + 12, d.end(), a.bytes.begin());
  return a;
}

Result<Address> Address::from_hex_string(std::string_view hex) {
  auto b = from_hex(hex);
  if (!b || b->size() != 20) return err(Errc::parse_error, "address must be 20 hex bytes");
  Address a;
  std::copy(b->begin(), b->end(), a.bytes.begin());
  return a;
}

}  // namespace fwchain

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

#include <cassert>
#include <string>
#include <utility>
#include <variant>

namespace fwchain {

// One error vocabulary across all modules so the CLI can map families to
// stable exit codes.
enum class Errc {
  ok = 0,

  // ledger
  bad_signature,
  bad_nonce,
  too_early,
  unknown_call,
  chain_corrupt,

  // multisig
  not_owner,
  unknown_proposal,
  already_executed,
  already_deployed,
  not_deployed,

  // registry
  version_not_monotonic,
  unauthorized,
  malformed_record,
  not_found,

  // content store
  tampered,

  // secure element
  bad_slot,
  slot_locked,
  wrong_slot_kind,
  out_of_bounds,
  invalid_peer_key,

  // device agent
  registry_unavailable,
  incompatible_model,
  download_failed,
  digest_mismatch,
  insufficient_space,
  write_failure,
  invalid_plan,

  // bootloader link
  no_response,
  nack,
  id_mismatch,
  write_protected,
  bad_checksum,
  out_of_range,

  // plumbing
  io_failure,
  parse_error,
  usage,
};

const char* errc_name(Errc c);

struct Error {
  Errc code = Errc::ok;
  std::string message;

  Error() = default;
  Error(Errc c, std::string msg) : code(c), message(std::move(msg)) {}
};

inline Error err(Errc c, std::string msg = {}) { return Error(c, std::move(msg)); }

// Minimal expected-style carrier. Callers branch on ok(); value()/error()
// assert the corresponding state.
template <typename T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error e) : v_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() {
    assert(ok());
    return std::get<T>(v_);
  }
  const T& value() const {
    assert(ok());
    return std::get<T>(v_);
  }
  T take() {
    assert(ok());
    return std::move(std::get<T>(v_));
  }

  const Error& error() const {
    assert(!ok());
    return std::get<Error>(v_);
  }
  Errc code() const { return ok() ? Errc::ok : error().code; }

 private:
  std::variant<T, Error> v_;
};

template <>
class Result<void> {
 public:
  Result() = default;
  Result(Error e) : err_(std::move(e)), failed_(true) {}

  bool ok() const { return !failed_; }
  explicit operator bool() const { return ok(); }

  const Error& error() const {
    assert(failed_);
    return err_;
  }
  Errc code() const { return failed_ ? err_.code : Errc::ok; }

 private:
  Error err_;
  bool failed_ = false;
};

}  // namespace fwchain

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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fwchain/bytes.hpp"
#include "fwchain/result.hpp"

// Host-side flasher and simulated target speaking the UART bootloader
// convention: an 0x7F wake byte, commands sent with their bitwise
// complement, single-byte ACK/NACK replies, and XOR checksums over address
// and data frames. The wire format is bit-exact so both ends interoperate
// with anything else speaking it.
//
// Frame layout on the wire:
//   init:    7F                                   -> ACK
//   get id:  02 FD                                -> ACK, N-1, code hi, code lo, ACK
//   write:   31 CE                                -> ACK
//            a3 a2 a1 a0 cks(addr)                -> ACK
//            (N-1) data[N] cks(len byte ^ data)   -> ACK
// Any complement or checksum violation is NACKed and the frame discarded.

namespace fwchain::bootldr {

inline constexpr std::uint8_t kAck = 0x79;
inline constexpr std::uint8_t kNack = 0x1f;
inline constexpr std::uint8_t kInit = 0x7f;
inline constexpr std::uint8_t kCmdGetId = 0x02;
inline constexpr std::uint8_t kCmdWriteMemory = 0x31;
inline constexpr std::uint32_t kDefaultFlashBase = 0x08000000;
inline constexpr std::size_t kMaxDataPerFrame = 256;

// Blocking duplex byte stream with per-read timeout. The simulated target
// and a real serial port are interchangeable behind it.
class Link {
 public:
  virtual ~Link() = default;
  virtual void write(ByteView data) = 0;
  virtual int read_byte(int timeout_ms) = 0;  // -1 on timeout
};

struct TargetProfile {
  std::uint16_t product_code = 0x0410;
  std::uint32_t flash_base = kDefaultFlashBase;
  std::size_t flash_size = 64 * 1024;
  bool write_protected = false;
};

// Incremental target state machine: consume host bytes, emit replies.
class SimTarget {
 public:
  explicit SimTarget(TargetProfile profile);

  void feed(ByteView in, Bytes& out);

  const TargetProfile& profile() const { return profile_; }
  ByteView flash() const { return as_view(flash_); }
  bool ready() const { return phase_ != Phase::wait_init; }
  std::size_t nack_count() const { return nacks_; }

 private:
  enum class Phase { wait_init, idle, await_complement, write_addr, write_len, write_data };

  void feed_byte(std::uint8_t b, Bytes& out);
  void nack(Bytes& out);

  TargetProfile profile_;
  Bytes flash_;
  Phase phase_ = Phase::wait_init;
  std::uint8_t pending_cmd_ = 0;
  Bytes buf_;
  std::size_t expect_ = 0;
  std::uint32_t write_addr_ = 0;
  std::size_t nacks_ = 0;
};

// Host end wired straight into a SimTarget: writes feed the target, target
// replies queue up for reads.
class SimLink : public Link {
 public:
  explicit SimLink(SimTarget& target) : target_(target) {}

  void write(ByteView data) override;
  int read_byte(int timeout_ms) override;

 private:
  SimTarget& target_;
  std::deque<std::uint8_t> rx_;
};

// Records every host write as one frame, for golden-trace fixtures.
class TracingLink : public Link {
 public:
  explicit TracingLink(Link& inner) : inner_(inner) {}

  void write(ByteView data) override;
  int read_byte(int timeout_ms) override { return inner_.read_byte(timeout_ms); }

  const std::vector<Bytes>& frames() const { return frames_; }

 private:
  Link& inner_;
  std::vector<Bytes> frames_;
};

// XORs one byte of the n-th host write, the line-noise model for
// fault-injection tests.
class CorruptingLink : public Link {
 public:
  CorruptingLink(Link& inner, std::size_t frame_index, std::size_t byte_index,
                 std::uint8_t xor_mask)
      : inner_(inner), frame_index_(frame_index), byte_index_(byte_index), mask_(xor_mask) {}

  void write(ByteView data) override;
  int read_byte(int timeout_ms) override { return inner_.read_byte(timeout_ms); }

 private:
  Link& inner_;
  std::size_t frame_index_;
  std::size_t byte_index_;
  std::uint8_t mask_;
  std::size_t seen_ = 0;
};

// Raw-mode serial port behind the Link interface, for flashing physical
// targets. Construction fails (io_failure) when the port cannot be opened.
class SerialLink : public Link {
 public:
  static Result<std::unique_ptr<SerialLink>> open(const std::string& port, int baud = 115200);
  ~SerialLink() override;

  void write(ByteView data) override;
  int read_byte(int timeout_ms) override;

 private:
  explicit SerialLink(int fd) : fd_(fd) {}
  int fd_;
};

struct FlashReport {
  std::size_t frames_total = 0;
  std::size_t frames_applied = 0;
  int failed_frame = -1;  // -1 = none
  std::string failure;
  bool digest_ok = false;
  Digest32 image_digest{};
  Digest32 readback_digest{};
};

class Flasher {
 public:
  explicit Flasher(Link& link, int timeout_ms = 1000) : link_(link), timeout_ms_(timeout_ms) {}

  Result<void> probe();
  Result<std::uint16_t> get_id();
  Result<void> write_range(std::uint32_t address, ByteView data);

  // probe + provenance gate + framed writes + readback digest comparison.
  // dump_fn(address, len) returns target flash for the final check; the
  // simulated target provides it directly (a read command is out of scope).
  Result<FlashReport> flash_firmware(ByteView image, std::uint32_t base,
                                     std::optional<std::uint16_t> expected_id,
                                     std::function<Bytes(std::uint32_t, std::size_t)> dump_fn);

 private:
  Result<void> read_ack(Errc on_nack, const char* stage);

  Link& link_;
  int timeout_ms_;
};

}  // namespace fwchain::bootldr

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

#include "fwchain/bootloader.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

#include "fwchain/kernels/sha256.hpp"
#include "fwchain/kernels/xor_fold.hpp"

namespace fwchain::bootldr {

SimTarget::SimTarget(TargetProfile profile)
    : profile_(profile), flash_(profile.flash_size, 0xff) {}

void SimTarget::nack(Bytes& out) {
  out.push_back(kNack);
  ++nacks_;
  phase_ = Phase::idle;
  buf_.clear();
}

void SimTarget::feed(ByteView in, Bytes& out) {
  for (auto b : in) feed_byte(b, out);
}

void SimTarget::feed_byte(std::uint8_t b, Bytes& out) {
  switch (phase_) {
    case Phase::wait_init:
      // Sensing for the wake byte; anything else is ignored without reply.
      if (b == kInit) {
        out.push_back(kAck);
        phase_ = Phase::idle;
      }
      return;

    case Phase::idle:
      if (b == kInit) {
        // Re-init after the session is up is rejected.
        nack(out);
        return;
      }
      pending_cmd_ = b;
      phase_ = Phase::await_complement;
      return;

    case Phase::await_complement: {
      if (std::uint8_t(pending_cmd_ ^ b) != 0xff) {
        nack(out);
        return;
      }
      switch (pending_cmd_) {
        case kCmdGetId:
          out.push_back(kAck);
          out.push_back(0x01);  // byte count - 1
          out.push_back(std::uint8_t(profile_.product_code >> 8));
          out.push_back(std::uint8_t(profile_.product_code));
          out.push_back(kAck);
          phase_ = Phase::idle;
          return;
        case kCmdWriteMemory:
          if (profile_.write_protected) {
            nack(out);
            return;
          }
          out.push_back(kAck);
          phase_ = Phase::write_addr;
          buf_.clear();
          expect_ = 5;  // 4 address bytes + checksum
          return;
        default:
          nack(out);  // command not implemented
          return;
      }
    }

    case Phase::write_addr: {
      buf_.push_back(b);
      if (buf_.size() < expect_) return;
      std::uint8_t cks = kernels::xor_fold(ByteView(buf_.data(), 4));
      if (cks != buf_[4]) {
        nack(out);
        return;
      }
      std::uint32_t addr = get_be32(buf_.data());
      if (addr < profile_.flash_base || addr >= profile_.flash_base + flash_.size()) {
        nack(out);
        return;
      }
      write_addr_ = addr;
      out.push_back(kAck);
      phase_ = Phase::write_len;
      buf_.clear();
      return;
    }

    case Phase::write_len:
      buf_.push_back(b);
      expect_ = std::size_t(b) + 1 + 2;  // len byte + N data bytes + checksum
      phase_ = Phase::write_data;
      return;

    case Phase::write_data: {
      buf_.push_back(b);
      if (buf_.size() < expect_) return;
      // buf_ = [len byte, data..., checksum]; checksum covers len + data.
      std::uint8_t cks = kernels::xor_fold(ByteView(buf_.data(), buf_.size() - 1));
      if (cks != buf_.back()) {
        nack(out);
        return;
      }
      std::size_t n = buf_.size() - 2;
      std::size_t off = write_addr_ - profile_.flash_base;
      if (off + n > flash_.size()) {
        nack(out);
        return;
      }
      std::memcpy(flash_.data() + off, buf_.data() + 1, n);
      out.push_back(kAck);
      phase_ = Phase::idle;
      buf_.clear();
      return;
    }
  }
}

void SimLink::write(ByteView data) {
  Bytes replies;
  target_.feed(data, replies);
  rx_.insert(rx_.end(), replies.begin(), replies.end());
}

int SimLink::read_byte(int) {
  if (rx_.empty()) return -1;
  int b = rx_.front();
  rx_.pop_front();
  return b;
}

void TracingLink::write(ByteView data) {
  frames_.emplace_back(data.begin(), data.end());
  inner_.write(data);
}

void CorruptingLink::write(ByteView data) {
  if (seen_++ == frame_index_ && byte_index_ < data.size()) {
    Bytes mutated(data.begin(), data.end());
    mutated[byte_index_] ^= mask_;
    inner_.write(as_view(mutated));
    return;
  }
  inner_.write(data);
}

Result<void> Flasher::read_ack(Errc on_nack, const char* stage) {
  int b = link_.read_byte(timeout_ms_);
  if (b < 0) return err(Errc::no_response, std::string("timeout at ") + stage);
  if (b == kAck) return {};
  if (b == kNack) return err(on_nack, std::string("NACK at ") + stage);
  return err(Errc::nack, std::string("unexpected byte at ") + stage);
}

Result<void> Flasher::probe() {
  std::uint8_t init = kInit;
  link_.write(ByteView(&init, 1));
  return read_ack(Errc::nack, "init");
}

Result<std::uint16_t> Flasher::get_id() {
  std::uint8_t frame[2] = {kCmdGetId, std::uint8_t(kCmdGetId ^ 0xff)};
  link_.write(ByteView(frame, 2));
  if (auto a = read_ack(Errc::nack, "get-id command"); !a) return a.error();

  int n = link_.read_byte(timeout_ms_);
  if (n < 0) return err(Errc::no_response, "timeout reading id length");
  std::size_t count = std::size_t(n) + 1;
  Bytes id;
  for (std::size_t i = 0; i < count; ++i) {
    int b = link_.read_byte(timeout_ms_);
    if (b < 0) return err(Errc::no_response, "timeout reading id bytes");
    id.push_back(std::uint8_t(b));
  }
  if (auto a = read_ack(Errc::nack, "get-id trailer"); !a) return a.error();
  if (id.size() < 2) return err(Errc::nack, "short product code");
  return std::uint16_t((id[0] << 8) | id[1]);
}

Result<void> Flasher::write_range(std::uint32_t address, ByteView data) {
  for (std::size_t off = 0; off < data.size(); off += kMaxDataPerFrame) {
    std::size_t n = std::min(kMaxDataPerFrame, data.size() - off);

    std::uint8_t cmd[2] = {kCmdWriteMemory, std::uint8_t(kCmdWriteMemory ^ 0xff)};
    link_.write(ByteView(cmd, 2));
    if (auto a = read_ack(Errc::write_protected, "write command"); !a) return a.error();

    std::uint8_t addr[5];
    put_be32(addr, address + std::uint32_t(off));
    addr[4] = kernels::xor_fold(ByteView(addr, 4));
    link_.write(ByteView(addr, 5));
    if (auto a = read_ack(Errc::out_of_range, "write address"); !a) return a.error();

    Bytes frame;
    frame.reserve(n + 2);
    frame.push_back(std::uint8_t(n - 1));
    frame.insert(frame.end(), data.begin() + off, data.begin() + off + n);
    frame.push_back(kernels::xor_fold(as_view(frame)));
    link_.write(as_view(frame));
    if (auto a = read_ack(Errc::bad_checksum, "write data"); !a) return a.error();
  }
  return {};
}

Result<FlashReport> Flasher::flash_firmware(ByteView image, std::uint32_t base,
                                            std::optional<std::uint16_t> expected_id,
                                            std::function<Bytes(std::uint32_t, std::size_t)> dump_fn) {
  FlashReport report;
  report.frames_total = (image.size() + kMaxDataPerFrame - 1) / kMaxDataPerFrame;
  report.image_digest = kernels::sha256(image);

  if (auto p = probe(); !p) return p.error();

  auto id = get_id();
  if (!id) return id.error();
  if (expected_id && id.value() != *expected_id) {
    char code[8];
    std::snprintf(code, sizeof(code), "0x%04x", id.value());
    return err(Errc::id_mismatch, std::string("target reports product code ") + code);
  }

  for (std::size_t off = 0; off < image.size(); off += kMaxDataPerFrame) {
    std::size_t n = std::min(kMaxDataPerFrame, image.size() - off);
    auto w = write_range(base + std::uint32_t(off), image.subspan(off, n));
    if (!w) {
      report.failed_frame = int(off / kMaxDataPerFrame);
      report.failure = std::string(errc_name(w.error().code)) + ": " + w.error().message;
      return report;
    }
    report.frames_applied++;
  }

  if (dump_fn) {
    Bytes readback = dump_fn(base, image.size());
    report.readback_digest = kernels::sha256(as_view(readback));
    report.digest_ok = (report.readback_digest == report.image_digest);
  }
  return report;
}

}  // namespace fwchain::bootldr

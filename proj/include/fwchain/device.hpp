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

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fwchain/castore.hpp"
#include "fwchain/ledger.hpp"
#include "fwchain/registry.hpp"
#include "fwchain/secure_element.hpp"

// The edge-device update state machine. Two flash partitions hold firmware
// images; updates are written to the inactive one, verified in place, and
// activated by a single committed flip, so an interruption at any write
// offset (or at the flip itself) leaves the device bootable on the previous
// image. A seeded window draw gives every boot a fresh spot-check sector,
// attested by the secure element.

namespace fwchain::device {

inline constexpr std::size_t kSectorSize = 1024;  // erase granularity

// Element slot convention.
inline constexpr std::uint8_t kIdentityKeySlot = 0;
inline constexpr std::uint8_t kImageDigestSlotBase = 8;  // + partition index
inline constexpr std::uint8_t kBootWindowSlotBase = 10;  // + partition index

enum class Partition : std::uint8_t { a = 0, b = 1 };
inline Partition other(Partition p) { return p == Partition::a ? Partition::b : Partition::a; }

struct BootWindow {
  std::uint32_t start = 0;
  std::uint32_t len = 0;
};

struct PartitionMeta {
  std::uint64_t version = 0;
  bool boot_valid = false;
  Digest32 image_digest{};
  std::uint32_t image_len = 0;
  BootWindow window;
};

struct DeviceMeta {
  std::string product_id;
  std::string target_model;
  Partition active = Partition::a;
  PartitionMeta part[2];
  std::uint64_t rng_state = 0;
  std::uint64_t boot_count = 0;
};

// Addressable flash with sector erase (erased bytes read 0xFF). A stuck
// byte models a worn cell that no write can change.
class FlashImage {
 public:
  explicit FlashImage(std::size_t size) : data_(size, 0xff) {}

  std::size_t size() const { return data_.size(); }
  ByteView view() const { return as_view(data_); }
  ByteView view(std::size_t off, std::size_t len) const {
    return ByteView(data_.data() + off, len);
  }

  void erase_sector(std::size_t index);
  void write(std::size_t off, ByteView data);
  void set_stuck_byte(std::size_t off, std::uint8_t value) { stuck_ = {{off, value}}; }

 private:
  Bytes data_;
  std::optional<std::pair<std::size_t, std::uint8_t>> stuck_;
};

// Crash points the install harness can arm: a cumulative write offset
// (power loss mid-write) or the instant before the active-partition flip
// commits.
struct FaultPlan {
  std::optional<std::uint64_t> write_offset;
  bool at_flip = false;
};

struct FaultInjected {
  std::uint64_t bytes_written = 0;
};

struct UpdatePlan {
  registry::FirmwareRecord record;
  enum class Mode { full, partial } mode = Mode::full;
  std::uint32_t range_start = 0;  // partial only, relative to image start
  std::uint32_t range_end = 0;
};

struct CheckOutcome {
  std::optional<UpdatePlan> plan;
  std::string note;  // "up to date", "IncompatibleModel: ...", ...
};

// Query surface the agent polls; adapters exist for a live ledger and for
// tests.
class RegistryClient {
 public:
  virtual ~RegistryClient() = default;
  virtual Result<registry::FirmwareRecord> latest(const std::string& product) = 0;
  virtual Result<registry::FirmwareRecord> version(const std::string& product,
                                                   std::uint64_t version) = 0;
};

enum class BootDecision { booted_active, rolled_back, recovery_halt };

struct BootReport {
  BootDecision decision = BootDecision::recovery_halt;
  Partition booted = Partition::a;  // meaningful unless recovery_halt
  std::uint64_t version = 0;
};

struct InstallReport {
  std::uint64_t old_version = 0;
  std::uint64_t new_version = 0;
  Digest32 image_digest{};
  Partition new_active = Partition::a;
};

struct UpdateOutcome {
  bool updated = false;
  std::string note;
  std::optional<InstallReport> report;
};

class Device {
 public:
  // Fresh device with a factory image in partition A.
  static Device provision(std::string product_id, std::string target_model,
                          std::size_t partition_size, std::uint64_t seed, ByteView factory_image,
                          std::uint64_t factory_version);

  Result<CheckOutcome> check_for_update(RegistryClient& registry) const;
  Result<Bytes> download_and_verify(const UpdatePlan& plan, const castore::Store& store) const;
  Result<InstallReport> install_atomic(ByteView firmware, const UpdatePlan& plan);
  BootReport secure_boot();
  Result<InstallReport> rollback(std::uint64_t target_version, RegistryClient& registry,
                                 const castore::Store& store);
  Result<UpdateOutcome> run_update_cycle(RegistryClient& registry, const castore::Store& store);

  // Crash simulation: arm a fault, run install, catch FaultInjected, then
  // restart() to model power-up recovery.
  void set_fault_plan(std::optional<FaultPlan> plan) { fault_ = plan; }
  BootReport restart();

  const DeviceMeta& meta() const { return committed_; }
  std::uint64_t installed_version() const;
  ByteView partition_image(Partition p) const;
  ByteView active_image() const { return partition_image(committed_.active); }
  std::size_t partition_size() const { return flash_[0].size(); }
  const se::SecureElement& element() const { return element_; }
  crypto::PublicKey identity_key() const;

  // Hardware-level test seams.
  void corrupt_flash(Partition p, std::size_t offset, std::uint8_t xor_mask);
  void set_stuck_byte(Partition p, std::size_t offset, std::uint8_t value);

  Bytes serialize() const;
  static Result<Device> deserialize(ByteView data);
  Result<void> save(const std::filesystem::path& file) const;
  static Result<Device> load(const std::filesystem::path& file);

 private:
  Device(std::size_t partition_size, std::uint64_t seed);

  void commit() { committed_ = meta_; }
  void write_flash(Partition p, std::size_t off, ByteView data);
  BootWindow draw_window(std::uint32_t image_len);
  bool window_check(Partition p);
  void rebless(Partition p);  // redraw + store next boot window
  static std::uint8_t image_slot(Partition p) {
    return std::uint8_t(kImageDigestSlotBase + std::uint8_t(p));
  }
  static std::uint8_t window_slot(Partition p) {
    return std::uint8_t(kBootWindowSlotBase + std::uint8_t(p));
  }

  DeviceMeta meta_;       // working copy
  DeviceMeta committed_;  // survives restart()
  FlashImage flash_[2];
  se::SecureElement element_;
  std::optional<FaultPlan> fault_;
  std::uint64_t write_cursor_ = 0;
};

// Ledger-backed registry view.
class LedgerRegistryClient : public RegistryClient {
 public:
  explicit LedgerRegistryClient(const ledger::Ledger& led);
  Result<registry::FirmwareRecord> latest(const std::string& product) override;
  Result<registry::FirmwareRecord> version(const std::string& product,
                                           std::uint64_t version) override;

 private:
  const ledger::Ledger& led_;
};

// Counts queries on behalf of the fleet harness.
class CountingRegistryClient : public RegistryClient {
 public:
  explicit CountingRegistryClient(RegistryClient& inner) : inner_(inner) {}
  Result<registry::FirmwareRecord> latest(const std::string& product) override;
  Result<registry::FirmwareRecord> version(const std::string& product,
                                           std::uint64_t version) override;
  std::size_t count() const { return count_; }

 private:
  RegistryClient& inner_;
  std::atomic<std::size_t> count_{0};
};

enum class Topology { edge_cloud, gateway_cloud, edge_gateway_cloud };

Result<Topology> topology_from_name(std::string_view name);
const char* topology_name(Topology t);

struct FleetReport {
  Topology topology = Topology::edge_cloud;
  std::size_t devices = 0;
  std::size_t updated = 0;
  std::size_t up_to_date = 0;
  std::size_t failed = 0;
  std::size_t registry_queries = 0;
  std::size_t content_fetches = 0;
};

// Drive one update round across a fleet. Devices run concurrently, each
// owning its state exclusively; the topology decides who queries the
// registry and who fetches content.
FleetReport simulate_fleet(Topology topology, std::vector<Device>& devices,
                           RegistryClient& registry, const castore::Store& store);

}  // namespace fwchain::device

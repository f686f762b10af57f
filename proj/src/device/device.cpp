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

#include "fwchain/device.hpp"

#include <cstring>
#include <fstream>

#include "fwchain/codec.hpp"
#include "fwchain/kernels/sha256.hpp"

namespace fwchain::device {

namespace {
constexpr char kDeviceBanner[] = "FWCHAIN-DEVICE-STATE v1\n";
}

void FlashImage::erase_sector(std::size_t index) {
  std::size_t off = index * kSectorSize;
  if (off >= data_.size()) return;
  std::size_t n = std::min(kSectorSize, data_.size() - off);
  std::memset(data_.data() + off, 0xff, n);
}

void FlashImage::write(std::size_t off, ByteView data) {
  if (off + data.size() > data_.size()) return;  // callers bound-check first
  std::memcpy(data_.data() + off, data.data(), data.size());
  if (stuck_ && stuck_->first >= off && stuck_->first < off + data.size())
    data_[stuck_->first] = stuck_->second;
}

Device::Device(std::size_t partition_size, std::uint64_t seed)
    : flash_{FlashImage(partition_size), FlashImage(partition_size)}, element_(seed ^ 0x5ec2e7e1) {
  meta_.rng_state = seed;
}

Device Device::provision(std::string product_id, std::string target_model,
                         std::size_t partition_size, std::uint64_t seed, ByteView factory_image,
                         std::uint64_t factory_version) {
  Device dev(partition_size, seed);
  dev.meta_.product_id = std::move(product_id);
  dev.meta_.target_model = std::move(target_model);
  dev.meta_.active = Partition::a;

  (void)dev.element_.generate_key(kIdentityKeySlot);

  FlashImage& fl = dev.flash_[0];
  fl.write(0, factory_image);
  Digest32 digest = dev.element_.sha256(factory_image);
  (void)dev.element_.store_digest(image_slot(Partition::a), digest, false);

  PartitionMeta& pm = dev.meta_.part[0];
  pm.version = factory_version;
  pm.boot_valid = true;
  pm.image_digest = digest;
  pm.image_len = static_cast<std::uint32_t>(factory_image.size());
  pm.window = dev.draw_window(pm.image_len);
  (void)dev.element_.store_digest(window_slot(Partition::a),
                                  dev.element_.sha256(fl.view(pm.window.start, pm.window.len)),
                                  false);
  dev.commit();
  return dev;
}

BootWindow Device::draw_window(std::uint32_t image_len) {
  SplitMix64 rng(meta_.rng_state);
  std::uint64_t draw = rng.next();
  meta_.rng_state = rng.state;

  BootWindow w;
  if (image_len == 0) return w;
  std::uint32_t sectors = (image_len + kSectorSize - 1) / kSectorSize;
  w.start = static_cast<std::uint32_t>((draw % sectors) * kSectorSize);
  w.len = static_cast<std::uint32_t>(std::min<std::uint64_t>(kSectorSize, image_len - w.start));
  return w;
}

void Device::write_flash(Partition p, std::size_t off, ByteView data) {
  FlashImage& fl = flash_[std::uint8_t(p)];
  if (fault_ && fault_->write_offset) {
    std::uint64_t cut_at = *fault_->write_offset;
    if (cut_at >= write_cursor_ && cut_at < write_cursor_ + data.size()) {
      std::size_t partial = static_cast<std::size_t>(cut_at - write_cursor_);
      fl.write(off, data.subspan(0, partial));
      write_cursor_ += partial;
      throw FaultInjected{write_cursor_};
    }
  }
  fl.write(off, data);
  write_cursor_ += data.size();
}

Result<CheckOutcome> Device::check_for_update(RegistryClient& registry) const {
  auto latest = registry.latest(committed_.product_id);
  if (!latest) {
    if (latest.error().code == Errc::not_found)
      return CheckOutcome{std::nullopt, "no published firmware"};
    return latest.error();  // RegistryUnavailable and friends, retryable
  }

  const registry::FirmwareRecord& rec = latest.value();
  if (rec.version <= installed_version())
    return CheckOutcome{std::nullopt, "up to date"};
  if (rec.target_model != committed_.target_model)
    return CheckOutcome{std::nullopt, "IncompatibleModel: firmware targets " + rec.target_model +
                                          ", device is " + committed_.target_model};

  UpdatePlan plan;
  plan.record = rec;
  plan.mode = UpdatePlan::Mode::full;
  return CheckOutcome{plan, "update to v" + std::to_string(rec.version)};
}

Result<Bytes> Device::download_and_verify(const UpdatePlan& plan,
                                          const castore::Store& store) const {
  auto fetched = store.get(castore::ContentId{plan.record.content_id});
  if (!fetched)
    return err(Errc::download_failed,
               std::string(errc_name(fetched.error().code)) + ": " + fetched.error().message);

  Bytes image;
  if (plan.mode == UpdatePlan::Mode::full) {
    image = fetched.take();
  } else {
    const PartitionMeta& active = committed_.part[std::uint8_t(committed_.active)];
    if (plan.range_end <= plan.range_start || plan.range_end > active.image_len)
      return err(Errc::invalid_plan, "partial range outside the active image");
    const Bytes& patch = fetched.value();
    if (patch.size() != plan.range_end - plan.range_start)
      return err(Errc::invalid_plan, "patch length does not match the range");
    // Reconstruct the full target image in RAM: active image with the range
    // overlaid. Nothing touches flash until the digest matches.
    ByteView base = active_image();
    image.assign(base.begin(), base.end());
    std::copy(patch.begin(), patch.end(), image.begin() + plan.range_start);
  }

  if (!(kernels::sha256(as_view(image)) == plan.record.firmware_digest))
    return err(Errc::digest_mismatch, "image digest does not match the registry record");
  return image;
}

Result<InstallReport> Device::install_atomic(ByteView firmware, const UpdatePlan& plan) {
  const Partition target = other(meta_.active);
  FlashImage& fl = flash_[std::uint8_t(target)];
  if (firmware.size() > fl.size())
    return err(Errc::insufficient_space, "image larger than partition");
  if (firmware.empty()) return err(Errc::invalid_plan, "empty image");

  InstallReport report;
  report.old_version = installed_version();

  // 1. Invalidate the target so a crash anywhere below leaves it ignored.
  meta_.part[std::uint8_t(target)].boot_valid = false;
  commit();

  // 2. Erase + write. Fault injection can cut the write at any offset.
  write_cursor_ = 0;
  const std::size_t sectors = (firmware.size() + kSectorSize - 1) / kSectorSize;
  for (std::size_t s = 0; s < sectors; ++s) fl.erase_sector(s);
  write_flash(target, 0, firmware);

  // 3. Re-hash in place; a worn cell or interrupted write surfaces here.
  Digest32 in_place = element_.sha256(fl.view(0, firmware.size()));
  if (!(in_place == plan.record.firmware_digest)) {
    commit();  // target stays invalid; device still boots the old image
    return err(Errc::write_failure, "in-place digest mismatch after write");
  }

  // 4. Attestation references into the element, then partition metadata.
  (void)element_.store_digest(image_slot(target), in_place, false);
  PartitionMeta pm;
  pm.version = plan.record.version;
  pm.image_digest = in_place;
  pm.image_len = static_cast<std::uint32_t>(firmware.size());
  pm.window = draw_window(pm.image_len);
  (void)element_.store_digest(window_slot(target),
                              element_.sha256(fl.view(pm.window.start, pm.window.len)), false);
  pm.boot_valid = true;
  meta_.part[std::uint8_t(target)] = pm;
  commit();

  // 5. The atomic flip.
  if (fault_ && fault_->at_flip) throw FaultInjected{write_cursor_};
  meta_.active = target;
  commit();

  report.new_version = pm.version;
  report.image_digest = pm.image_digest;
  report.new_active = target;
  return report;
}

bool Device::window_check(Partition p) {
  const PartitionMeta& pm = meta_.part[std::uint8_t(p)];
  if (!pm.boot_valid || pm.image_len == 0) return false;
  auto att = element_.check_boot_sector(window_slot(p),
                                        flash_[std::uint8_t(p)].view(0, pm.image_len),
                                        pm.window.start, pm.window.len);
  return att.ok() && att.value().matched;
}

void Device::rebless(Partition p) {
  PartitionMeta& pm = meta_.part[std::uint8_t(p)];
  pm.window = draw_window(pm.image_len);
  (void)element_.store_digest(
      window_slot(p),
      element_.sha256(flash_[std::uint8_t(p)].view(pm.window.start, pm.window.len)), false);
}

BootReport Device::secure_boot() {
  meta_.boot_count++;

  BootReport report;
  if (window_check(meta_.active)) {
    report.decision = BootDecision::booted_active;
    report.booted = meta_.active;
    report.version = meta_.part[std::uint8_t(meta_.active)].version;
    rebless(meta_.active);  // next boot checks a fresh sector
    commit();
    return report;
  }

  const Partition fallback = other(meta_.active);
  if (window_check(fallback)) {
    meta_.active = fallback;
    report.decision = BootDecision::rolled_back;
    report.booted = fallback;
    report.version = meta_.part[std::uint8_t(fallback)].version;
    rebless(fallback);
    commit();
    return report;
  }

  report.decision = BootDecision::recovery_halt;
  commit();
  return report;
}

BootReport Device::restart() {
  meta_ = committed_;  // uncommitted working state is lost with power
  fault_.reset();
  write_cursor_ = 0;
  return secure_boot();
}

Result<InstallReport> Device::rollback(std::uint64_t target_version, RegistryClient& registry,
                                       const castore::Store& store) {
  auto rec = registry.version(committed_.product_id, target_version);
  if (!rec) return rec.error();

  UpdatePlan plan;
  plan.record = rec.value();
  plan.mode = UpdatePlan::Mode::full;

  auto image = download_and_verify(plan, store);
  if (!image) return image.error();
  return install_atomic(as_view(image.value()), plan);
}

Result<UpdateOutcome> Device::run_update_cycle(RegistryClient& registry,
                                               const castore::Store& store) {
  auto check = check_for_update(registry);
  if (!check) return check.error();
  if (!check.value().plan) return UpdateOutcome{false, check.value().note, std::nullopt};

  auto image = download_and_verify(*check.value().plan, store);
  if (!image) return image.error();

  auto installed = install_atomic(as_view(image.value()), *check.value().plan);
  if (!installed) return installed.error();
  return UpdateOutcome{true, check.value().note, installed.value()};
}

std::uint64_t Device::installed_version() const {
  return committed_.part[std::uint8_t(committed_.active)].version;
}

ByteView Device::partition_image(Partition p) const {
  const PartitionMeta& pm = committed_.part[std::uint8_t(p)];
  return flash_[std::uint8_t(p)].view(0, pm.image_len);
}

crypto::PublicKey Device::identity_key() const {
  auto pk = element_.public_key(kIdentityKeySlot);
  return pk.ok() ? pk.value() : crypto::PublicKey{};
}

void Device::corrupt_flash(Partition p, std::size_t offset, std::uint8_t xor_mask) {
  FlashImage& fl = flash_[std::uint8_t(p)];
  if (offset >= fl.size()) return;
  std::uint8_t b = fl.view(offset, 1)[0];
  b = std::uint8_t(b ^ xor_mask);
  fl.write(offset, ByteView(&b, 1));
}

void Device::set_stuck_byte(Partition p, std::size_t offset, std::uint8_t value) {
  flash_[std::uint8_t(p)].set_stuck_byte(offset, value);
}

namespace {

void encode_partition(Encoder& e, const PartitionMeta& pm) {
  e.put_u64(pm.version)
      .put_u8(pm.boot_valid ? 1 : 0)
      .put_digest(pm.image_digest)
      .put_u32(pm.image_len)
      .put_u32(pm.window.start)
      .put_u32(pm.window.len);
}

Result<PartitionMeta> decode_partition(Decoder& d) {
  PartitionMeta pm;
  auto version = d.u64_field();
  if (!version) return version.error();
  pm.version = version.value();
  auto valid = d.u8_field();
  if (!valid) return valid.error();
  pm.boot_valid = valid.value() != 0;
  auto digest = d.digest_field();
  if (!digest) return digest.error();
  pm.image_digest = digest.value();
  auto len = d.u32_field();
  if (!len) return len.error();
  pm.image_len = len.value();
  auto ws = d.u32_field();
  if (!ws) return ws.error();
  pm.window.start = ws.value();
  auto wl = d.u32_field();
  if (!wl) return wl.error();
  pm.window.len = wl.value();
  return pm;
}

}  // namespace

Bytes Device::serialize() const {
  // Flash persists as the image-length prefix of each partition. Bytes past
  // image_len are never read by any operation, so reloading them as erased
  // cells is behavior-preserving.
  Encoder e;
  e.put_raw(as_view(std::string_view(kDeviceBanner)));
  e.put_string(committed_.product_id)
      .put_string(committed_.target_model)
      .put_u8(std::uint8_t(committed_.active))
      .put_u64(committed_.rng_state)
      .put_u64(committed_.boot_count)
      .put_u64(flash_[0].size());
  for (int i = 0; i < 2; ++i) encode_partition(e, committed_.part[i]);
  for (int i = 0; i < 2; ++i)
    e.put_bytes(flash_[i].view(0, committed_.part[i].image_len));
  e.put_bytes(as_view(element_.serialize()));
  return e.take();
}

Result<Device> Device::deserialize(ByteView data) {
  constexpr std::size_t banner_len = sizeof(kDeviceBanner) - 1;
  if (data.size() < banner_len || std::memcmp(data.data(), kDeviceBanner, banner_len) != 0)
    return err(Errc::parse_error, "missing device state banner");

  Decoder d(data.subspan(banner_len));
  auto product = d.string_field();
  if (!product) return product.error();
  auto model = d.string_field();
  if (!model) return model.error();
  auto active = d.u8_field();
  if (!active) return active.error();
  if (active.value() > 1) return err(Errc::parse_error, "bad active partition");
  auto rng_state = d.u64_field();
  if (!rng_state) return rng_state.error();
  auto boot_count = d.u64_field();
  if (!boot_count) return boot_count.error();
  auto psize = d.u64_field();
  if (!psize) return psize.error();

  Device dev(static_cast<std::size_t>(psize.value()), 0);
  dev.meta_.product_id = product.take();
  dev.meta_.target_model = model.take();
  dev.meta_.active = static_cast<Partition>(active.value());
  dev.meta_.rng_state = rng_state.value();
  dev.meta_.boot_count = boot_count.value();

  for (int i = 0; i < 2; ++i) {
    auto pm = decode_partition(d);
    if (!pm) return pm.error();
    if (pm.value().image_len > psize.value())
      return err(Errc::parse_error, "image exceeds partition");
    dev.meta_.part[i] = pm.value();
  }
  for (int i = 0; i < 2; ++i) {
    auto image = d.bytes_field();
    if (!image) return image.error();
    if (image.value().size() != dev.meta_.part[i].image_len)
      return err(Errc::parse_error, "flash prefix length mismatch");
    dev.flash_[i].write(0, image.value());
  }
  auto element = d.bytes_field();
  if (!element) return element.error();
  auto se = se::SecureElement::deserialize(element.value());
  if (!se) return se.error();
  dev.element_ = se.take();

  if (!d.done()) return err(Errc::parse_error, "trailing bytes after device state");
  dev.commit();
  return dev;
}

Result<void> Device::save(const std::filesystem::path& file) const {
  Bytes data = serialize();
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) return err(Errc::io_failure, "cannot open " + file.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) return err(Errc::io_failure, "short write to " + file.string());
  return {};
}

Result<Device> Device::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return err(Errc::io_failure, "cannot open " + file.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(as_view(data));
}

LedgerRegistryClient::LedgerRegistryClient(const ledger::Ledger& led) : led_(led) {}

Result<registry::FirmwareRecord> LedgerRegistryClient::latest(const std::string& product) {
  auto r = led_.query(ledger::GetLatest{product});
  if (!r) return r.error();
  return std::get<registry::FirmwareRecord>(r.value());
}

Result<registry::FirmwareRecord> LedgerRegistryClient::version(const std::string& product,
                                                               std::uint64_t version) {
  auto r = led_.query(ledger::GetVersion{product, version});
  if (!r) return r.error();
  return std::get<registry::FirmwareRecord>(r.value());
}

Result<registry::FirmwareRecord> CountingRegistryClient::latest(const std::string& product) {
  count_.fetch_add(1, std::memory_order_relaxed);
  return inner_.latest(product);
}

Result<registry::FirmwareRecord> CountingRegistryClient::version(const std::string& product,
                                                                 std::uint64_t version) {
  count_.fetch_add(1, std::memory_order_relaxed);
  return inner_.version(product, version);
}

Result<Topology> topology_from_name(std::string_view name) {
  if (name == "edge-cloud") return Topology::edge_cloud;
  if (name == "gateway-cloud") return Topology::gateway_cloud;
  if (name == "edge-gateway-cloud") return Topology::edge_gateway_cloud;
  return err(Errc::usage, "unknown topology: " + std::string(name));
}

const char* topology_name(Topology t) {
  switch (t) {
    case Topology::edge_cloud: return "edge-cloud";
    case Topology::gateway_cloud: return "gateway-cloud";
    case Topology::edge_gateway_cloud: return "edge-gateway-cloud";
  }
  return "?";
}

}  // namespace fwchain::device

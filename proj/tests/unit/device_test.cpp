#include <doctest.h>

#include <map>
#include <random>

#include "fwchain/device.hpp"
#include "fwchain/kernels/sha256.hpp"
#include "support/testutil.hpp"

using namespace fwchain;
using namespace fwchain::device;

namespace {

struct FakeRegistry : RegistryClient {
  std::map<std::string, std::vector<registry::FirmwareRecord>> recs;
  bool unavailable = false;

  Result<registry::FirmwareRecord> latest(const std::string& product) override {
    if (unavailable) return err(Errc::registry_unavailable, "simulated outage");
    auto it = recs.find(product);
    if (it == recs.end() || it->second.empty()) return err(Errc::not_found, product);
    return it->second.back();
  }
  Result<registry::FirmwareRecord> version(const std::string& product,
                                           std::uint64_t v) override {
    if (unavailable) return err(Errc::registry_unavailable, "simulated outage");
    auto it = recs.find(product);
    if (it != recs.end())
      for (const auto& r : it->second)
        if (r.version == v) return r;
    return err(Errc::not_found, product);
  }
};

struct Rig {
  std::mt19937_64 rng{0xd007};
  castore::Store store{4096};
  FakeRegistry registry;
  Bytes factory_image;
  Device dev;

  explicit Rig(std::size_t partition_size = 64 * 1024, std::size_t factory_len = 8000)
      : factory_image(testutil::random_bytes(rng, factory_len)),
        dev(Device::provision("lamp", "esp8266", partition_size, 0xcafe, as_view(factory_image),
                              1)) {}

  registry::FirmwareRecord publish(std::uint64_t version, const Bytes& image,
                                   const std::string& model = "esp8266",
                                   const std::string& product = "lamp") {
    registry::FirmwareRecord r;
    r.product_id = product;
    r.version = version;
    r.content_id = store.put(as_view(image)).digest;
    r.firmware_digest = kernels::sha256(as_view(image));
    r.target_model = model;
    registry.recs[product].push_back(r);
    return r;
  }

  Bytes fresh_image(std::size_t n) { return testutil::random_bytes(rng, n); }
};

}  // namespace

TEST_CASE("provisioned device boots its factory image") {
  Rig rig;
  CHECK(rig.dev.installed_version() == 1);
  CHECK(to_bytes(rig.dev.active_image()) == rig.factory_image);
  auto boot = rig.dev.secure_boot();
  CHECK(boot.decision == BootDecision::booted_active);
  CHECK(boot.version == 1);
}

TEST_CASE("check_for_update gates on version and model") {
  Rig rig;

  SUBCASE("nothing published: no plan") {
    auto c = rig.dev.check_for_update(rig.registry);
    REQUIRE(c.ok());
    CHECK(!c.value().plan);
  }

  SUBCASE("same version: up to date") {
    rig.publish(1, rig.factory_image);
    auto c = rig.dev.check_for_update(rig.registry);
    REQUIRE(c.ok());
    CHECK(!c.value().plan);
    CHECK(c.value().note == "up to date");
  }

  SUBCASE("newer version with matching model yields a plan") {
    auto rec = rig.publish(2, rig.fresh_image(5000));
    auto c = rig.dev.check_for_update(rig.registry);
    REQUIRE(c.ok());
    REQUIRE(c.value().plan);
    CHECK(c.value().plan->record == rec);
  }

  SUBCASE("model mismatch is reported, not planned") {
    rig.publish(2, rig.fresh_image(5000), "stm32f103");
    auto c = rig.dev.check_for_update(rig.registry);
    REQUIRE(c.ok());
    CHECK(!c.value().plan);
    CHECK(c.value().note.find("IncompatibleModel") != std::string::npos);
  }

  SUBCASE("registry outage is a retryable error") {
    rig.registry.unavailable = true;
    auto c = rig.dev.check_for_update(rig.registry);
    CHECK(c.error().code == Errc::registry_unavailable);
  }

  SUBCASE("never-downgrade: older or equal versions never produce a plan") {
    for (std::uint64_t latest = 0; latest <= 6; ++latest) {
      Rig fresh;
      // installed_version is 1; publish a single record at `latest`.
      if (latest > 0) fresh.publish(latest, fresh.fresh_image(100));
      auto c = fresh.dev.check_for_update(fresh.registry);
      REQUIRE(c.ok());
      CHECK(c.value().plan.has_value() == (latest > 1));
      if (c.value().plan) CHECK(c.value().plan->record.version > fresh.dev.installed_version());
    }
  }
}

TEST_CASE("download_and_verify rejects tampering before any flash write") {
  Rig rig;
  Bytes image = rig.fresh_image(10000);
  auto rec = rig.publish(2, image);
  UpdatePlan plan{rec, UpdatePlan::Mode::full, 0, 0};

  Bytes before_a = to_bytes(rig.dev.partition_image(Partition::a));

  SUBCASE("honest store verifies") {
    auto got = rig.dev.download_and_verify(plan, rig.store);
    REQUIRE(got.ok());
    CHECK(got.value() == image);
  }

  SUBCASE("bit-flipped store content fails closed") {
    auto nodes = rig.store.node_digests();
    Bytes raw = *rig.store.node_raw(nodes[0]);
    raw[raw.size() / 2] ^= 0x10;
    rig.store.overwrite_node_raw(nodes[0], raw);
    auto got = rig.dev.download_and_verify(plan, rig.store);
    REQUIRE(!got.ok());
    CHECK(got.error().code == Errc::download_failed);
  }

  SUBCASE("registry digest mismatch (bad publish) is caught") {
    UpdatePlan bad = plan;
    bad.record.firmware_digest[7] ^= 0x01;
    auto got = rig.dev.download_and_verify(bad, rig.store);
    REQUIRE(!got.ok());
    CHECK(got.error().code == Errc::digest_mismatch);
  }

  // In every case the device flash is untouched.
  CHECK(to_bytes(rig.dev.partition_image(Partition::a)) == before_a);
  CHECK(rig.dev.installed_version() == 1);
}

TEST_CASE("full install flips partitions atomically") {
  Rig rig;
  Bytes image = rig.fresh_image(20000);
  auto rec = rig.publish(2, image);

  auto outcome = rig.dev.run_update_cycle(rig.registry, rig.store);
  REQUIRE(outcome.ok());
  REQUIRE(outcome.value().updated);
  CHECK(outcome.value().report->old_version == 1);
  CHECK(outcome.value().report->new_version == 2);
  CHECK(rig.dev.installed_version() == 2);
  CHECK(rig.dev.meta().active == Partition::b);
  CHECK(to_bytes(rig.dev.active_image()) == image);
  CHECK(rig.dev.meta().part[1].image_digest == rec.firmware_digest);

  // The previous image remains intact and bootable in the other slot.
  CHECK(to_bytes(rig.dev.partition_image(Partition::a)) == rig.factory_image);
  CHECK(rig.dev.meta().part[0].boot_valid);

  auto boot = rig.dev.secure_boot();
  CHECK(boot.decision == BootDecision::booted_active);
  CHECK(boot.version == 2);

  // Second cycle: up to date.
  auto again = rig.dev.run_update_cycle(rig.registry, rig.store);
  REQUIRE(again.ok());
  CHECK(!again.value().updated);
}

TEST_CASE("oversized image is refused before writing") {
  Rig rig(16 * 1024);
  Bytes image = rig.fresh_image(32 * 1024);
  auto rec = rig.publish(2, image);
  UpdatePlan plan{rec, UpdatePlan::Mode::full, 0, 0};
  auto got = rig.dev.install_atomic(as_view(image), plan);
  CHECK(got.error().code == Errc::insufficient_space);
  CHECK(rig.dev.installed_version() == 1);
}

TEST_CASE("worn flash cell surfaces as WriteFailure and keeps the old image") {
  Rig rig;
  Bytes image = rig.fresh_image(5000);
  auto rec = rig.publish(2, image);
  rig.dev.set_stuck_byte(Partition::b, 1234, 0x00);
  // Make sure the stuck value actually differs from the image byte.
  if (image[1234] == 0x00) image[1234] = 0x55;
  rec = rig.publish(3, image);

  UpdatePlan plan{rec, UpdatePlan::Mode::full, 0, 0};
  auto got = rig.dev.install_atomic(as_view(image), plan);
  REQUIRE(!got.ok());
  CHECK(got.error().code == Errc::write_failure);
  CHECK(rig.dev.installed_version() == 1);
  CHECK(rig.dev.restart().decision == BootDecision::booted_active);
}

TEST_CASE("fault injection: exhaustive crash points leave the device bootable") {
  Rig rig(8 * 1024, 1024);
  Bytes image = rig.fresh_image(2048);
  auto rec = rig.publish(2, image);
  UpdatePlan plan{rec, UpdatePlan::Mode::full, 0, 0};

  // Every write offset plus the pre-flip step.
  for (std::uint64_t cut = 0; cut <= image.size(); ++cut) {
    Device dev = rig.dev;  // fresh copy per crash point
    FaultPlan fp;
    if (cut < image.size()) {
      fp.write_offset = cut;
    } else {
      fp.at_flip = true;
    }
    dev.set_fault_plan(fp);

    bool crashed = false;
    try {
      auto r = dev.install_atomic(as_view(image), plan);
      (void)r;
    } catch (const FaultInjected&) {
      crashed = true;
    }
    CHECK(crashed);

    auto boot = dev.restart();
    CHECK(boot.decision == BootDecision::booted_active);
    CHECK(dev.installed_version() == 1);
    CHECK(to_bytes(dev.active_image()) == rig.factory_image);

    // Recovery: the interrupted update can be retried to completion.
    auto retry = dev.install_atomic(as_view(image), plan);
    REQUIRE(retry.ok());
    CHECK(dev.installed_version() == 2);
  }

  // No fault: install lands.
  Device dev = rig.dev;
  REQUIRE(dev.install_atomic(as_view(image), plan).ok());
  CHECK(dev.restart().decision == BootDecision::booted_active);
  CHECK(dev.installed_version() == 2);
}

TEST_CASE("partial update touches only the declared range") {
  Rig rig(64 * 1024, 16384);
  // The new image equals the active one outside [start, end).
  Bytes target = rig.factory_image;
  const std::uint32_t start = 0x1000, end = 0x2000;
  std::mt19937_64 prng(99);
  Bytes patch = testutil::random_bytes(prng, end - start);
  std::copy(patch.begin(), patch.end(), target.begin() + start);

  registry::FirmwareRecord rec;
  rec.product_id = "lamp";
  rec.version = 2;
  rec.content_id = rig.store.put(as_view(patch)).digest;  // only the patch travels
  rec.firmware_digest = kernels::sha256(as_view(target));
  rec.target_model = "esp8266";

  UpdatePlan plan{rec, UpdatePlan::Mode::partial, start, end};
  auto image = rig.dev.download_and_verify(plan, rig.store);
  REQUIRE(image.ok());
  auto installed = rig.dev.install_atomic(as_view(image.value()), plan);
  REQUIRE(installed.ok());

  ByteView now = rig.dev.active_image();
  REQUIRE(now.size() == rig.factory_image.size());
  for (std::size_t i = 0; i < now.size(); ++i) {
    if (i < start || i >= end) {
      REQUIRE(now[i] == rig.factory_image[i]);
    }
  }
  CHECK(to_bytes(now.subspan(start, end - start)) == patch);
  CHECK(rig.dev.installed_version() == 2);

  SUBCASE("range outside the image is an invalid plan") {
    UpdatePlan bad = plan;
    bad.record.version = 3;
    bad.range_end = std::uint32_t(rig.factory_image.size()) + 16;
    CHECK(rig.dev.download_and_verify(bad, rig.store).error().code == Errc::invalid_plan);
  }
  SUBCASE("patch length must match the range") {
    UpdatePlan bad = plan;
    bad.range_end = end - 8;
    CHECK(rig.dev.download_and_verify(bad, rig.store).error().code == Errc::invalid_plan);
  }
}

TEST_CASE("secure boot rolls back to the valid partition") {
  Rig rig;
  Bytes image = rig.fresh_image(12000);
  rig.publish(2, image);
  REQUIRE(rig.dev.run_update_cycle(rig.registry, rig.store).value().updated);
  REQUIRE(rig.dev.meta().active == Partition::b);

  SUBCASE("clean image boots active") {
    auto boot = rig.dev.secure_boot();
    CHECK(boot.decision == BootDecision::booted_active);
    CHECK(boot.version == 2);
  }

  SUBCASE("corrupted active with valid inactive rolls back") {
    const BootWindow w = rig.dev.meta().part[1].window;
    rig.dev.corrupt_flash(Partition::b, w.start + w.len / 2, 0x01);
    auto boot = rig.dev.secure_boot();
    CHECK(boot.decision == BootDecision::rolled_back);
    CHECK(boot.booted == Partition::a);
    CHECK(boot.version == 1);
    CHECK(rig.dev.installed_version() == 1);
  }

  SUBCASE("both partitions corrupted halts in recovery") {
    const BootWindow wb = rig.dev.meta().part[1].window;
    const BootWindow wa = rig.dev.meta().part[0].window;
    rig.dev.corrupt_flash(Partition::b, wb.start, 0xff);
    rig.dev.corrupt_flash(Partition::a, wa.start, 0xff);
    auto boot = rig.dev.secure_boot();
    CHECK(boot.decision == BootDecision::recovery_halt);
  }

  SUBCASE("boot windows move between successful boots") {
    auto w1 = rig.dev.meta().part[1].window;
    std::uint32_t seen_different = 0;
    for (int i = 0; i < 16; ++i) {
      REQUIRE(rig.dev.secure_boot().decision == BootDecision::booted_active);
      if (rig.dev.meta().part[1].window.start != w1.start) seen_different++;
    }
    CHECK(seen_different > 0);  // 12000-byte image has 12 candidate sectors
  }
}

TEST_CASE("rollback reinstalls a historical version") {
  Rig rig;
  Bytes v2 = rig.fresh_image(9000);
  auto rec1 = rig.publish(1, rig.factory_image);  // factory image is v1 in the registry
  auto rec2 = rig.publish(2, v2);
  REQUIRE(rig.dev.run_update_cycle(rig.registry, rig.store).value().updated);
  REQUIRE(rig.dev.installed_version() == 2);

  auto rolled = rig.dev.rollback(1, rig.registry, rig.store);
  REQUIRE(rolled.ok());
  CHECK(rig.dev.installed_version() == 1);
  CHECK(rig.dev.meta().part[std::uint8_t(rig.dev.meta().active)].image_digest ==
        rec1.firmware_digest);

  // Registry is unchanged: the next check offers v2 again.
  auto c = rig.dev.check_for_update(rig.registry);
  REQUIRE(c.ok());
  REQUIRE(c.value().plan);
  CHECK(c.value().plan->record.version == 2);
  CHECK(c.value().plan->record == rec2);

  CHECK(rig.dev.rollback(9, rig.registry, rig.store).error().code == Errc::not_found);
}

TEST_CASE("device state survives serialization") {
  testutil::ScratchDir scratch("device");
  Rig rig;
  Bytes image = rig.fresh_image(6000);
  rig.publish(2, image);
  REQUIRE(rig.dev.run_update_cycle(rig.registry, rig.store).value().updated);

  auto file = scratch.path() / "lamp.dev";
  REQUIRE(rig.dev.save(file).ok());

  auto loaded = Device::load(file);
  REQUIRE(loaded.ok());
  Device& dev = loaded.value();
  CHECK(dev.installed_version() == 2);
  CHECK(to_bytes(dev.active_image()) == image);
  CHECK(dev.meta().product_id == "lamp");
  CHECK(dev.identity_key() == rig.dev.identity_key());
  CHECK(dev.secure_boot().decision == BootDecision::booted_active);

  // The banner is part of the format.
  Bytes blob = rig.dev.serialize();
  std::string head(blob.begin(), blob.begin() + 24);
  CHECK(head.find("FWCHAIN-DEVICE-STATE") != std::string::npos);
  Bytes truncated(blob.begin() + 2, blob.end());
  CHECK(!Device::deserialize(as_view(truncated)).ok());
}

TEST_CASE("fleet topologies update every device with the expected query fan-out") {
  const std::size_t n = 6;
  for (Topology topo :
       {Topology::edge_cloud, Topology::gateway_cloud, Topology::edge_gateway_cloud}) {
    CAPTURE(topology_name(topo));
    Rig rig;
    Bytes image = rig.fresh_image(4000);
    rig.publish(2, image);

    std::vector<Device> fleet;
    for (std::size_t i = 0; i < n; ++i)
      fleet.push_back(Device::provision("lamp", "esp8266", 64 * 1024, 1000 + i,
                                        as_view(rig.factory_image), 1));

    auto report = simulate_fleet(topo, fleet, rig.registry, rig.store);
    CHECK(report.devices == n);
    CHECK(report.updated == n);
    CHECK(report.failed == 0);
    for (auto& d : fleet) {
      CHECK(d.installed_version() == 2);
      CHECK(d.secure_boot().decision == BootDecision::booted_active);
    }
    if (topo == Topology::edge_cloud) {
      CHECK(report.registry_queries == n);
      CHECK(report.content_fetches == n);
    } else {
      CHECK(report.registry_queries == 1);
      CHECK(report.content_fetches == (topo == Topology::gateway_cloud ? 1 : n));
    }
  }
}

TEST_CASE("agent pipeline runs against a real ledger") {
  // End-to-end through the chain rather than the fake: deploy, publish,
  // advance, then poll through the ledger adapter.
  Digest32 root{};
  root.fill(0x77);
  auto o0 = multisig::derive_owner(root, 0);
  auto o1 = multisig::derive_owner(root, 1);

  ledger::Ledger led;
  auto deploy = ledger::make_signed_transaction(
      o0.keys, 0,
      registry::encode_action(
          registry::Action(registry::DeployAction{multisig::make_owner_set(root, 3, 2)})));
  REQUIRE(led.submit(deploy).ok());

  std::mt19937_64 rng(0xabcd);
  castore::Store store;
  Bytes factory = testutil::random_bytes(rng, 2000);
  Bytes image = testutil::random_bytes(rng, 30000);

  registry::FirmwareRecord rec;
  rec.product_id = "lamp";
  rec.version = 2;
  rec.content_id = store.put(as_view(image)).digest;
  rec.firmware_digest = kernels::sha256(as_view(image));
  rec.target_model = "esp8266";

  auto propose = ledger::make_signed_transaction(
      o0.keys, 1,
      registry::encode_action(
          registry::Action(registry::ProposeAction{registry::make_publish_inner(rec)})));
  REQUIRE(led.submit(propose).ok());
  auto confirm = ledger::make_signed_transaction(
      o1.keys, 0, registry::encode_action(registry::Action(registry::ConfirmAction{0})));
  REQUIRE(led.submit(confirm).ok());

  Device dev = Device::provision("lamp", "esp8266", 64 * 1024, 42, as_view(factory), 1);
  LedgerRegistryClient client(led);

  // Pending isolation: nothing to see before the block.
  auto pre = dev.check_for_update(client);
  REQUIRE(pre.ok());
  CHECK(!pre.value().plan);

  REQUIRE(led.advance_block(15).ok());
  auto outcome = dev.run_update_cycle(client, store);
  REQUIRE(outcome.ok());
  REQUIRE(outcome.value().updated);
  CHECK(dev.installed_version() == 2);
  CHECK(dev.meta().part[std::uint8_t(dev.meta().active)].image_digest == rec.firmware_digest);
}

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

#include <future>
#include <mutex>

#include "fwchain/device.hpp"
#include "fwchain/kernels/sha256.hpp"

namespace fwchain::device {

namespace {

// Serve a single pre-fetched record, the gateway's cached answer.
class CachedRegistryClient : public RegistryClient {
 public:
  explicit CachedRegistryClient(Result<registry::FirmwareRecord> latest)
      : latest_(std::move(latest)) {}

  Result<registry::FirmwareRecord> latest(const std::string&) override { return latest_; }
  Result<registry::FirmwareRecord> version(const std::string&, std::uint64_t v) override {
    if (latest_.ok() && latest_.value().version == v) return latest_;
    return err(Errc::not_found, "gateway cache only holds the latest record");
  }

 private:
  Result<registry::FirmwareRecord> latest_;
};

struct Tally {
  std::mutex mu;
  std::size_t updated = 0, up_to_date = 0, failed = 0, fetches = 0;
};

void run_device(Device& dev, RegistryClient& registry, const castore::Store& store,
                const Bytes* pushed_image, Tally& tally) {
  if (pushed_image) {
    // Push topology: the gateway hands over record + bytes; the device
    // still checks compatibility and verifies the digest itself.
    auto check = dev.check_for_update(registry);
    if (!check.ok()) {
      std::lock_guard lock(tally.mu);
      tally.failed++;
      return;
    }
    if (!check.value().plan) {
      std::lock_guard lock(tally.mu);
      tally.up_to_date++;
      return;
    }
    const UpdatePlan& plan = *check.value().plan;
    if (!(kernels::sha256(as_view(*pushed_image)) == plan.record.firmware_digest)) {
      std::lock_guard lock(tally.mu);
      tally.failed++;
      return;
    }
    auto installed = dev.install_atomic(as_view(*pushed_image), plan);
    std::lock_guard lock(tally.mu);
    installed.ok() ? tally.updated++ : tally.failed++;
    return;
  }

  auto outcome = dev.run_update_cycle(registry, store);
  std::lock_guard lock(tally.mu);
  if (!outcome.ok()) {
    tally.failed++;
  } else if (outcome.value().updated) {
    tally.updated++;
    tally.fetches++;
  } else {
    tally.up_to_date++;
  }
}

}  // namespace

FleetReport simulate_fleet(Topology topology, std::vector<Device>& devices,
                           RegistryClient& registry, const castore::Store& store) {
  FleetReport report;
  report.topology = topology;
  report.devices = devices.size();
  if (devices.empty()) return report;

  CountingRegistryClient counted(registry);
  Tally tally;

  const std::string product = devices.front().meta().product_id;

  if (topology == Topology::edge_cloud) {
    // Every device polls the chain and fetches for itself.
    std::vector<std::future<void>> jobs;
    for (auto& dev : devices)
      jobs.push_back(std::async(std::launch::async, [&] {
        run_device(dev, counted, store, nullptr, tally);
      }));
    for (auto& j : jobs) j.get();
  } else {
    // One gateway getter call serves the whole fleet.
    auto latest = counted.latest(product);
    CachedRegistryClient cache(latest);

    std::optional<Bytes> gateway_image;
    if (topology == Topology::gateway_cloud && latest.ok()) {
      auto fetched = store.get(castore::ContentId{latest.value().content_id});
      if (fetched.ok()) {
        gateway_image = fetched.take();
        tally.fetches = 1;
      }
    }

    std::vector<std::future<void>> jobs;
    for (auto& dev : devices)
      jobs.push_back(std::async(std::launch::async, [&] {
        run_device(dev, cache, store, gateway_image ? &*gateway_image : nullptr, tally);
      }));
    for (auto& j : jobs) j.get();
  }

  report.updated = tally.updated;
  report.up_to_date = tally.up_to_date;
  report.failed = tally.failed;
  report.registry_queries = counted.count();
  report.content_fetches = tally.fetches;
  return report;
}

}  // namespace fwchain::device

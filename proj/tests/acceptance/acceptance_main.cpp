// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. Each criterion drives the real module stack end to end at the
// stated scale and tolerance.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <vector>

#include "fwchain/bench.hpp"
#include "fwchain/bootloader.hpp"
#include "fwchain/device.hpp"
#include "fwchain/kernels/sha256.hpp"
#include "support/testutil.hpp"

using namespace fwchain;

namespace {

int g_failed = 0;

void report(int criterion, const char* title, bool pass, const std::string& detail = "") {
  std::printf("%s — criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, title,
              detail.empty() ? "" : " — ", detail.c_str());
  if (!pass) ++g_failed;
}

Digest32 seed32(std::uint8_t fill) {
  Digest32 s;
  s.fill(fill);
  return s;
}

// Shared fixture: a chain whose wallet is a root-derived 3-owner set.
struct Chain {
  Digest32 root = seed32(0xac);
  std::vector<multisig::OwnerKey> owners;
  ledger::Ledger led;

  explicit Chain(std::uint32_t n = 3, std::uint32_t m = 2) {
    for (std::uint32_t i = 0; i < n; ++i) owners.push_back(multisig::derive_owner(root, i));
    submit(0, registry::encode_action(
                  registry::Action(registry::DeployAction{multisig::make_owner_set(root, n, m)})));
  }

  std::uint64_t submit(std::size_t owner, Bytes action) {
    auto tx = ledger::make_signed_transaction(owners[owner].keys,
                                              led.next_nonce(owners[owner].address),
                                              std::move(action));
    auto id = led.submit(std::move(tx));
    return id.ok() ? id.value() : std::uint64_t(-1);
  }

  std::uint64_t publish_2of3(const registry::FirmwareRecord& rec, std::uint64_t proposal_id) {
    submit(0, registry::encode_action(
                  registry::Action(registry::ProposeAction{registry::make_publish_inner(rec)})));
    return submit(1, registry::encode_action(registry::Action(registry::ConfirmAction{proposal_id})));
  }
};

// --------------------------------------------------------------------------
// 1. End-to-end pipeline across firmware sizes, under 10 s wall time.
// --------------------------------------------------------------------------
void criterion_1() {
  auto began = std::chrono::steady_clock::now();
  const std::size_t sizes[] = {1, 4096, 1024 * 1024, 4 * 1024 * 1024};
  std::mt19937_64 rng(0x01);
  bool all_ok = true;
  std::string detail;

  std::uint64_t version = 2;
  for (std::size_t size : sizes) {
    Chain chain;
    castore::Store store;  // default 256 KiB chunks
    Bytes image = testutil::random_bytes(rng, size);

    registry::FirmwareRecord rec;
    rec.product_id = "lamp";
    rec.version = version;
    rec.content_id = store.put(as_view(image)).digest;
    rec.firmware_digest = kernels::sha256(as_view(image));
    rec.target_model = "esp8266";
    chain.publish_2of3(rec, 0);
    if (!chain.led.advance_block(15).ok()) all_ok = false;

    Bytes factory = testutil::random_bytes(rng, 512);
    auto dev = device::Device::provision("lamp", "esp8266", 4 * 1024 * 1024, 0xe2e,
                                         as_view(factory), 1);
    device::LedgerRegistryClient client(chain.led);
    auto outcome = dev.run_update_cycle(client, store);

    bool ok = outcome.ok() && outcome.value().updated &&
              dev.installed_version() == rec.version &&
              kernels::sha256(dev.active_image()) == rec.firmware_digest &&
              dev.meta().part[std::uint8_t(dev.meta().active)].image_digest ==
                  rec.firmware_digest &&
              dev.secure_boot().decision == device::BootDecision::booted_active;
    if (!ok) {
      all_ok = false;
      detail += "size " + std::to_string(size) + " failed; ";
    }
  }

  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - began).count();
  char buf[96];
  std::snprintf(buf, sizeof(buf), "sizes {1B,4KiB,1MiB,4MiB} in %.2f s (budget 10 s)", secs);
  report(1, "end-to-end publish/confirm/update pipeline", all_ok && secs < 10.0,
         detail + buf);
}

// --------------------------------------------------------------------------
// 2. Atomicity under injected crashes: exhaustive small images, sampled 1 MiB.
// --------------------------------------------------------------------------
void criterion_2() {
  std::mt19937_64 rng(0x02);
  std::size_t runs = 0, bricked = 0, wrong_state = 0;

  auto crash_run = [&](device::Device& base, const Bytes& image,
                       const registry::FirmwareRecord& rec, device::FaultPlan plan) {
    device::Device dev = base;
    dev.set_fault_plan(plan);
    device::UpdatePlan up{rec, device::UpdatePlan::Mode::full, 0, 0};
    bool crashed = false;
    try {
      (void)dev.install_atomic(as_view(image), up);
    } catch (const device::FaultInjected&) {
      crashed = true;
    }
    auto boot = dev.restart();
    ++runs;
    if (boot.decision == device::BootDecision::recovery_halt) ++bricked;
    // A crash must leave the old version; only the armed pre-flip point
    // decides between old and new, and we never arm past it here.
    if (crashed && dev.installed_version() != 1) ++wrong_state;
    if (!crashed && dev.installed_version() != rec.version) ++wrong_state;
  };

  auto exercise = [&](std::size_t image_size, std::size_t partition_size, bool exhaustive,
                      std::size_t samples) {
    Bytes factory = testutil::random_bytes(rng, std::min<std::size_t>(512, partition_size / 2));
    auto base = device::Device::provision("lamp", "esp8266", partition_size, 0xfa57,
                                          as_view(factory), 1);
    Bytes image = testutil::random_bytes(rng, image_size);
    castore::Store store;
    registry::FirmwareRecord rec;
    rec.product_id = "lamp";
    rec.version = 2;
    rec.content_id = store.put(as_view(image)).digest;
    rec.firmware_digest = kernels::sha256(as_view(image));
    rec.target_model = "esp8266";

    if (exhaustive) {
      for (std::uint64_t off = 0; off < image_size; ++off)
        crash_run(base, image, rec, device::FaultPlan{off, false});
    } else {
      for (std::size_t i = 0; i < samples; ++i)
        crash_run(base, image, rec, device::FaultPlan{rng() % image_size, false});
    }
    crash_run(base, image, rec, device::FaultPlan{std::nullopt, true});  // the flip step
    crash_run(base, image, rec, device::FaultPlan{});                    // clean install
  };

  exercise(1, 4096, true, 0);
  exercise(1024, 8192, true, 0);
  exercise(1024 * 1024, 1024 * 1024, false, 1000);

  report(2, "atomic install under injected crashes",
         bricked == 0 && wrong_state == 0,
         std::to_string(runs) + " crash points, " + std::to_string(bricked) + " bricked, " +
             std::to_string(wrong_state) + " wrong-state");
}

// --------------------------------------------------------------------------
// 3. Multisig exhaustive subset oracle, N in 1..4.
// --------------------------------------------------------------------------
void criterion_3() {
  std::size_t cases = 0, mismatches = 0;
  for (std::uint32_t n = 1; n <= 4; ++n) {
    for (std::uint32_t m = 1; m <= n; ++m) {
      for (std::uint32_t subset = 0; subset < (1u << n); ++subset) {
        ++cases;
        const bool oracle = std::uint32_t(__builtin_popcount(subset)) >= m &&
                            __builtin_popcount(subset) > 0;

        Digest32 root = seed32(0x30);
        registry::RegistryState st;
        std::vector<multisig::OwnerKey> owners;
        for (std::uint32_t i = 0; i < n; ++i) owners.push_back(multisig::derive_owner(root, i));
        (void)st.apply(owners[0].address,
                       as_view(registry::encode_action(registry::Action(
                           registry::DeployAction{multisig::make_owner_set(root, n, m)}))));

        registry::FirmwareRecord rec;
        rec.product_id = "lamp";
        rec.version = 1;
        rec.content_id = seed32(1);
        rec.firmware_digest = seed32(2);
        rec.target_model = "esp8266";

        bool executed = false;
        bool first = true;
        std::uint64_t pid = 0;
        for (std::uint32_t i = 0; i < n; ++i) {
          if (!(subset & (1u << i))) continue;
          Result<registry::ApplyOutcome> res = first
              ? st.apply(owners[i].address,
                         as_view(registry::encode_action(registry::Action(
                             registry::ProposeAction{registry::make_publish_inner(rec)}))))
              : st.apply(owners[i].address,
                         as_view(registry::encode_action(
                             registry::Action(registry::ConfirmAction{pid}))));
          if (res.ok()) {
            if (first) pid = *res.value().proposal_id;
            executed = executed || res.value().published.has_value();
          }
          first = false;
        }
        if (executed != oracle) ++mismatches;
        if (st.get_latest("lamp").ok() != oracle) ++mismatches;
      }
    }
  }
  report(3, "multisig threshold matches the brute-force subset oracle", mismatches == 0,
         std::to_string(cases) + " subsets, " + std::to_string(mismatches) + " mismatches");
}

// --------------------------------------------------------------------------
// 4. Immutability: single-byte mutations over a 20-block chain.
// --------------------------------------------------------------------------
void criterion_4() {
  Chain chain;
  std::mt19937_64 rng(0x04);
  for (int b = 1; b < 20; ++b) {
    if (b % 3 != 0) {
      registry::FirmwareRecord rec;
      rec.product_id = "lamp";
      rec.version = std::uint64_t(b);
      rec.content_id = kernels::sha256(as_view(std::string_view("c")));
      rec.firmware_digest = kernels::sha256(as_view(std::string_view("f")));
      rec.target_model = "esp8266";
      chain.publish_2of3(rec, std::uint64_t(b / 3));
    }
    if (!chain.led.advance_block(std::uint64_t(b) * 15).ok()) {
      report(4, "immutability of historical blocks", false, "fixture build failed");
      return;
    }
  }
  if (chain.led.blocks().size() != 20 || !chain.led.verify_chain().ok) {
    report(4, "immutability of historical blocks", false, "fixture not clean");
    return;
  }

  std::size_t failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto blocks = chain.led.blocks();  // fresh copy
    std::size_t h = rng() % blocks.size();
    ledger::Block& victim = blocks[h];

    // Byte-addressable regions of every stored field.
    std::vector<std::pair<std::uint8_t*, std::size_t>> spans;
    spans.emplace_back(reinterpret_cast<std::uint8_t*>(&victim.height), 8);
    spans.emplace_back(victim.parent_digest.data(), 32);
    spans.emplace_back(reinterpret_cast<std::uint8_t*>(&victim.timestamp), 8);
    spans.emplace_back(victim.digest.data(), 32);
    for (auto& tx : victim.transactions) {
      spans.emplace_back(tx.sender.bytes.data(), tx.sender.bytes.size());
      spans.emplace_back(tx.sender_pubkey.x.data(), 32);
      spans.emplace_back(reinterpret_cast<std::uint8_t*>(&tx.nonce), 8);
      if (!tx.action.empty()) spans.emplace_back(tx.action.data(), tx.action.size());
      spans.emplace_back(tx.signature.r.data(), 32);
    }
    auto [ptr, len] = spans[rng() % spans.size()];
    ptr[rng() % len] ^= std::uint8_t(1u << (rng() % 8));

    auto verdict = ledger::verify_blocks(blocks);
    if (verdict.ok || verdict.first_bad_height != h) ++failures;
  }
  report(4, "every single-byte mutation breaks verification at its height", failures == 0,
         "200 mutations, " + std::to_string(failures) + " missed");
}

// --------------------------------------------------------------------------
// 5. Content-store tamper totality on a 3-level DAG.
// --------------------------------------------------------------------------
void criterion_5() {
  std::mt19937_64 rng(0x05);
  castore::Store store(16);  // tiny chunks force a 3-level DAG
  Bytes content = testutil::random_bytes(rng, 16 * 65);
  castore::ContentId id = store.put(as_view(content));

  auto stats = store.stats(id);
  if (!stats.ok() || stats.value().depth != 3) {
    report(5, "tamper totality over a 3-level DAG", false, "fixture DAG not 3 levels");
    return;
  }

  auto digests = store.node_digests();
  std::size_t flips = 0, escapes = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Digest32& victim = digests[rng() % digests.size()];
    Bytes original = *store.node_raw(victim);
    for (std::size_t bit = 0; bit < original.size() * 8; ++bit) {
      Bytes mutated = original;
      mutated[bit / 8] ^= std::uint8_t(1u << (bit % 8));
      store.overwrite_node_raw(victim, std::move(mutated));
      auto got = store.get(id);
      ++flips;
      if (got.ok()) {
        ++escapes;  // silent corruption: worst outcome
      } else if (got.error().code != Errc::tampered) {
        ++escapes;
      }
      store.overwrite_node_raw(victim, original);
    }
  }
  auto clean = store.get(id);
  bool restored = clean.ok() && clean.value() == content;
  report(5, "every bit flip in any node surfaces as Tampered", escapes == 0 && restored,
         std::to_string(flips) + " bit flips across 500 trials, " + std::to_string(escapes) +
             " escapes");
}

// --------------------------------------------------------------------------
// 6. Bootloader interop and golden-trace corruption.
// --------------------------------------------------------------------------
void criterion_6() {
  std::mt19937_64 rng(0x06);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t len = 1 + rng() % (64 * 1024);
    Bytes image = testutil::random_bytes(rng, len);
    bootldr::TargetProfile profile;
    bootldr::SimTarget target(profile);
    bootldr::SimLink link(target);
    bootldr::Flasher flasher(link);
    auto report_r = flasher.flash_firmware(
        as_view(image), bootldr::kDefaultFlashBase, profile.product_code,
        [&](std::uint32_t base, std::size_t n) {
          return to_bytes(target.flash().subspan(base - profile.flash_base, n));
        });
    if (!report_r.ok() || !report_r.value().digest_ok ||
        !(to_bytes(target.flash().subspan(0, len)) == image))
      ++mismatches;
  }

  // Golden 4-frame trace: get-id command, write command, address, data.
  Bytes image{0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77,
              0x88, 0x99, 0xaa, 0xbb, 0xcc, 0xdd, 0xee, 0xff};
  std::vector<Bytes> frames;
  {
    bootldr::TargetProfile profile;
    bootldr::SimTarget target(profile);
    bootldr::SimLink raw(target);
    bootldr::TracingLink traced(raw);
    bootldr::Flasher flasher(traced);
    bool ok = flasher.probe().ok() && flasher.get_id().ok() &&
              flasher.write_range(bootldr::kDefaultFlashBase, as_view(image)).ok();
    if (!ok || traced.frames().size() != 5) {
      report(6, "bootloader interop and frame-corruption rejection", false,
             "golden trace recording failed");
      return;
    }
    frames.assign(traced.frames().begin() + 1, traced.frames().end());  // skip the wake byte
  }

  std::size_t accepted_corruption = 0, corruptions = 0;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (std::size_t byte = 0; byte < frames[f].size(); ++byte) {
      ++corruptions;
      bootldr::TargetProfile profile;
      bootldr::SimTarget target(profile);
      Bytes out;
      Bytes wake{bootldr::kInit};
      target.feed(as_view(wake), out);

      bool nacked = false;
      for (std::size_t g = 0; g <= f; ++g) {
        Bytes frame = frames[g];
        if (g == f) frame[byte] ^= 0x01;
        out.clear();
        target.feed(as_view(frame), out);
        if (!out.empty() && out.back() == bootldr::kNack) {
          nacked = true;
          break;
        }
      }
      if (!nacked) ++accepted_corruption;
      if (to_bytes(target.flash().subspan(0, image.size())) == image) ++accepted_corruption;
    }
  }

  report(6, "bootloader interop and frame-corruption rejection",
         mismatches == 0 && accepted_corruption == 0,
         "100 images byte-identical (" + std::to_string(mismatches) + " bad), " +
             std::to_string(corruptions) + " corruptions all NACKed (" +
             std::to_string(accepted_corruption) + " escaped)");
}

// --------------------------------------------------------------------------
// 7. Call-timing ordering across block intervals.
// --------------------------------------------------------------------------
void criterion_7() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t interval : {1ull, 15ull, 60ull}) {
    ledger::ChainConfig cfg;
    cfg.block_interval = interval;
    auto r = bench::run_ledger_timing(cfg);
    bool this_ok = r.deploy_delay_s >= r.confirm_delay_s &&
                   r.confirm_delay_s > r.getter_delay_s &&
                   r.getter_delay_s > r.call_submit_delay_s;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "[i=%llu: %.0f>=%.0f>%.0f>%.0f] ",
                  static_cast<unsigned long long>(interval), r.deploy_delay_s, r.confirm_delay_s,
                  r.getter_delay_s, r.call_submit_delay_s);
    detail += buf;
    ok = ok && this_ok;
  }
  report(7, "deploy >= confirm > getter > call-submit for intervals {1,15,60}s", ok, detail);
}

// --------------------------------------------------------------------------
// 8. Qualitative latency comparison: single crossover, near origin wins direct.
// --------------------------------------------------------------------------
void criterion_8() {
  auto endpoints = castore::parse_endpoints(bench::default_endpoint_config());
  if (!endpoints.ok() || endpoints.value().size() != 4) {
    report(8, "latency crossover shape", false, "default endpoint config invalid");
    return;
  }
  std::mt19937_64 rng(0x08);
  castore::Store store;
  Bytes payload = testutil::random_bytes(rng, 512 * 1024);
  auto rows = bench::run_latency_bench(store, as_view(payload), endpoints.value());
  if (!rows.ok()) {
    report(8, "latency crossover shape", false, rows.error().message);
    return;
  }
  bool colocated_direct = rows.value().front().direct_ms <= rows.value().front().content_ms;
  std::size_t crossings = bench::count_crossovers(rows.value());
  report(8, "exactly one crossover as origin distance grows; co-located origin keeps direct",
         colocated_direct && crossings == 1,
         "crossovers=" + std::to_string(crossings) +
             (colocated_direct ? ", co-located direct <= content" : ", co-located INVERTED"));
}

// --------------------------------------------------------------------------
// 9. Hash-authenticator property over 10^4 random pairs.
// --------------------------------------------------------------------------
void criterion_9() {
  std::mt19937_64 rng(0x09);
  se::SecureElement el(0x09);
  std::size_t pairs = 0, violations = 0;
  for (int i = 0; i < 10000; ++i) {
    std::size_t len = 1 + rng() % 512;
    Bytes a = testutil::random_bytes(rng, len);
    Bytes b = a;
    ++pairs;
    if (!(el.sha256(as_view(a)) == el.sha256(as_view(b)))) ++violations;  // equal inputs
    b[rng() % len] ^= std::uint8_t(1 + rng() % 255);                      // now unequal
    if (el.sha256(as_view(a)) == el.sha256(as_view(b))) ++violations;
  }
  report(9, "H(a)=H(b) iff a=b over 10^4 random pairs", violations == 0,
         std::to_string(pairs) + " pairs, " + std::to_string(violations) + " violations");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();

  if (g_failed) {
    std::printf("%d criterion(s) FAILED\n", g_failed);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}

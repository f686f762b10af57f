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

// fwchain: one entry point over the toolkit. Every flow here is a thin
// composition of module operations; nothing below main() implements
// business rules of its own.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fwchain/bench.hpp"
#include "fwchain/bootloader.hpp"
#include "fwchain/codec.hpp"
#include "fwchain/device.hpp"
#include "fwchain/kernels/sha256.hpp"
#include "fwchain/workspace.hpp"

using namespace fwchain;
using nlohmann::json;

namespace {

struct CliError {
  Error error;
};

[[noreturn]] void fail(const Error& e) { throw CliError{e}; }

template <typename T>
T need(Result<T> r) {
  if (!r) fail(r.error());
  return r.take();
}

void need_ok(Result<void> r) {
  if (!r) fail(r.error());
}

Bytes read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(err(Errc::io_failure, "cannot open " + file.string()));
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& file, ByteView data) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(err(Errc::io_failure, "cannot write " + file.string()));
  out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
}

Digest32 parse_digest(const std::string& hex, const char* what) {
  auto d = digest_from_hex(hex);
  if (!d) fail(err(Errc::usage, std::string(what) + " must be 32 hex bytes"));
  return *d;
}

std::uint64_t parse_hex_u64(const std::string& text, const char* what) {
  try {
    return std::stoull(text, nullptr, 0);
  } catch (const std::exception&) {
    fail(err(Errc::usage, std::string(what) + ": cannot parse " + text));
  }
}

// ---------------------------------------------------------------------------
// keygen
// ---------------------------------------------------------------------------

void cmd_keygen(const std::string& root_hex, std::uint32_t index, bool json_out) {
  Digest32 root = parse_digest(root_hex, "--root");
  auto owner = multisig::derive_owner(root, index);
  if (json_out) {
    std::cout << json{{"index", index},
                      {"address", owner.address.hex()},
                      {"public_key", to_hex(as_view(owner.keys.pub.encoded()))}}
                     .dump()
              << "\n";
  } else {
    std::cout << owner.address.hex() << "\n";
  }
}

// ---------------------------------------------------------------------------
// publish / propose / confirm
// ---------------------------------------------------------------------------

void require_owner(const cli::Workspace& ws, const multisig::OwnerKey& signer) {
  const auto& st = ws.led.tip_state();
  if (st.deployed && !st.owner_set.is_owner(signer.address))
    fail(err(Errc::not_owner, "signer " + signer.address.hex() + " is not a wallet owner"));
  if (!st.deployed && signer.index >= ws.cfg.owner_count)
    fail(err(Errc::not_owner, "signer index beyond configured owner count"));
}

std::uint64_t submit_action(cli::Workspace& ws, const multisig::OwnerKey& signer, Bytes action) {
  auto tx = ledger::make_signed_transaction(signer.keys, ws.led.next_nonce(signer.address),
                                            std::move(action));
  return need(ws.submit(std::move(tx)));
}

void ensure_deployed(cli::Workspace& ws, const multisig::OwnerKey& signer) {
  if (ws.led.tip_state().deployed) return;
  std::cout << "deploying owner set (" << ws.cfg.threshold << "-of-" << ws.cfg.owner_count
            << ")\n";
  submit_action(ws, signer,
                registry::encode_action(registry::Action(registry::DeployAction{ws.owner_set()})));
}

void cmd_propose(const std::filesystem::path& root, registry::FirmwareRecord record,
                 std::uint32_t signer_index, const std::vector<std::uint32_t>& confirms,
                 bool advance, bool json_out) {
  auto ws = need(cli::Workspace::open(root));
  auto signer = ws.owner(signer_index);
  require_owner(ws, signer);
  ensure_deployed(ws, signer);

  std::uint64_t proposal_id = ws.predicted_next_proposal_id();
  std::uint64_t propose_rc = submit_action(
      ws, signer,
      registry::encode_action(registry::Action(registry::ProposeAction{
          registry::make_publish_inner(record)})));

  std::vector<std::uint64_t> confirm_rcs;
  for (auto idx : confirms) {
    auto co = ws.owner(idx);
    require_owner(ws, co);
    confirm_rcs.push_back(submit_action(
        ws, co, registry::encode_action(registry::Action(registry::ConfirmAction{proposal_id}))));
  }

  json out{{"content_id", to_hex(as_view(record.content_id))},
           {"firmware_digest", to_hex(as_view(record.firmware_digest))},
           {"proposal_id", proposal_id},
           {"propose_receipt", propose_rc},
           {"confirm_receipts", confirm_rcs},
           {"status", "pending"}};

  if (advance) {
    auto blocks = need(ws.advance(1));
    const ledger::Receipt* r = ws.led.receipt(propose_rc);
    bool ok = true;
    std::string detail;
    for (std::uint64_t rc : confirm_rcs) {
      const auto* cr = ws.led.receipt(rc);
      if (cr && cr->status == ledger::Receipt::Status::failed) {
        ok = false;
        detail = cr->error;
      }
    }
    if (r && r->status == ledger::Receipt::Status::failed) {
      ok = false;
      detail = r->error;
    }
    out["status"] = ok ? "confirmed" : "failed";
    out["block_height"] = blocks.back().height;
    if (!ok) {
      out["error"] = detail;
      std::cerr << out.dump(2) << "\n";
      fail(err(Errc::unauthorized, detail));
    }
  }

  if (json_out) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "content id:   " << out["content_id"].get<std::string>() << "\n"
              << "digest:       " << out["firmware_digest"].get<std::string>() << "\n"
              << "proposal id:  " << proposal_id << "\n"
              << "status:       " << out["status"].get<std::string>() << "\n";
  }
}

// ---------------------------------------------------------------------------
// chain
// ---------------------------------------------------------------------------

void cmd_chain_advance(const std::filesystem::path& root, std::uint64_t count) {
  auto ws = need(cli::Workspace::open(root));
  auto blocks = need(ws.advance(count));
  for (const auto& b : blocks)
    std::cout << "block " << b.height << " " << to_hex(as_view(b.digest)) << " txs="
              << b.transactions.size() << "\n";
  if (blocks.empty()) std::cout << "height " << ws.led.height() << " (no-op)\n";
}

void cmd_chain_inspect(const std::filesystem::path& root, bool json_out) {
  auto ws = need(cli::Workspace::open(root));
  if (json_out) {
    json blocks = json::array();
    for (const auto& b : ws.led.blocks())
      blocks.push_back(json{{"height", b.height},
                            {"digest", to_hex(as_view(b.digest))},
                            {"timestamp", b.timestamp},
                            {"transactions", b.transactions.size()}});
    std::cout << json{{"height", ws.led.height()},
                      {"pending", ws.led.pending_count()},
                      {"blocks", blocks}}
                     .dump(2)
              << "\n";
    return;
  }
  for (const auto& b : ws.led.blocks())
    std::cout << "block " << b.height << " " << to_hex(as_view(b.digest)) << " txs="
              << b.transactions.size() << " t=" << b.timestamp << "\n";
  std::cout << "pending: " << ws.led.pending_count() << "\n";
}

void cmd_chain_verify(const std::filesystem::path& root, bool json_out) {
  auto ws = need(cli::Workspace::open(root));
  auto report = ws.led.verify_chain();
  if (json_out) {
    std::cout << json{{"ok", report.ok},
                      {"first_bad_height", report.first_bad_height},
                      {"detail", report.detail}}
                     .dump()
              << "\n";
  } else if (report.ok) {
    std::cout << "chain ok, height " << ws.led.height() << "\n";
  } else {
    std::cout << "chain BROKEN at height " << report.first_bad_height << ": " << report.detail
              << "\n";
  }
  if (!report.ok) fail(err(Errc::chain_corrupt, report.detail));
}

// ---------------------------------------------------------------------------
// store
// ---------------------------------------------------------------------------

void cmd_store_put(const std::filesystem::path& root, const std::filesystem::path& file) {
  auto ws = need(cli::Workspace::open(root));
  Bytes content = read_file(file);
  auto id = ws.store().put(as_view(content));
  std::cout << id.hex() << "\n";
}

void cmd_store_get(const std::filesystem::path& root, const std::string& cid_hex,
                   const std::filesystem::path& out_file) {
  auto ws = need(cli::Workspace::open(root));
  auto id = need(castore::ContentId::from_hex_string(cid_hex));
  Bytes content = need(ws.store().get(id));
  write_file(out_file, as_view(content));
  std::cout << "wrote " << content.size() << " bytes\n";
}

void cmd_store_verify(const std::filesystem::path& root, const std::string& cid_hex) {
  auto ws = need(cli::Workspace::open(root));
  auto id = need(castore::ContentId::from_hex_string(cid_hex));
  need_ok(ws.store().verify(id));
  auto stats = need(ws.store().stats(id));
  std::cout << "ok: " << stats.node_count << " nodes, " << stats.content_bytes
            << " content bytes, depth " << stats.depth << "\n";
}

// ---------------------------------------------------------------------------
// agent
// ---------------------------------------------------------------------------

void cmd_agent_init(const std::filesystem::path& device_file, const std::string& product,
                    const std::string& model, std::uint64_t partition_size,
                    const std::string& image_file, std::uint64_t version,
                    std::uint64_t seed) {
  Bytes image;
  if (!image_file.empty()) {
    image = read_file(image_file);
  } else {
    image.assign(1024, 0x00);  // blank factory image
  }
  if (image.size() > partition_size)
    fail(err(Errc::insufficient_space, "factory image larger than partition"));

  auto dev = device::Device::provision(product, model, partition_size, seed, as_view(image),
                                       version);
  need_ok(dev.save(device_file));
  std::cout << "device " << product << " (" << model << ") v" << version << " -> "
            << device_file.string() << "\n";
}

json update_report_json(device::Device& dev, const device::UpdateOutcome& outcome,
                        std::uint64_t old_version) {
  const auto& pm = dev.meta().part[std::uint8_t(dev.meta().active)];
  json out{{"product", dev.meta().product_id},
           {"updated", outcome.updated},
           {"note", outcome.note},
           {"old_version", old_version},
           {"version", dev.installed_version()},
           {"active_digest", to_hex(as_view(pm.image_digest))}};

  // Attested report: the device identity key signs product/version/digest.
  Encoder e;
  e.put_string(dev.meta().product_id).put_u64(dev.installed_version()).put_digest(pm.image_digest);
  auto sig = dev.element().sign(device::kIdentityKeySlot, kernels::sha256(e.view()));
  if (sig.ok()) {
    out["attestation_key"] = to_hex(as_view(dev.identity_key().encoded()));
    out["attestation_sig"] = to_hex(as_view(sig.value().encoded()));
  }
  return out;
}

void cmd_agent_run(const std::filesystem::path& root, const std::filesystem::path& device_file,
                   bool once, std::uint64_t interval_s, bool json_out) {
  do {
    auto ws = need(cli::Workspace::open(root));
    auto dev = need(device::Device::load(device_file));
    device::LedgerRegistryClient client(ws.led);

    std::uint64_t old_version = dev.installed_version();
    auto outcome = need(dev.run_update_cycle(client, ws.store()));
    need_ok(dev.save(device_file));

    json report = update_report_json(dev, outcome, old_version);
    if (json_out) {
      std::cout << report.dump(2) << "\n";
    } else if (outcome.updated) {
      std::cout << "updated " << dev.meta().product_id << " v" << old_version << " -> v"
                << dev.installed_version() << " digest "
                << report["active_digest"].get<std::string>() << "\n";
    } else {
      std::cout << outcome.note << " (v" << dev.installed_version() << ")\n";
    }

    if (once) return;
    std::this_thread::sleep_for(std::chrono::seconds(interval_s));
  } while (true);
}

void cmd_agent_rollback(const std::filesystem::path& root,
                        const std::filesystem::path& device_file, std::uint64_t to_version) {
  auto ws = need(cli::Workspace::open(root));
  auto dev = need(device::Device::load(device_file));
  device::LedgerRegistryClient client(ws.led);

  auto report = need(dev.rollback(to_version, client, ws.store()));
  need_ok(dev.save(device_file));
  std::cout << "rolled back v" << report.old_version << " -> v" << report.new_version
            << " digest " << to_hex(as_view(report.image_digest)) << "\n";
}

// ---------------------------------------------------------------------------
// fleet
// ---------------------------------------------------------------------------

void cmd_fleet_simulate(std::size_t n_devices, const std::string& topology_name_str,
                        std::size_t image_size, bool json_out) {
  auto topology = need(device::topology_from_name(topology_name_str));

  // Self-contained round: publish v2 to an in-memory chain, provision the
  // fleet at v1, run one update pass.
  Digest32 root{};
  root.fill(0xf1);
  auto o0 = multisig::derive_owner(root, 0);
  auto o1 = multisig::derive_owner(root, 1);

  ledger::Ledger led;
  (void)led.submit(ledger::make_signed_transaction(
      o0.keys, 0,
      registry::encode_action(
          registry::Action(registry::DeployAction{multisig::make_owner_set(root, 3, 2)}))));

  std::mt19937_64 rng(0xf1ee7);
  castore::Store store;
  Bytes factory(1024, 0x00);
  Bytes image(image_size, 0x00);
  for (auto& b : image) b = std::uint8_t(rng());

  registry::FirmwareRecord rec;
  rec.product_id = "fleet-demo";
  rec.version = 2;
  rec.content_id = store.put(as_view(image)).digest;
  rec.firmware_digest = kernels::sha256(as_view(image));
  rec.target_model = "esp8266";

  (void)led.submit(ledger::make_signed_transaction(
      o0.keys, 1,
      registry::encode_action(
          registry::Action(registry::ProposeAction{registry::make_publish_inner(rec)}))));
  (void)led.submit(ledger::make_signed_transaction(
      o1.keys, 0, registry::encode_action(registry::Action(registry::ConfirmAction{0}))));
  (void)led.advance_block(15);

  std::vector<device::Device> fleet;
  for (std::size_t i = 0; i < n_devices; ++i)
    fleet.push_back(device::Device::provision("fleet-demo", "esp8266",
                                              std::max<std::size_t>(image_size * 2, 64 * 1024),
                                              0x1000 + i, as_view(factory), 1));

  device::LedgerRegistryClient client(led);
  auto report = device::simulate_fleet(topology, fleet, client, store);

  std::size_t booted = 0;
  for (auto& d : fleet)
    if (d.secure_boot().decision == device::BootDecision::booted_active) ++booted;

  if (json_out) {
    std::cout << json{{"topology", device::topology_name(report.topology)},
                      {"devices", report.devices},
                      {"updated", report.updated},
                      {"up_to_date", report.up_to_date},
                      {"failed", report.failed},
                      {"registry_queries", report.registry_queries},
                      {"content_fetches", report.content_fetches},
                      {"booted", booted}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "topology:          " << device::topology_name(report.topology) << "\n"
              << "devices:           " << report.devices << "\n"
              << "updated:           " << report.updated << "\n"
              << "failed:            " << report.failed << "\n"
              << "registry queries:  " << report.registry_queries << "\n"
              << "content fetches:   " << report.content_fetches << "\n"
              << "booted after:      " << booted << "\n";
  }
}

// ---------------------------------------------------------------------------
// flash
// ---------------------------------------------------------------------------

void cmd_flash(const std::filesystem::path& image_file, const std::string& base_hex,
               const std::string& port, const std::string& sim_profile,
               const std::string& expect_id_hex, int baud,
               const std::string& dump_out, bool json_out) {
  Bytes image = read_file(image_file);
  std::uint32_t base = std::uint32_t(parse_hex_u64(base_hex, "--base"));
  std::optional<std::uint16_t> expected_id;
  if (!expect_id_hex.empty())
    expected_id = std::uint16_t(parse_hex_u64(expect_id_hex, "--expect-id"));

  std::unique_ptr<bootldr::SimTarget> target;
  std::unique_ptr<bootldr::Link> link;
  if (!sim_profile.empty()) {
    Bytes profile_bytes = read_file(sim_profile);
    json profile = json::parse(std::string(profile_bytes.begin(), profile_bytes.end()), nullptr,
                               false);
    if (profile.is_discarded()) fail(err(Errc::parse_error, "bad simulator profile JSON"));
    bootldr::TargetProfile tp;
    if (profile.contains("product_code")) {
      if (profile["product_code"].is_string())
        tp.product_code =
            std::uint16_t(parse_hex_u64(profile["product_code"].get<std::string>(), "product_code"));
      else
        tp.product_code = profile["product_code"].get<std::uint16_t>();
    }
    if (profile.contains("flash_size")) tp.flash_size = profile["flash_size"].get<std::size_t>();
    if (profile.contains("flash_base"))
      tp.flash_base = std::uint32_t(
          parse_hex_u64(profile["flash_base"].is_string()
                            ? profile["flash_base"].get<std::string>()
                            : std::to_string(profile["flash_base"].get<std::uint64_t>()),
                        "flash_base"));
    if (profile.contains("write_protected"))
      tp.write_protected = profile["write_protected"].get<bool>();
    target = std::make_unique<bootldr::SimTarget>(tp);
    link = std::make_unique<bootldr::SimLink>(*target);
  } else if (!port.empty()) {
    link = need(bootldr::SerialLink::open(port, baud));
  } else {
    fail(err(Errc::usage, "flash needs --sim <profile> or --port <path>"));
  }

  bootldr::Flasher flasher(*link);
  std::function<Bytes(std::uint32_t, std::size_t)> dump_fn;
  if (target) {
    dump_fn = [&](std::uint32_t addr, std::size_t len) {
      return to_bytes(target->flash().subspan(addr - target->profile().flash_base, len));
    };
  }

  auto report = need(flasher.flash_firmware(as_view(image), base, expected_id, dump_fn));
  if (report.failed_frame >= 0)
    fail(err(Errc::nack, "frame " + std::to_string(report.failed_frame) + " failed: " +
                             report.failure));

  if (target && !dump_out.empty())
    write_file(dump_out, target->flash().subspan(base - target->profile().flash_base,
                                                 image.size()));

  if (json_out) {
    std::cout << json{{"frames", report.frames_total},
                      {"applied", report.frames_applied},
                      {"image_digest", to_hex(as_view(report.image_digest))},
                      {"readback_digest", to_hex(as_view(report.readback_digest))},
                      {"digest_ok", report.digest_ok}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "flashed " << image.size() << " bytes in " << report.frames_applied
              << " frames\n";
    if (target)
      std::cout << "readback digest " << (report.digest_ok ? "matches" : "MISMATCH") << ": "
                << to_hex(as_view(report.readback_digest)) << "\n";
  }
  if (target && !report.digest_ok) fail(err(Errc::digest_mismatch, "readback digest mismatch"));
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

void cmd_bench_latency(const std::string& config_file, std::uint64_t payload_size,
                       const std::filesystem::path& out_dir, bool json_out) {
  std::string config_text;
  if (!config_file.empty()) {
    Bytes raw = read_file(config_file);
    config_text.assign(raw.begin(), raw.end());
  } else {
    config_text = bench::default_endpoint_config();
  }
  auto endpoints = need(castore::parse_endpoints(config_text));

  std::mt19937_64 rng(0x1a7e);
  Bytes payload(payload_size);
  for (auto& b : payload) b = std::uint8_t(rng());

  castore::Store store;
  auto rows = need(bench::run_latency_bench(store, as_view(payload), endpoints));
  need_ok(bench::emit_report(rows, out_dir));

  if (json_out) {
    json out = json::array();
    for (const auto& r : rows)
      out.push_back(json{{"scenario", r.scenario},
                         {"payload_bytes", r.payload_bytes},
                         {"direct_ms", r.direct_ms},
                         {"content_ms", r.content_ms}});
    std::cout << json{{"rows", out}, {"crossovers", bench::count_crossovers(rows)}}.dump(2)
              << "\n";
  } else {
    std::cout << "scenario,payload_bytes,direct_ms,content_ms\n";
    for (const auto& r : rows)
      std::cout << r.scenario << ',' << r.payload_bytes << ',' << r.direct_ms << ','
                << r.content_ms << "\n";
    std::cout << "crossovers: " << bench::count_crossovers(rows) << "\n"
              << "report written to " << out_dir.string() << "\n";
  }
}

void cmd_bench_timing(std::uint64_t block_interval, std::uint32_t confirmations, bool json_out) {
  ledger::ChainConfig cfg;
  cfg.block_interval = block_interval;
  cfg.confirmations_required = confirmations;
  auto report = bench::run_ledger_timing(cfg);

  if (json_out) {
    std::cout << json{{"block_interval_s", report.block_interval_s},
                      {"confirmations", report.confirmations},
                      {"deploy_delay_s", report.deploy_delay_s},
                      {"call_submit_delay_s", report.call_submit_delay_s},
                      {"confirm_delay_s", report.confirm_delay_s},
                      {"getter_delay_s", report.getter_delay_s},
                      {"getter_wall_us", report.getter_wall_us}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << bench::timing_csv(report);
    std::cout << "# getter wall time: " << report.getter_wall_us << " us (local query)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized firmware update toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags are accepted after subcommands too

  std::string workspace = ".";
  app.add_option("--workspace", workspace, "workspace directory")->capture_default_str();

  bool json_out = false;
  std::string output_mode = "text";
  app.add_flag("--json", json_out, "machine-readable output");
  app.add_option("--output", output_mode, "output mode: text or json")
      ->check(CLI::IsMember({"text", "json"}));

  // keygen
  std::string kg_root;
  std::uint32_t kg_index = 0;
  auto* keygen = app.add_subcommand("keygen", "derive an owner address from a root seed");
  keygen->add_option("--root", kg_root, "root seed, 32 hex bytes")->required();
  keygen->add_option("--index", kg_index, "derivation index")->required();

  // publish
  std::string pb_file, pb_product, pb_model;
  std::uint64_t pb_version = 0;
  std::uint32_t pb_signer = 0;
  std::vector<std::uint32_t> pb_confirms;
  bool pb_advance = false;
  auto* publish = app.add_subcommand("publish", "store a firmware file and propose its record");
  publish->add_option("--file", pb_file, "firmware binary")->required();
  publish->add_option("--product", pb_product)->required();
  publish->add_option("--version", pb_version)->required();
  publish->add_option("--model", pb_model, "compatibility tag")->required();
  publish->add_option("--signer", pb_signer, "proposing owner index")->required();
  publish->add_option("--confirm", pb_confirms, "additional confirming owner indices");
  publish->add_flag("--advance", pb_advance, "produce a block immediately");

  // propose (record fields given directly; content must already be stored)
  std::string pr_product, pr_model, pr_cid, pr_digest;
  std::uint64_t pr_version = 0;
  std::uint32_t pr_signer = 0;
  auto* propose = app.add_subcommand("propose", "propose a publish for already-stored content");
  propose->add_option("--product", pr_product)->required();
  propose->add_option("--version", pr_version)->required();
  propose->add_option("--content-id", pr_cid)->required();
  propose->add_option("--digest", pr_digest)->required();
  propose->add_option("--model", pr_model)->required();
  propose->add_option("--signer", pr_signer)->required();

  // confirm
  std::uint64_t cf_proposal = 0;
  std::uint32_t cf_signer = 0;
  auto* confirm = app.add_subcommand("confirm", "confirm a pending proposal");
  confirm->add_option("--proposal", cf_proposal)->required();
  confirm->add_option("--signer", cf_signer)->required();

  // store
  auto* store_cmd = app.add_subcommand("store", "content store operations");
  store_cmd->require_subcommand(1);
  std::string sp_file;
  auto* store_put = store_cmd->add_subcommand("put", "add a file, print its content id");
  store_put->add_option("file", sp_file)->required();
  std::string sg_cid, sg_out;
  auto* store_get = store_cmd->add_subcommand("get", "retrieve verified content");
  store_get->add_option("cid", sg_cid)->required();
  store_get->add_option("-o,--out", sg_out)->required();
  std::string sv_cid;
  auto* store_verify = store_cmd->add_subcommand("verify", "verify a stored DAG");
  store_verify->add_option("cid", sv_cid)->required();

  // chain
  auto* chain = app.add_subcommand("chain", "simulated ledger operations");
  chain->require_subcommand(1);
  std::uint64_t ca_count = 1;
  auto* chain_advance = chain->add_subcommand("advance", "produce blocks");
  chain_advance->add_option("--count", ca_count)->capture_default_str();
  auto* chain_inspect = chain->add_subcommand("inspect", "print block summaries");
  auto* chain_verify = chain->add_subcommand("verify", "re-check digests and linkage");

  // agent
  auto* agent = app.add_subcommand("agent", "device agent operations");
  agent->require_subcommand(1);
  std::string ai_device, ai_product, ai_model, ai_image;
  std::uint64_t ai_psize = 4 * 1024 * 1024, ai_version = 1, ai_seed = 0;
  bool ai_seed_set = false;
  auto* agent_init = agent->add_subcommand("init", "provision a device state file");
  agent_init->add_option("--device", ai_device)->required();
  agent_init->add_option("--product", ai_product)->required();
  agent_init->add_option("--model", ai_model)->required();
  agent_init->add_option("--partition-size", ai_psize)->capture_default_str();
  agent_init->add_option("--image", ai_image, "factory image file");
  agent_init->add_option("--version", ai_version)->capture_default_str();
  agent_init->add_option("--seed", ai_seed)->each([&](const std::string&) { ai_seed_set = true; });

  std::string ar_device;
  bool ar_once = false;
  std::uint64_t ar_interval = 0;
  auto* agent_run = agent->add_subcommand("run", "poll, download, verify, install");
  agent_run->add_option("--device", ar_device)->required();
  agent_run->add_flag("--once", ar_once);
  agent_run->add_option("--interval", ar_interval, "poll interval, seconds");

  std::string ab_device;
  std::uint64_t ab_to = 0;
  auto* agent_rollback = agent->add_subcommand("rollback", "reinstall a historical version");
  agent_rollback->add_option("--device", ab_device)->required();
  agent_rollback->add_option("--to", ab_to)->required();

  // fleet
  auto* fleet = app.add_subcommand("fleet", "fleet simulation");
  fleet->require_subcommand(1);
  std::size_t fs_devices = 10;
  std::string fs_topology = "edge-cloud";
  std::size_t fs_image_size = 16 * 1024;
  auto* fleet_sim = fleet->add_subcommand("simulate", "run one update round over N devices");
  fleet_sim->add_option("--devices", fs_devices)->capture_default_str();
  fleet_sim->add_option("--topology", fs_topology,
                        "edge-cloud | gateway-cloud | edge-gateway-cloud")
      ->capture_default_str();
  fleet_sim->add_option("--image-size", fs_image_size)->capture_default_str();

  // flash
  std::string fl_image, fl_base = "0x08000000", fl_port, fl_sim, fl_expect, fl_dump;
  int fl_baud = 115200;
  auto* flash = app.add_subcommand("flash", "flash an image over the bootloader link");
  flash->add_option("--image", fl_image)->required();
  flash->add_option("--base", fl_base)->capture_default_str();
  flash->add_option("--port", fl_port, "serial port of a physical target");
  flash->add_option("--sim", fl_sim, "simulated target profile (JSON)");
  flash->add_option("--expect-id", fl_expect, "required product code");
  flash->add_option("--baud", fl_baud)->capture_default_str();
  flash->add_option("--dump-out", fl_dump, "write the flashed region to a file (sim only)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "latency and timing experiments");
  bench_cmd->require_subcommand(1);
  std::string bl_config, bl_out = "bench-out";
  std::uint64_t bl_payload = 1024 * 1024;
  auto* bench_latency = bench_cmd->add_subcommand("latency", "direct vs content-addressed");
  bench_latency->add_option("--config", bl_config, "endpoint table file");
  bench_latency->add_option("--payload", bl_payload)->capture_default_str();
  bench_latency->add_option("-o,--out", bl_out)->capture_default_str();
  std::uint64_t bt_interval = 15;
  std::uint32_t bt_conf = 1;
  auto* bench_timing = bench_cmd->add_subcommand("timing", "registry call delays");
  bench_timing->add_option("--block-interval", bt_interval)->capture_default_str();
  bench_timing->add_option("--confirmations", bt_conf)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  if (output_mode == "json") json_out = true;

  try {
    if (*keygen) {
      cmd_keygen(kg_root, kg_index, json_out);
    } else if (*publish) {
      auto ws = need(cli::Workspace::open(workspace));
      Bytes content = read_file(pb_file);
      registry::FirmwareRecord rec;
      rec.product_id = pb_product;
      rec.version = pb_version;
      rec.firmware_digest = kernels::sha256(as_view(content));
      rec.target_model = pb_model;
      {
        // Content persists in the store even if the proposal later fails.
        auto signer = ws.owner(pb_signer);
        require_owner(ws, signer);
        rec.content_id = ws.store().put(as_view(content)).digest;
      }
      cmd_propose(workspace, rec, pb_signer, pb_confirms, pb_advance, json_out);
    } else if (*propose) {
      registry::FirmwareRecord rec;
      rec.product_id = pr_product;
      rec.version = pr_version;
      rec.content_id = parse_digest(pr_cid, "--content-id");
      rec.firmware_digest = parse_digest(pr_digest, "--digest");
      rec.target_model = pr_model;
      cmd_propose(workspace, rec, pr_signer, {}, false, json_out);
    } else if (*confirm) {
      auto ws = need(cli::Workspace::open(workspace));
      auto signer = ws.owner(cf_signer);
      require_owner(ws, signer);
      auto rc = submit_action(
          ws, signer,
          registry::encode_action(registry::Action(registry::ConfirmAction{cf_proposal})));
      std::cout << "confirm queued, receipt " << rc << "\n";
    } else if (*store_put) {
      cmd_store_put(workspace, sp_file);
    } else if (*store_get) {
      cmd_store_get(workspace, sg_cid, sg_out);
    } else if (*store_verify) {
      cmd_store_verify(workspace, sv_cid);
    } else if (*chain_advance) {
      cmd_chain_advance(workspace, ca_count);
    } else if (*chain_inspect) {
      cmd_chain_inspect(workspace, json_out);
    } else if (*chain_verify) {
      cmd_chain_verify(workspace, json_out);
    } else if (*agent_init) {
      if (!ai_seed_set) ai_seed = std::random_device{}();
      cmd_agent_init(ai_device, ai_product, ai_model, ai_psize, ai_image, ai_version, ai_seed);
    } else if (*agent_run) {
      if (!ar_once && ar_interval == 0)
        fail(err(Errc::usage, "agent run needs --once or --interval <s>"));
      cmd_agent_run(workspace, ar_device, ar_once, ar_interval, json_out);
    } else if (*agent_rollback) {
      cmd_agent_rollback(workspace, ab_device, ab_to);
    } else if (*fleet_sim) {
      cmd_fleet_simulate(fs_devices, fs_topology, fs_image_size, json_out);
    } else if (*flash) {
      cmd_flash(fl_image, fl_base, fl_port, fl_sim, fl_expect, fl_baud, fl_dump, json_out);
    } else if (*bench_latency) {
      cmd_bench_latency(bl_config, bl_payload, bl_out, json_out);
    } else if (*bench_timing) {
      cmd_bench_timing(bt_interval, bt_conf, json_out);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << errc_name(e.error.code) << ": " << e.error.message << "\n";
    return cli::exit_code_for(e.error.code);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

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

#include "fwchain/workspace.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "fwchain/kernels/sha256.hpp"

namespace fwchain::cli {

namespace {

Result<std::string> read_text(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return err(Errc::io_failure, "cannot open " + file.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Result<void> write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) return err(Errc::io_failure, "cannot write " + file.string());
  out << text;
  return {};
}

}  // namespace

std::string render_config(const WorkspaceConfig& cfg) {
  std::ostringstream os;
  os << "# fwchain workspace configuration\n"
     << "# owner_root is a wallet seed kept in the clear: SIMULATION ONLY\n"
     << "chain_file=" << cfg.chain_file << "\n"
     << "pending_file=" << cfg.pending_file << "\n"
     << "store_dir=" << cfg.store_dir << "\n"
     << "device_dir=" << cfg.device_dir << "\n"
     << "owner_root=" << to_hex(as_view(cfg.owner_root)) << "\n"
     << "owner_count=" << cfg.owner_count << "\n"
     << "threshold=" << cfg.threshold << "\n"
     << "block_interval=" << cfg.block_interval << "\n"
     << "confirmations=" << cfg.confirmations << "\n"
     << "chunk_size=" << cfg.chunk_size << "\n";
  return os.str();
}

Result<WorkspaceConfig> parse_config(const std::filesystem::path& root, const std::string& text) {
  WorkspaceConfig cfg;
  cfg.root = root;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      return err(Errc::parse_error, "workspace.conf line " + std::to_string(lineno));
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    try {
      if (key == "chain_file") cfg.chain_file = value;
      else if (key == "pending_file") cfg.pending_file = value;
      else if (key == "store_dir") cfg.store_dir = value;
      else if (key == "device_dir") cfg.device_dir = value;
      else if (key == "owner_root") {
        auto d = digest_from_hex(value);
        if (!d) return err(Errc::parse_error, "owner_root must be 32 hex bytes");
        cfg.owner_root = *d;
      } else if (key == "owner_count") cfg.owner_count = std::uint32_t(std::stoul(value));
      else if (key == "threshold") cfg.threshold = std::uint32_t(std::stoul(value));
      else if (key == "block_interval") cfg.block_interval = std::stoull(value);
      else if (key == "confirmations") cfg.confirmations = std::uint32_t(std::stoul(value));
      else if (key == "chunk_size") cfg.chunk_size = std::stoull(value);
      else return err(Errc::parse_error, "unknown workspace key: " + key);
    } catch (const std::exception&) {
      return err(Errc::parse_error, "bad value for " + key);
    }
  }
  if (cfg.owner_count == 0 || cfg.threshold == 0 || cfg.threshold > cfg.owner_count)
    return err(Errc::parse_error, "threshold must satisfy 1 <= M <= owner_count");
  if (cfg.block_interval == 0) return err(Errc::parse_error, "block_interval must be > 0");
  return cfg;
}

Result<WorkspaceConfig> load_or_init_config(const std::filesystem::path& root) {
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) return err(Errc::io_failure, "cannot create workspace " + root.string());

  auto conf_file = root / "workspace.conf";
  if (std::filesystem::exists(conf_file)) {
    auto text = read_text(conf_file);
    if (!text) return text.error();
    return parse_config(root, text.value());
  }

  WorkspaceConfig cfg;
  cfg.root = root;
  std::random_device rd;
  for (std::size_t i = 0; i < cfg.owner_root.size(); ++i)
    cfg.owner_root[i] = std::uint8_t(rd());
  if (auto w = write_text(conf_file, render_config(cfg)); !w) return w.error();
  return cfg;
}

Result<Workspace> Workspace::open(const std::filesystem::path& root) {
  auto cfg = load_or_init_config(root);
  if (!cfg) return cfg.error();

  ledger::Ledger led(cfg.value().chain_config());
  if (std::filesystem::exists(cfg.value().chain_path())) {
    auto blocks = ledger::read_block_log(cfg.value().chain_path());
    if (!blocks) return blocks.error();
    if (!blocks.value().empty()) {
      auto replayed = ledger::Ledger::replay(blocks.value(), cfg.value().chain_config());
      if (!replayed) return replayed.error();
      led = replayed.take();
    }
  } else {
    // Fresh chain: persist the genesis block so the log is replayable.
    if (auto a = ledger::append_block_to_log(cfg.value().chain_path(), led.blocks()[0]); !a)
      return a.error();
  }

  Workspace ws(cfg.take(), std::move(led));
  if (auto attach = ws.store().attach_dir(ws.cfg.store_path()); !attach) return attach.error();
  ws.predicted_next_proposal_ = ws.led.tip_state().next_proposal_id;

  // Re-queue the pending pool persisted by earlier invocations, keeping the
  // proposal-id prediction in step (single-writer workspace, so exact).
  if (std::filesystem::exists(ws.cfg.pending_path())) {
    std::ifstream in(ws.cfg.pending_path(), std::ios::binary);
    for (;;) {
      std::uint8_t len[4];
      in.read(reinterpret_cast<char*>(len), 4);
      if (in.gcount() != 4) break;
      Bytes body(get_be32(len));
      in.read(reinterpret_cast<char*>(body.data()), std::streamsize(body.size()));
      if (in.gcount() != std::streamsize(body.size()))
        return err(Errc::parse_error, "truncated pending pool");
      auto tx = ledger::Transaction::decode(as_view(body));
      if (!tx) return tx.error();
      auto action = registry::decode_action(as_view(tx.value().action));
      if (action.ok() && std::holds_alternative<registry::ProposeAction>(action.value()))
        ws.predicted_next_proposal_++;
      auto submitted = ws.led.submit(tx.take());
      if (!submitted) return submitted.error();
    }
  }
  return ws;
}

multisig::OwnerKey Workspace::owner(std::uint32_t index) const {
  return multisig::derive_owner(cfg.owner_root, index);
}

registry::OwnerSet Workspace::owner_set() const {
  return multisig::make_owner_set(cfg.owner_root, cfg.owner_count, cfg.threshold);
}

Result<void> Workspace::persist_pending(const ledger::Transaction& tx) {
  std::ofstream out(cfg.pending_path(), std::ios::binary | std::ios::app);
  if (!out) return err(Errc::io_failure, "cannot append to pending pool");
  Bytes body = tx.encoded();
  std::uint8_t len[4];
  put_be32(len, std::uint32_t(body.size()));
  out.write(reinterpret_cast<const char*>(len), 4);
  out.write(reinterpret_cast<const char*>(body.data()), std::streamsize(body.size()));
  if (!out) return err(Errc::io_failure, "short write to pending pool");
  return {};
}

Result<std::uint64_t> Workspace::submit(ledger::Transaction tx) {
  auto decoded_action = registry::decode_action(as_view(tx.action));
  auto id = led.submit(tx);
  if (!id) return id.error();
  if (auto p = persist_pending(tx); !p) return p.error();
  if (decoded_action.ok() &&
      std::holds_alternative<registry::ProposeAction>(decoded_action.value()))
    predicted_next_proposal_++;
  return id.value();
}

Result<std::vector<ledger::Block>> Workspace::advance(std::uint64_t count) {
  std::vector<ledger::Block> produced;
  for (std::uint64_t i = 0; i < count; ++i) {
    auto b = led.advance_block(led.last_timestamp() + cfg.block_interval);
    if (!b) return b.error();
    if (auto a = ledger::append_block_to_log(cfg.chain_path(), b.value()); !a) return a.error();
    produced.push_back(b.take());
  }
  std::error_code ec;
  std::filesystem::remove(cfg.pending_path(), ec);
  predicted_next_proposal_ = led.tip_state().next_proposal_id;
  return produced;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ok:
      return 0;
    case Errc::bad_signature:
    case Errc::bad_nonce:
    case Errc::too_early:
    case Errc::unknown_call:
    case Errc::chain_corrupt:
      return 2;  // ledger family
    case Errc::not_owner:
    case Errc::unknown_proposal:
    case Errc::already_executed:
    case Errc::already_deployed:
    case Errc::not_deployed:
    case Errc::unauthorized:
      return 3;  // authorization family
    case Errc::version_not_monotonic:
    case Errc::malformed_record:
    case Errc::not_found:
      return 4;  // registry family
    case Errc::tampered:
      return 5;  // content store family
    case Errc::bad_slot:
    case Errc::slot_locked:
    case Errc::wrong_slot_kind:
    case Errc::out_of_bounds:
    case Errc::invalid_peer_key:
      return 6;  // secure element family
    case Errc::registry_unavailable:
    case Errc::incompatible_model:
    case Errc::download_failed:
    case Errc::digest_mismatch:
    case Errc::insufficient_space:
    case Errc::write_failure:
    case Errc::invalid_plan:
      return 7;  // device family
    case Errc::no_response:
    case Errc::nack:
    case Errc::id_mismatch:
    case Errc::write_protected:
    case Errc::bad_checksum:
    case Errc::out_of_range:
      return 8;  // bootloader family
    case Errc::usage:
      return 9;
    case Errc::io_failure:
    case Errc::parse_error:
      return 1;
  }
  return 1;
}

}  // namespace fwchain::cli

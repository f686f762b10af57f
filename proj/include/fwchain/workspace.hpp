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

#include <filesystem>
#include <memory>
#include <optional>

#include "fwchain/castore.hpp"
#include "fwchain/device.hpp"
#include "fwchain/ledger.hpp"

// CLI-side workspace: a directory holding the chain log, the pending pool,
// the content store and device state files, wired together behind one
// key=value config. All business logic stays in the modules; this is
// plumbing the command layer shares.

namespace fwchain::cli {

struct WorkspaceConfig {
  std::filesystem::path root;

  std::string chain_file = "chain.log";
  std::string pending_file = "pending.log";
  std::string store_dir = "store";
  std::string device_dir = "devices";
  Digest32 owner_root{};  // wallet seed; kept in the clear, simulation only
  std::uint32_t owner_count = 3;
  std::uint32_t threshold = 2;
  std::uint64_t block_interval = 15;
  std::uint32_t confirmations = 1;
  std::uint64_t chunk_size = castore::kDefaultChunkSize;

  std::filesystem::path chain_path() const { return root / chain_file; }
  std::filesystem::path pending_path() const { return root / pending_file; }
  std::filesystem::path store_path() const { return root / store_dir; }
  std::filesystem::path device_path() const { return root / device_dir; }

  ledger::ChainConfig chain_config() const {
    return ledger::ChainConfig{block_interval, confirmations};
  }
};

// Parse or create <root>/workspace.conf. A fresh workspace gets a random
// owner root seed.
Result<WorkspaceConfig> load_or_init_config(const std::filesystem::path& root);
Result<WorkspaceConfig> parse_config(const std::filesystem::path& root, const std::string& text);
std::string render_config(const WorkspaceConfig& cfg);

class Workspace {
 public:
  // Replays the chain log and re-queues the persisted pending pool.
  static Result<Workspace> open(const std::filesystem::path& root);

  WorkspaceConfig cfg;
  ledger::Ledger led;

  castore::Store& store() { return *store_; }

  multisig::OwnerKey owner(std::uint32_t index) const;
  registry::OwnerSet owner_set() const;

  // Submit + persist to the pending pool (survives between invocations).
  Result<std::uint64_t> submit(ledger::Transaction tx);

  // Produce count blocks at block_interval steps, appending each to the
  // chain log and clearing the persisted pool.
  Result<std::vector<ledger::Block>> advance(std::uint64_t count);

  // The proposal id the next propose in the pool will be assigned, given
  // single-writer discipline: committed counter plus proposals already
  // pending.
  std::uint64_t predicted_next_proposal_id() const { return predicted_next_proposal_; }

 private:
  Workspace(WorkspaceConfig config, ledger::Ledger ledger)
      : cfg(std::move(config)),
        led(std::move(ledger)),
        store_(std::make_unique<castore::Store>(cfg.chunk_size)) {}

  Result<void> persist_pending(const ledger::Transaction& tx);

  std::unique_ptr<castore::Store> store_;
  std::uint64_t predicted_next_proposal_ = 0;
};

// Stable exit codes per error family.
int exit_code_for(Errc code);

}  // namespace fwchain::cli

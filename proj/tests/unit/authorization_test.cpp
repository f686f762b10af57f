#include <doctest.h>

#include <random>

#include "fwchain/kernels/sha256.hpp"
#include "fwchain/ledger.hpp"
#include "support/testutil.hpp"

using namespace fwchain;
using namespace fwchain::ledger;

// Authorization completeness: enumerate every confirmed block and check
// that registry mutations map 1:1 onto executed proposals -- no record
// without a proposal, no proposal executing twice.

TEST_CASE("every confirmed registry mutation pairs with exactly one executed proposal") {
  Digest32 root{};
  root.fill(0x5a);
  std::vector<multisig::OwnerKey> owners;
  for (std::uint32_t i = 0; i < 3; ++i) owners.push_back(multisig::derive_owner(root, i));
  auto stranger = multisig::derive_owner(root, 9);

  Ledger led;
  auto submit = [&](const multisig::OwnerKey& who, Bytes action) {
    auto tx = make_signed_transaction(who.keys, led.next_nonce(who.address), std::move(action));
    REQUIRE(led.submit(std::move(tx)).ok());
  };
  submit(owners[0],
         registry::encode_action(
             registry::Action(registry::DeployAction{multisig::make_owner_set(root, 3, 2)})));

  std::mt19937_64 rng(0xa01);
  std::uint64_t version = 0;
  std::uint64_t next_pid = 0;
  std::uint64_t t = 0;
  for (int round = 0; round < 12; ++round) {
    // A mix of honest publishes, duplicate confirms, non-owner attempts,
    // direct publish bypasses and stale versions.
    version += 1 + rng() % 3;
    registry::FirmwareRecord rec;
    rec.product_id = (rng() % 2) ? "lamp" : "sensor";
    rec.version = version;
    rec.content_id = kernels::sha256(as_view(std::string_view("c")));
    rec.firmware_digest = kernels::sha256(as_view(std::string_view("f")));
    rec.target_model = "esp8266";

    std::uint64_t pid = next_pid++;
    std::size_t proposer = rng() % 3;
    submit(owners[proposer],
           registry::encode_action(
               registry::Action(registry::ProposeAction{registry::make_publish_inner(rec)})));
    submit(owners[(proposer + 1) % 3],
           registry::encode_action(registry::Action(registry::ConfirmAction{pid})));
    if (rng() % 2)  // extra confirm after execution: must not re-execute
      submit(owners[(proposer + 2) % 3],
             registry::encode_action(registry::Action(registry::ConfirmAction{pid})));
    if (rng() % 3 == 0) {  // direct publish bypass: rejected at application
      rec.version = version + 100;
      submit(owners[proposer],
             registry::encode_action(registry::Action(registry::PublishAction{rec})));
    }
    if (rng() % 3 == 0) {  // non-owner proposal: rejected at application
      submit(stranger,
             registry::encode_action(
                 registry::Action(registry::ProposeAction{registry::make_publish_inner(rec)})));
    }
    t += 15;
    REQUIRE(led.advance_block(t).ok());
  }

  const registry::RegistryState& st = led.tip_state();
  std::size_t records = 0;
  for (const auto& [product, history] : st.records) records += history.size();
  std::size_t executed = 0;
  for (const auto& [id, proposal] : st.proposals)
    if (proposal.executed) ++executed;

  CHECK(records == executed);
  CHECK(records == 12);  // every honest publish landed exactly once

  // Cross-check against the blocks themselves: replaying the chain from its
  // transaction log reproduces the same mapping.
  auto replayed = Ledger::replay(led.blocks(), ChainConfig{});
  REQUIRE(replayed.ok());
  std::size_t replay_records = 0;
  for (const auto& [product, history] : replayed.value().tip_state().records)
    replay_records += history.size();
  CHECK(replay_records == records);
  CHECK(replayed.value().verify_chain().ok);
}

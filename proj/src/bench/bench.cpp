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

#include "fwchain/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fwchain/kernels/sha256.hpp"

namespace fwchain::bench {

namespace {

Digest32 bench_seed() {
  Digest32 s{};
  s.fill(0xbe);
  return s;
}

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

TimingReport run_ledger_timing(ledger::ChainConfig cfg, const TimingModel& model) {
  TimingReport report;
  report.block_interval_s = cfg.block_interval;
  report.confirmations = cfg.confirmations_required;

  const double rtt = 2.0 * model.rpc_one_way_s;

  ledger::Ledger led(cfg);
  auto owner = multisig::derive_owner(bench_seed(), 0);

  // Both transactions are submitted at t=0; they reach the node after one
  // one-way latency and land in the first block at or after that instant.
  auto deploy_tx = ledger::make_signed_transaction(
      owner.keys, 0,
      registry::encode_action(
          registry::Action(registry::DeployAction{multisig::make_owner_set(bench_seed(), 1, 1)})));
  registry::FirmwareRecord rec;
  rec.product_id = "bench";
  rec.version = 1;
  rec.content_id = kernels::sha256(as_view(std::string_view("bench-content")));
  rec.firmware_digest = kernels::sha256(as_view(std::string_view("bench-image")));
  rec.target_model = "bench-model";
  auto call_tx = ledger::make_signed_transaction(
      owner.keys, 1,
      registry::encode_action(
          registry::Action(registry::ProposeAction{registry::make_publish_inner(rec)})));

  const double arrival = model.rpc_one_way_s;
  std::uint64_t t = 0;
  bool submitted = false;
  double confirmed_at = 0;
  for (;;) {
    t += cfg.block_interval;
    if (!submitted && double(t) >= arrival) {
      // The node first sees both transactions one one-way latency after
      // the client fired them; they join the first block produced after
      // that instant.
      (void)led.submit(deploy_tx);
      (void)led.submit(call_tx);
      submitted = true;
    }
    (void)led.advance_block(t);
    if (submitted && led.query(ledger::GetLatest{"bench"}).ok()) {
      confirmed_at = double(t);
      break;
    }
  }

  report.call_submit_delay_s = rtt;
  report.getter_delay_s = rtt + model.query_exec_s;
  report.confirm_delay_s = confirmed_at + rtt + model.query_exec_s;
  report.deploy_delay_s = report.confirm_delay_s + model.deploy_extra_s;

  auto began = std::chrono::steady_clock::now();
  (void)led.query(ledger::GetLatest{"bench"});
  auto ended = std::chrono::steady_clock::now();
  report.getter_wall_us =
      std::chrono::duration_cast<std::chrono::nanoseconds>(ended - began).count() / 1000.0;
  return report;
}

Result<std::vector<LatencyRow>> run_latency_bench(castore::Store& store, ByteView payload,
                                                  std::vector<castore::PeerEndpoint> endpoints) {
  if (endpoints.empty()) return err(Errc::usage, "no endpoints configured");
  if (payload.empty()) return err(Errc::usage, "payload must be at least 1 byte");

  castore::ContentId id = store.put(payload);
  for (auto& e : endpoints) e.holds.insert(id);

  std::stable_sort(endpoints.begin(), endpoints.end(),
                   [](const auto& a, const auto& b) {
                     return a.one_way_latency_ms < b.one_way_latency_ms;
                   });
  const castore::PeerEndpoint& near = endpoints.front();

  std::vector<LatencyRow> rows;
  for (const auto& origin : endpoints) {
    // The same payload for every case; the serving peer set is the fixed
    // near endpoint plus the origin itself.
    auto t = castore::fetch_timed(store, id, {near, origin}, origin);
    if (!t) return t.error();
    rows.push_back(LatencyRow{origin.name, payload.size(), t.value().direct_ms,
                              t.value().content_addressed_ms});
  }
  return rows;
}

std::size_t count_crossovers(const std::vector<LatencyRow>& rows) {
  std::size_t flips = 0;
  bool have_prev = false;
  bool prev_content_wins = false;
  for (const auto& r : rows) {
    bool content_wins = r.content_ms < r.direct_ms;
    if (have_prev && content_wins != prev_content_wins) ++flips;
    prev_content_wins = content_wins;
    have_prev = true;
  }
  return flips;
}

Result<void> emit_report(const std::vector<LatencyRow>& rows, const std::filesystem::path& dir) {
  if (rows.empty()) return err(Errc::io_failure, "no results to report");

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return err(Errc::io_failure, "cannot create " + dir.string());

  {
    std::ofstream csv(dir / "latency.csv", std::ios::trunc);
    if (!csv) return err(Errc::io_failure, "cannot write latency.csv");
    csv << "scenario,payload_bytes,direct_ms,content_ms\n";
    for (const auto& r : rows)
      csv << r.scenario << ',' << r.payload_bytes << ',' << fmt3(r.direct_ms) << ','
          << fmt3(r.content_ms) << '\n';
  }
  {
    std::ofstream dat(dir / "latency.dat", std::ios::trunc);
    if (!dat) return err(Errc::io_failure, "cannot write latency.dat");
    dat << "# index scenario direct_ms content_ms\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
      dat << i << ' ' << rows[i].scenario << ' ' << fmt3(rows[i].direct_ms) << ' '
          << fmt3(rows[i].content_ms) << '\n';
  }
  return {};
}

std::string timing_csv(const TimingReport& r) {
  std::string out = "name,simulated_s\n";
  out += "contract_deploy," + fmt3(r.deploy_delay_s) + "\n";
  out += "transaction_call," + fmt3(r.call_submit_delay_s) + "\n";
  out += "transaction_confirm," + fmt3(r.confirm_delay_s) + "\n";
  out += "getter_call," + fmt3(r.getter_delay_s) + "\n";
  return out;
}

std::string default_endpoint_config() {
  // Synthetic values shaped like a caller in one city with endpoints at
  // increasing distance. Editable; asserted only for ordering and
  // crossover shape, never as measurements.
  return "# name one_way_latency_ms bandwidth_Bps\n"
         "local-metro 4 1310720\n"
         "regional 28 1310720\n"
         "continental 85 1310720\n"
         "overseas 170 1310720\n";
}

}  // namespace fwchain::bench

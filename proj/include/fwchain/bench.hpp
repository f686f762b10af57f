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
#include <string>
#include <vector>

#include "fwchain/castore.hpp"
#include "fwchain/ledger.hpp"

// Desk-scale reproduction of the latency experiments: registry call timing
// under simulated block production, and the direct-vs-content-addressed
// download comparison. Absolute times from live-network runs are not
// reproducible here; the assertable claims are the orderings and the
// crossover shape, so that is what these benches expose.

namespace fwchain::bench {

// Synthetic client<->node network model. Defaults are editable and are not
// ground truth; they only shape the simulated delays.
struct TimingModel {
  double rpc_one_way_s = 2.0;    // client to node, one way
  double query_exec_s = 3.0;     // node-side read execution
  double deploy_extra_s = 40.0;  // contract initialization overhead
};

struct TimingReport {
  std::uint64_t block_interval_s = 0;
  std::uint32_t confirmations = 0;
  double deploy_delay_s = 0;       // deploy tx: submit -> confirmed + receipt fetch
  double call_submit_delay_s = 0;  // submit round trip only
  double confirm_delay_s = 0;      // call tx: submit -> confirmed + receipt fetch
  double getter_delay_s = 0;       // keyless read round trip, no block involved
  double getter_wall_us = 0;       // measured wall time of the local query
};

// Drives a real ledger on the simulated clock: a deploy and a publish
// proposal enter the same first block, so both experiments share the same
// inclusion phase. Simulated delays:
//   call_submit = 2L
//   getter      = 2L + Q
//   confirm     = t_confirmed + 2L + Q   (receipt fetch after inclusion)
//   deploy      = confirm + deploy_extra
// which yields deploy >= confirm > getter > call_submit for every
// block_interval > 0, L > 0, Q > 0.
TimingReport run_ledger_timing(ledger::ChainConfig cfg, const TimingModel& model = {});

struct LatencyRow {
  std::string scenario;
  std::size_t payload_bytes = 0;
  double direct_ms = 0;
  double content_ms = 0;
};

// One row per endpoint taken as the download origin, nearest endpoint fixed
// as the content-addressed serving peer. Rows come back ordered by origin
// latency.
Result<std::vector<LatencyRow>> run_latency_bench(castore::Store& store, ByteView payload,
                                                  std::vector<castore::PeerEndpoint> endpoints);

// Sign changes of (direct - content) along the rows.
std::size_t count_crossovers(const std::vector<LatencyRow>& rows);

// CSV table + gnuplot-style data file, byte-deterministic for fixed input.
Result<void> emit_report(const std::vector<LatencyRow>& rows, const std::filesystem::path& dir);

std::string timing_csv(const TimingReport& r);

// Default synthetic endpoint table (editable config, not measurements).
std::string default_endpoint_config();

}  // namespace fwchain::bench

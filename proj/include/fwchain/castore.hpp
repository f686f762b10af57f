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

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "fwchain/bytes.hpp"
#include "fwchain/result.hpp"

// Content-addressed firmware store: fixed-size chunking into a Merkle DAG
// whose root digest addresses the content. Retrieval verifies every node
// digest before its bytes are used, so any tampering surfaces as an error,
// never as wrong bytes. A small latency model over named peers stands in
// for the distributed file network.

namespace fwchain::castore {

inline constexpr std::size_t kDefaultChunkSize = 262144;  // 256 KiB
inline constexpr std::size_t kFanout = 64;
inline constexpr std::uint8_t kLeafKind = 0x00;
inline constexpr std::uint8_t kInteriorKind = 0x01;

struct ContentId {
  Digest32 digest{};

  std::string hex() const { return to_hex(as_view(digest)); }
  static Result<ContentId> from_hex_string(std::string_view hex);

  friend bool operator==(const ContentId&, const ContentId&) = default;
  friend auto operator<=>(const ContentId&, const ContentId&) = default;
};

struct DagStats {
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  std::size_t depth = 0;          // 1 for a single leaf
  std::uint64_t total_bytes = 0;  // sum of node encodings (kind byte included)
  std::uint64_t content_bytes = 0;
};

class Store {
 public:
  explicit Store(std::size_t chunk_size = kDefaultChunkSize);

  // Mirror nodes to a directory, one file per node named by its hex digest.
  // Existing files become readable through this store.
  Result<void> attach_dir(const std::filesystem::path& dir);

  std::size_t chunk_size() const { return chunk_size_; }

  ContentId put(ByteView content);
  Result<Bytes> get(const ContentId& id) const;
  Result<void> verify(const ContentId& id) const;
  Result<DagStats> stats(const ContentId& id) const;
  bool contains(const ContentId& id) const;
  std::size_t node_count() const;

  // Raw node access for diagnostics and tamper testing. overwrite keeps the
  // index key and swaps the stored bytes, exactly what on-disk corruption
  // would do.
  std::vector<Digest32> node_digests() const;
  std::optional<Bytes> node_raw(const Digest32& d) const;
  bool overwrite_node_raw(const Digest32& d, Bytes bytes);

 private:
  Result<Bytes> load_node(const Digest32& d) const;
  void store_node(const Digest32& d, Bytes bytes);
  Result<void> walk(const Digest32& d, std::size_t depth, DagStats* stats, Bytes* out) const;

  std::size_t chunk_size_;
  mutable std::shared_mutex mu_;
  mutable std::map<Digest32, Bytes> nodes_;
  std::optional<std::filesystem::path> dir_;
};

// One download endpoint of the latency model. holds lists the roots this
// endpoint can serve.
struct PeerEndpoint {
  std::string name;
  double one_way_latency_ms = 0.0;
  double bandwidth_bps = 1.0;  // bytes per second
  std::set<ContentId> holds;

  bool holds_content(const ContentId& id) const { return holds.count(id) > 0; }
};

struct FetchTiming {
  Bytes content;
  double content_addressed_ms = 0.0;
  double direct_ms = 0.0;
  std::string chosen_peer;
};

// Closed-form timing of the two fetch paths on the simulated clock:
//   direct            = 2*origin latency + size/origin bandwidth
//   content-addressed = 2*best-peer latency + dag bytes/best-peer bandwidth
// where best is the lowest-latency peer holding the content and chunk
// transfers pipeline after the first round trip.
Result<FetchTiming> fetch_timed(const Store& store, const ContentId& id,
                                const std::vector<PeerEndpoint>& peers,
                                const PeerEndpoint& origin);

// Plain-text endpoint table: "name latency_ms bandwidth_Bps" per line, '#'
// comments.
Result<std::vector<PeerEndpoint>> parse_endpoints(const std::string& text);

}  // namespace fwchain::castore

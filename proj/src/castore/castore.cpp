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

#include "fwchain/castore.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include "fwchain/kernels/sha256.hpp"

namespace fwchain::castore {

Result<ContentId> ContentId::from_hex_string(std::string_view hex) {
  auto d = digest_from_hex(hex);
  if (!d) return err(Errc::parse_error, "content id must be 32 hex bytes");
  return ContentId{*d};
}

Store::Store(std::size_t chunk_size) : chunk_size_(chunk_size ? chunk_size : kDefaultChunkSize) {}

Result<void> Store::attach_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return err(Errc::io_failure, "cannot create " + dir.string());
  std::unique_lock lock(mu_);
  dir_ = dir;
  return {};
}

void Store::store_node(const Digest32& d, Bytes bytes) {
  {
    std::unique_lock lock(mu_);
    auto [it, inserted] = nodes_.emplace(d, std::move(bytes));
    if (!inserted) return;  // idempotent
    if (dir_) {
      std::ofstream out(*dir_ / to_hex(as_view(d)), std::ios::binary | std::ios::trunc);
      out.write(reinterpret_cast<const char*>(it->second.data()),
                static_cast<std::streamsize>(it->second.size()));
    }
  }
}

Result<Bytes> Store::load_node(const Digest32& d) const {
  {
    std::shared_lock lock(mu_);
    auto it = nodes_.find(d);
    if (it != nodes_.end()) return it->second;
  }
  if (dir_) {
    std::ifstream in(*dir_ / to_hex(as_view(d)), std::ios::binary);
    if (in) {
      Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      std::unique_lock lock(mu_);
      nodes_.emplace(d, bytes);
      return bytes;
    }
  }
  return err(Errc::not_found, "node " + to_hex(as_view(d)));
}

ContentId Store::put(ByteView content) {
  // Leaves: kind byte + chunk. Empty content degenerates to one empty leaf
  // so put is total.
  std::vector<Bytes> level;
  if (content.empty()) {
    level.push_back(Bytes{kLeafKind});
  } else {
    for (std::size_t off = 0; off < content.size(); off += chunk_size_) {
      std::size_t n = std::min(chunk_size_, content.size() - off);
      Bytes node;
      node.reserve(n + 1);
      node.push_back(kLeafKind);
      node.insert(node.end(), content.begin() + off, content.begin() + off + n);
      level.push_back(std::move(node));
    }
  }

  for (;;) {
    std::vector<ByteView> views;
    views.reserve(level.size());
    for (const auto& n : level) views.push_back(as_view(n));
    std::vector<Digest32> digests = kernels::sha256_batch(views);
    for (std::size_t i = 0; i < level.size(); ++i)
      store_node(digests[i], std::move(level[i]));

    if (digests.size() == 1) return ContentId{digests[0]};

    // Interior nodes: kind byte + up to kFanout child digests in order.
    std::vector<Bytes> parents;
    for (std::size_t off = 0; off < digests.size(); off += kFanout) {
      std::size_t n = std::min(kFanout, digests.size() - off);
      Bytes node;
      node.reserve(1 + n * 32);
      node.push_back(kInteriorKind);
      for (std::size_t i = 0; i < n; ++i)
        node.insert(node.end(), digests[off + i].begin(), digests[off + i].end());
      parents.push_back(std::move(node));
    }
    level = std::move(parents);
  }
}

Result<void> Store::walk(const Digest32& d, std::size_t depth, DagStats* stats, Bytes* out) const {
  auto bytes = load_node(d);
  if (!bytes) return bytes.error();
  const Bytes& node = bytes.value();

  if (!(kernels::sha256(as_view(node)) == d))
    return err(Errc::tampered, "node " + to_hex(as_view(d)));

  if (stats) {
    stats->node_count++;
    stats->total_bytes += node.size();
    stats->depth = std::max(stats->depth, depth);
  }

  if (node.empty()) return err(Errc::tampered, "empty node " + to_hex(as_view(d)));
  if (node[0] == kLeafKind) {
    if (node.size() - 1 > chunk_size_)
      return err(Errc::tampered, "oversized leaf " + to_hex(as_view(d)));
    if (stats) {
      stats->leaf_count++;
      stats->content_bytes += node.size() - 1;
    }
    if (out) out->insert(out->end(), node.begin() + 1, node.end());
    return {};
  }
  if (node[0] != kInteriorKind) return err(Errc::tampered, "bad node kind " + to_hex(as_view(d)));

  std::size_t payload = node.size() - 1;
  if (payload == 0 || payload % 32 != 0 || payload / 32 > kFanout)
    return err(Errc::tampered, "malformed interior " + to_hex(as_view(d)));

  for (std::size_t off = 1; off < node.size(); off += 32) {
    Digest32 child;
    std::copy(node.begin() + off, node.begin() + off + 32, child.begin());
    if (auto r = walk(child, depth + 1, stats, out); !r) return r;
  }
  return {};
}

Result<Bytes> Store::get(const ContentId& id) const {
  Bytes out;
  if (auto r = walk(id.digest, 1, nullptr, &out); !r) return r.error();
  return out;
}

Result<void> Store::verify(const ContentId& id) const { return walk(id.digest, 1, nullptr, nullptr); }

Result<DagStats> Store::stats(const ContentId& id) const {
  DagStats s;
  if (auto r = walk(id.digest, 1, &s, nullptr); !r) return r.error();
  return s;
}

bool Store::contains(const ContentId& id) const {
  {
    std::shared_lock lock(mu_);
    if (nodes_.count(id.digest)) return true;
  }
  if (dir_) return std::filesystem::exists(*dir_ / id.hex());
  return false;
}

std::size_t Store::node_count() const {
  std::shared_lock lock(mu_);
  return nodes_.size();
}

std::vector<Digest32> Store::node_digests() const {
  std::shared_lock lock(mu_);
  std::vector<Digest32> out;
  out.reserve(nodes_.size());
  for (const auto& [d, _] : nodes_) out.push_back(d);
  return out;
}

std::optional<Bytes> Store::node_raw(const Digest32& d) const {
  std::shared_lock lock(mu_);
  auto it = nodes_.find(d);
  if (it == nodes_.end()) return std::nullopt;
  return it->second;
}

bool Store::overwrite_node_raw(const Digest32& d, Bytes bytes) {
  std::unique_lock lock(mu_);
  auto it = nodes_.find(d);
  if (it == nodes_.end()) return false;
  it->second = std::move(bytes);
  if (dir_) {
    std::ofstream out(*dir_ / to_hex(as_view(d)), std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(it->second.data()),
              static_cast<std::streamsize>(it->second.size()));
  }
  return true;
}

Result<FetchTiming> fetch_timed(const Store& store, const ContentId& id,
                                const std::vector<PeerEndpoint>& peers,
                                const PeerEndpoint& origin) {
  if (!origin.holds_content(id))
    return err(Errc::not_found, "origin " + origin.name + " does not hold the content");
  const PeerEndpoint* best = nullptr;
  for (const auto& p : peers) {
    if (!p.holds_content(id)) continue;
    if (!best || p.one_way_latency_ms < best->one_way_latency_ms) best = &p;
  }
  if (!best) return err(Errc::not_found, "no peer holds the content");

  auto content = store.get(id);
  if (!content) return content.error();
  auto dag = store.stats(id);
  if (!dag) return dag.error();

  FetchTiming t;
  t.content = content.take();
  t.chosen_peer = best->name;
  t.direct_ms = 2.0 * origin.one_way_latency_ms +
                double(t.content.size()) / origin.bandwidth_bps * 1000.0;
  t.content_addressed_ms = 2.0 * best->one_way_latency_ms +
                           double(dag.value().total_bytes) / best->bandwidth_bps * 1000.0;
  return t;
}

Result<std::vector<PeerEndpoint>> parse_endpoints(const std::string& text) {
  std::vector<PeerEndpoint> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    PeerEndpoint p;
    if (!(ls >> p.name)) continue;  // blank line
    if (!(ls >> p.one_way_latency_ms >> p.bandwidth_bps))
      return err(Errc::parse_error, "endpoint line " + std::to_string(lineno));
    if (p.one_way_latency_ms < 0 || p.bandwidth_bps <= 0)
      return err(Errc::parse_error, "endpoint line " + std::to_string(lineno) + ": bad values");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace fwchain::castore

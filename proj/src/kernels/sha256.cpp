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

#include "fwchain/kernels/sha256.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <numeric>

#include "cpu_features.hpp"
#include "sha256_k.hpp"

namespace fwchain::kernels {

namespace {

std::atomic<int> g_forced{-1};  // -1 = auto, else Sha256Backend value

using CompressFn = void (*)(std::uint32_t[8], const std::uint8_t*, std::size_t);

CompressFn compress_for(Sha256Backend b) {
  return b == Sha256Backend::shani ? detail::compress_shani : detail::compress_scalar;
}

Sha256Backend pick_single() {
  int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) {
    auto b = static_cast<Sha256Backend>(forced);
    if (b == Sha256Backend::shani && !cpu_has_sha_ni()) return Sha256Backend::scalar;
    if (b == Sha256Backend::avx2_x8) return Sha256Backend::scalar;  // not a single-stream backend
    return b;
  }
  return cpu_has_sha_ni() ? Sha256Backend::shani : Sha256Backend::scalar;
}

}  // namespace

const char* backend_name(Sha256Backend b) {
  switch (b) {
    case Sha256Backend::scalar: return "scalar";
    case Sha256Backend::shani: return "shani";
    case Sha256Backend::avx2_x8: return "avx2_x8";
  }
  return "?";
}

Sha256Backend active_single_backend() { return pick_single(); }

bool avx2_batch_available() {
  int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0 && static_cast<Sha256Backend>(forced) != Sha256Backend::avx2_x8) return false;
  return cpu_has_avx2();
}

void force_single_backend(std::optional<Sha256Backend> b) {
  g_forced.store(b ? static_cast<int>(*b) : -1, std::memory_order_relaxed);
}

Sha256::Sha256() {
  std::memcpy(state_, detail::kSha256Init, sizeof(state_));
}

void Sha256::update(ByteView data) {
  const CompressFn compress = compress_for(pick_single());
  total_ += data.size();
  const std::uint8_t* p = data.data();
  std::size_t n = data.size();

  if (fill_ > 0) {
    std::size_t take = std::min(n, 64 - fill_);
    std::memcpy(buf_ + fill_, p, take);
    fill_ += take;
    p += take;
    n -= take;
    if (fill_ == 64) {
      compress(state_, buf_, 1);
      fill_ = 0;
    }
  }
  if (n >= 64) {
    compress(state_, p, n / 64);
    p += (n / 64) * 64;
    n %= 64;
  }
  if (n > 0) {
    std::memcpy(buf_, p, n);
    fill_ = n;
  }
}

Digest32 Sha256::finish() {
  const CompressFn compress = compress_for(pick_single());
  std::uint8_t tail[128];
  std::memset(tail, 0, sizeof(tail));
  std::memcpy(tail, buf_, fill_);
  tail[fill_] = 0x80;
  std::size_t tail_len = (fill_ + 1 + 8 > 64) ? 128 : 64;
  put_be64(tail + tail_len - 8, total_ * 8);
  compress(state_, tail, tail_len / 64);

  Digest32 out;
  for (int i = 0; i < 8; ++i) put_be32(out.data() + i * 4, state_[i]);
  return out;
}

Digest32 Sha256::digest(ByteView data) {
  Sha256 h;
  h.update(data);
  return h.finish();
}

namespace detail {

Digest32 sha256_single(ByteView data, Sha256Backend backend) {
  const CompressFn compress = compress_for(backend);
  std::uint32_t state[8];
  std::memcpy(state, kSha256Init, sizeof(state));

  std::size_t full = data.size() / 64;
  if (full) compress(state, data.data(), full);

  std::size_t rem = data.size() % 64;
  std::uint8_t tail[128];
  std::memset(tail, 0, sizeof(tail));
  if (rem) std::memcpy(tail, data.data() + full * 64, rem);
  tail[rem] = 0x80;
  std::size_t tail_len = (rem + 1 + 8 > 64) ? 128 : 64;
  put_be64(tail + tail_len - 8, std::uint64_t(data.size()) * 8);
  compress(state, tail, tail_len / 64);

  Digest32 out;
  for (int i = 0; i < 8; ++i) put_be32(out.data() + i * 4, state[i]);
  return out;
}

}  // namespace detail

std::vector<Digest32> sha256_batch(const std::vector<ByteView>& msgs) {
  std::vector<Digest32> out(msgs.size());
  if (msgs.empty()) return out;

  if (!avx2_batch_available()) {
    for (std::size_t i = 0; i < msgs.size(); ++i) out[i] = Sha256::digest(msgs[i]);
    return out;
  }

  // Group equal-length messages so each group runs in lockstep through the
  // 8-lane kernel; odd lengths fall through one by one.
  std::vector<std::size_t> order(msgs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return msgs[a].size() < msgs[b].size(); });

  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && msgs[order[j]].size() == msgs[order[i]].size()) ++j;

    std::size_t group = j - i;
    if (group >= 2) {
      const std::size_t len = msgs[order[i]].size();
      for (std::size_t g = i; g < j; g += 8) {
        std::size_t lanes = std::min<std::size_t>(8, j - g);
        const std::uint8_t* ptrs[8];
        Digest32 digests[8];
        for (std::size_t l = 0; l < lanes; ++l) ptrs[l] = msgs[order[g + l]].data();
        detail::sha256_avx2_8lane(ptrs, len, lanes, digests);
        for (std::size_t l = 0; l < lanes; ++l) out[order[g + l]] = digests[l];
      }
    } else {
      out[order[i]] = Sha256::digest(msgs[order[i]]);
    }
    i = j;
  }
  return out;
}

}  // namespace fwchain::kernels

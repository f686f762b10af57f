#include <doctest.h>

#include <random>

#include "fwchain/castore.hpp"
#include "fwchain/kernels/sha256.hpp"
#include "support/ref_sha256.hpp"
#include "support/testutil.hpp"

using namespace fwchain;
using namespace fwchain::castore;

namespace {

ContentId put_random(Store& store, std::mt19937_64& rng, std::size_t n, Bytes* out = nullptr) {
  Bytes content = testutil::random_bytes(rng, n);
  ContentId id = store.put(as_view(content));
  if (out) *out = std::move(content);
  return id;
}

}  // namespace

TEST_CASE("put is deterministic and idempotent") {
  std::mt19937_64 rng(1);
  Bytes content = testutil::random_bytes(rng, 100000);
  Store a(4096), b(4096);
  ContentId id1 = a.put(as_view(content));
  ContentId id2 = a.put(as_view(content));
  CHECK(id1 == id2);
  // Insertion history must not matter.
  put_random(b, rng, 777);
  put_random(b, rng, 3);
  CHECK(b.put(as_view(content)) == id1);
}

TEST_CASE("single byte content is one leaf with digest sha256(kind || byte)") {
  Store store;
  Bytes content{0xab};
  ContentId id = store.put(as_view(content));

  Bytes node{kLeafKind, 0xab};
  auto want = testref::ref_sha256(node);
  CHECK(to_hex(as_view(id.digest)) == to_hex(ByteView(want.data(), want.size())));

  auto stats = store.stats(id);
  REQUIRE(stats.ok());
  CHECK(stats.value().node_count == 1);
  CHECK(stats.value().leaf_count == 1);
  CHECK(stats.value().depth == 1);
}

TEST_CASE("empty content maps to a single empty leaf") {
  Store store;
  ContentId id = store.put(ByteView{});
  Bytes node{kLeafKind};
  auto want = testref::ref_sha256(node);
  CHECK(to_hex(as_view(id.digest)) == to_hex(ByteView(want.data(), want.size())));
  auto back = store.get(id);
  REQUIRE(back.ok());
  CHECK(back.value().empty());
}

TEST_CASE("three full chunks build three leaves under one interior root") {
  const std::size_t chunk = 1024;
  Store store(chunk);
  std::mt19937_64 rng(2);
  Bytes content = testutil::random_bytes(rng, 3 * chunk);
  ContentId id = store.put(as_view(content));

  auto stats = store.stats(id);
  REQUIRE(stats.ok());
  // Structural oracle: ceil(3) leaves + 1 interior.
  CHECK(stats.value().leaf_count == 3);
  CHECK(stats.value().node_count == 4);
  CHECK(stats.value().depth == 2);
  CHECK(stats.value().content_bytes == 3 * chunk);
  // Node encodings: 3 leaves of chunk+1 plus interior of 1 + 3*32.
  CHECK(stats.value().total_bytes == 3 * (chunk + 1) + 1 + 3 * 32);
}

TEST_CASE("roundtrip across sizes up to 4 MiB") {
  std::mt19937_64 rng(3);
  Store store;  // default 256 KiB chunks
  for (std::size_t n : {std::size_t(1), std::size_t(2), kDefaultChunkSize - 1, kDefaultChunkSize,
                        kDefaultChunkSize + 1, 3 * kDefaultChunkSize + 17,
                        std::size_t(4) * 1024 * 1024}) {
    Bytes content;
    ContentId id = put_random(store, rng, n, &content);
    auto back = store.get(id);
    REQUIRE(back.ok());
    CHECK(back.value() == content);
  }
}

TEST_CASE("deep trees with tiny chunks roundtrip") {
  std::mt19937_64 rng(4);
  Store store(16);  // forces fanout splits and 3+ levels
  Bytes content;
  ContentId id = put_random(store, rng, 16 * 64 * 3 + 5, &content);
  auto stats = store.stats(id);
  REQUIRE(stats.ok());
  CHECK(stats.value().depth >= 3);
  auto back = store.get(id);
  REQUIRE(back.ok());
  CHECK(back.value() == content);
}

TEST_CASE("bit flips in any stored node surface as Tampered") {
  std::mt19937_64 rng(5);
  Store store(64);
  Bytes content;
  ContentId id = put_random(store, rng, 64 * 70, &content);  // 3-level DAG

  auto digests = store.node_digests();
  REQUIRE(digests.size() > 70);
  for (int trial = 0; trial < 40; ++trial) {
    const Digest32& victim = digests[rng() % digests.size()];
    Bytes original = *store.node_raw(victim);
    Bytes mutated = original;
    std::size_t byte = rng() % mutated.size();
    mutated[byte] ^= std::uint8_t(1u << (rng() % 8));
    REQUIRE(store.overwrite_node_raw(victim, mutated));

    auto got = store.get(id);
    REQUIRE(!got.ok());
    CHECK(got.error().code == Errc::tampered);
    // Error names the failing node.
    CHECK(got.error().message.find(to_hex(as_view(victim))) != std::string::npos);

    store.overwrite_node_raw(victim, original);
  }
  auto clean = store.get(id);
  REQUIRE(clean.ok());
  CHECK(clean.value() == content);
}

TEST_CASE("unknown id is NotFound") {
  Store store;
  ContentId bogus;
  bogus.digest[0] = 0x77;
  auto got = store.get(bogus);
  REQUIRE(!got.ok());
  CHECK(got.error().code == Errc::not_found);
}

TEST_CASE("directory-backed store persists nodes by hex digest") {
  testutil::ScratchDir scratch("castore");
  std::mt19937_64 rng(6);
  Bytes content = testutil::random_bytes(rng, 5000);
  ContentId id;
  {
    Store store(512);
    REQUIRE(store.attach_dir(scratch.path()).ok());
    id = store.put(as_view(content));
    CHECK(std::filesystem::exists(scratch.path() / id.hex()));
  }
  Store reopened(512);
  REQUIRE(reopened.attach_dir(scratch.path()).ok());
  auto back = reopened.get(id);
  REQUIRE(back.ok());
  CHECK(back.value() == content);
  CHECK(reopened.verify(id).ok());
}

TEST_CASE("fetch_timed closed-form times") {
  std::mt19937_64 rng(7);
  Store store;  // 256 KiB chunks
  Bytes content = testutil::random_bytes(rng, 1024 * 1024);
  ContentId id = store.put(as_view(content));

  const double mib_per_s = 1024.0 * 1024.0;
  PeerEndpoint near{"near", 10.0, mib_per_s, {id}};
  PeerEndpoint far{"far", 150.0, mib_per_s, {id}};

  // Independent arithmetic: 4 full leaves of chunk+1 bytes plus a root of
  // 1 + 4*32; direct carries exactly the content.
  const double dag_bytes = 4.0 * (262144 + 1) + 1 + 4 * 32;
  const double content_bytes = 1024.0 * 1024.0;

  SUBCASE("near peer beats far origin") {
    auto t = fetch_timed(store, id, {near, far}, far);
    REQUIRE(t.ok());
    CHECK(t.value().content == content);
    CHECK(t.value().chosen_peer == "near");
    CHECK(t.value().direct_ms ==
          doctest::Approx(2 * 150.0 + content_bytes / mib_per_s * 1000.0));
    CHECK(t.value().content_addressed_ms ==
          doctest::Approx(2 * 10.0 + dag_bytes / mib_per_s * 1000.0));
    CHECK(t.value().content_addressed_ms < t.value().direct_ms);
  }

  SUBCASE("near origin beats far peer") {
    auto t = fetch_timed(store, id, {far}, near);
    REQUIRE(t.ok());
    CHECK(t.value().direct_ms ==
          doctest::Approx(2 * 10.0 + content_bytes / mib_per_s * 1000.0));
    CHECK(t.value().content_addressed_ms ==
          doctest::Approx(2 * 150.0 + dag_bytes / mib_per_s * 1000.0));
    CHECK(t.value().direct_ms < t.value().content_addressed_ms);
  }

  SUBCASE("single peer equal to origin never beats direct: dag overhead >= 0") {
    auto t = fetch_timed(store, id, {near}, near);
    REQUIRE(t.ok());
    CHECK(t.value().content_addressed_ms >= t.value().direct_ms);
  }

  SUBCASE("raising the used peer latency never lowers the content path") {
    double prev = 0;
    for (double lat : {1.0, 5.0, 20.0, 100.0, 400.0}) {
      PeerEndpoint p{"p", lat, mib_per_s, {id}};
      auto t = fetch_timed(store, id, {p}, near);
      REQUIRE(t.ok());
      CHECK(t.value().content_addressed_ms >= prev);
      prev = t.value().content_addressed_ms;
    }
  }

  SUBCASE("missing holders are NotFound") {
    PeerEndpoint empty{"empty", 1.0, mib_per_s, {}};
    CHECK(fetch_timed(store, id, {empty}, near).error().code == Errc::not_found);
    CHECK(fetch_timed(store, id, {near}, empty).error().code == Errc::not_found);
  }
}

TEST_CASE("endpoint table parsing") {
  auto eps = parse_endpoints(
      "# name latency_ms bandwidth_Bps\n"
      "sf 5 1048576\n"
      "frankfurt 80.5 524288  # far\n"
      "\n");
  REQUIRE(eps.ok());
  REQUIRE(eps.value().size() == 2);
  CHECK(eps.value()[0].name == "sf");
  CHECK(eps.value()[1].one_way_latency_ms == doctest::Approx(80.5));

  CHECK(!parse_endpoints("justaname\n").ok());
  CHECK(!parse_endpoints("x -3 100\n").ok());
  CHECK(!parse_endpoints("x 3 0\n").ok());
}

#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "oracles.hpp"
#include "permadid/crypto.hpp"
#include "permadid/errors.hpp"
#include "permadid/weave/store.hpp"

using namespace permadid;
using namespace permadid::weave;

namespace {

Address test_address(std::string_view label) {
    return crypto::digest_to_id(crypto::sha256(label));
}

Bytes blob(std::string_view s) { return to_bytes(s); }

std::string temp_path(const std::string& stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& stem) : path(temp_path(stem)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("transaction ids are 43-char base64url content hashes") {
    WeaveStore store;
    Address owner = test_address("weave-owner-1");
    std::vector<Tag> tags{{"Content-Type", "application/json"}, {"DID-Type", "did-document"}};
    Bytes data = blob("{\"id\":\"did:arweave:abc\"}");

    TxId id = store.submit(owner, tags, data);
    CHECK(id.size() == 43);
    CHECK(is_base64url(id));

    // Oracle: rebuild the canonical serialization by hand (big-endian u64
    // length prefixes: owner, tag count, name/value pairs, data) and hash it.
    Bytes canon;
    auto put_u64 = [&](uint64_t v) {
        for (int i = 7; i >= 0; --i) canon.push_back(uint8_t(v >> (8 * i)));
    };
    auto put_str = [&](std::string_view s) {
        put_u64(s.size());
        canon.insert(canon.end(), s.begin(), s.end());
    };
    put_str(owner);
    put_u64(tags.size());
    for (const Tag& t : tags) {
        put_str(t.name);
        put_str(t.value);
    }
    put_u64(data.size());
    canon.insert(canon.end(), data.begin(), data.end());
    CHECK(id == crypto::digest_to_id(crypto::sha256(canon)));
    CHECK(canon == canonical_transaction(owner, tags, data));
}

TEST_CASE("submit is idempotent and accepts degenerate inputs") {
    WeaveStore store;
    Address owner = test_address("weave-owner-2");

    TxId a = store.submit(owner, {}, {});
    CHECK(a.size() == 43);
    CHECK(store.pending_count() == 1);

    TxId b = store.submit(owner, {}, {});
    CHECK(a == b);
    CHECK(store.pending_count() == 1);

    uint64_t stamp = store.get(a).submitted_at;
    store.submit(owner, {{"x", "y"}}, blob("other"));
    store.submit(owner, {}, {});
    CHECK(store.get(a).submitted_at == stamp);
    CHECK(store.pending_count() == 2);
}

TEST_CASE("submit validates owner, tags, and size") {
    WeaveStore store({.max_data_bytes = 64});
    Address owner = test_address("weave-owner-3");

    CHECK_THROWS_AS(store.submit("short", {}, {}), Error);
    CHECK_THROWS_AS(store.submit(owner + "x", {}, {}), Error);
    CHECK_THROWS_AS(store.submit(std::string(42, 'a') + "+", {}, {}), Error);

    try {
        store.submit(owner, {{"", "v"}}, {});
        FAIL("empty tag name accepted");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MalformedTag);
    }
    CHECK_THROWS_AS(store.submit(owner, {{std::string(65, 'n'), "v"}}, {}), Error);
    CHECK_THROWS_AS(store.submit(owner, {{"n", std::string(1025, 'v')}}, {}), Error);
    CHECK_NOTHROW(store.submit(owner, {{std::string(64, 'n'), std::string(1024, 'v')}}, {}));

    try {
        store.submit(owner, {}, Bytes(65, 0));
        FAIL("oversize data accepted");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::OversizeData);
    }
    CHECK_NOTHROW(store.submit(owner, {}, Bytes(64, 0)));
}

TEST_CASE("mining bootstraps genesis and enforces the pending-pool rule") {
    WeaveStore store;
    Address owner = test_address("weave-owner-4");

    Block genesis = store.mine_block();  // bootstrap block may be empty
    CHECK(genesis.height == 0);
    CHECK_FALSE(genesis.prev_id.has_value());
    CHECK_FALSE(genesis.recall_id.has_value());
    CHECK(genesis.block_id.size() == 43);

    try {
        store.mine_block();
        FAIL("empty mine accepted");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NothingToMine);
    }

    store.submit(owner, {}, blob("payload"));
    Block b1 = store.mine_block();
    CHECK(b1.height == 1);
    CHECK(b1.prev_id == genesis.block_id);
    CHECK_FALSE(b1.recall_id.has_value());
    CHECK(b1.tx_ids.size() == 1);
    CHECK(store.pending_count() == 0);

    WeaveStore lax({.allow_empty_blocks = true});
    lax.mine_block();
    CHECK_NOTHROW(lax.mine_block());
    CHECK(lax.block_count() == 2);
}

TEST_CASE("recall ids follow H(prev) mod height, checked against GMP") {
    WeaveStore store({.allow_empty_blocks = true});
    Address owner = test_address("weave-owner-5");
    for (int i = 0; i < 48; ++i) {
        if (i % 3 != 0) store.submit(owner, {{"n", std::to_string(i)}}, blob("tx"));
        store.mine_block();
    }
    REQUIRE(store.block_count() == 48);

    for (uint64_t h = 2; h < store.block_count(); ++h) {
        Block b = store.block_at(h);
        REQUIRE(b.prev_id.has_value());
        REQUIRE(b.recall_id.has_value());

        // Independent oracle: big-endian digest of the prev id, reduced mod
        // height with GMP rather than the library's word-by-word loop.
        crypto::Digest d = crypto::sha256(*b.prev_id);
        mpz_class big = oracles::mpz_from_be(d.data(), d.size());
        uint64_t idx = mpz_class(big % h).get_ui();
        CHECK(idx == recall_index(*b.prev_id, h));
        CHECK(*b.recall_id == store.block_at(idx).block_id);
    }
}

TEST_CASE("get serves sealed and pending transactions immutably") {
    WeaveStore store({.allow_empty_blocks = true});
    Address owner = test_address("weave-owner-6");
    Bytes data = blob("did document bytes");
    TxId id = store.submit(owner, {{"Content-Type", "application/json"}}, data);

    CHECK(store.get(id).data == data);  // pending
    store.mine_block();
    CHECK(store.get(id).data == data);  // sealed

    for (int i = 0; i < 100; ++i) store.mine_block();
    Transaction tx = store.get(id);
    CHECK(tx.data == data);
    CHECK(tx.owner == owner);
    CHECK(tx.fee == data.size());

    try {
        store.get("3t8YH9c2sN2F6GpOYXkAAAAAAAAAAAAAAAAAAAAAAAA");
        FAIL("missing id served");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotFound);
    }
}

TEST_CASE("query matches every filter tag over sealed transactions in order") {
    WeaveStore store;
    Address owner = test_address("weave-owner-7");
    std::vector<Tag> doc_tags{{"Content-Type", "application/json"}, {"DID-Type", "did-document"}};

    TxId a = store.submit(owner, doc_tags, blob("doc-a"));
    TxId b = store.submit(owner, {{"Content-Type", "text/plain"}}, blob("note"));
    store.mine_block();
    TxId c = store.submit(owner, doc_tags, blob("doc-c"));
    TxId pending = store.submit(owner, doc_tags, blob("doc-pending"));
    store.mine_block();
    // `pending` was sealed by that mine; create a genuinely pending one now.
    TxId unsealed = store.submit(owner, doc_tags, blob("doc-unsealed"));

    auto docs = store.query({{"DID-Type", "did-document"}});
    CHECK(docs == std::vector<TxId>{a, c, pending});
    CHECK(std::find(docs.begin(), docs.end(), unsealed) == docs.end());

    auto both = store.query(doc_tags);
    CHECK(both == std::vector<TxId>{a, c, pending});

    auto all = store.query({});
    CHECK(all == std::vector<TxId>{a, b, c, pending});

    CHECK(store.query({{"DID-Type", "nope"}}).empty());
    CHECK(store.query({{"DID-Type", "did-document"}, {"Missing", "tag"}}).empty());
}

TEST_CASE("bundles roundtrip bit-exact and share ids with direct submits") {
    WeaveStore store;
    Address owner = test_address("weave-owner-8");

    std::vector<std::pair<std::vector<Tag>, Bytes>> items{
        {{{"DID-Type", "did-document"}}, blob("doc one")},
        {{{"DID-Type", "did-document"}, {"V", "2"}}, blob("doc two")},
        {{}, Bytes{0x00, 0xff, 0x10}},
    };
    auto [top, ids] = store.bundle_submit(owner, items);
    CHECK(ids.size() == 3);
    CHECK(std::set<ItemId>(ids.begin(), ids.end()).size() == 3);
    for (const ItemId& id : ids) CHECK(id.size() == 43);

    store.mine_block();
    auto unpacked = WeaveStore::unbundle(store.get(top));
    REQUIRE(unpacked.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(unpacked[i].tags == items[i].first);
        CHECK(unpacked[i].data == items[i].second);
        CHECK(unpacked[i].item_id == ids[i]);
        CHECK(store.get_item(ids[i]).data == items[i].second);
    }

    // A one-item bundle addresses its item exactly like a direct submit.
    auto [top1, ids1] = store.bundle_submit(owner, {{items[0].first, items[0].second}});
    TxId direct = store.submit(owner, items[0].first, items[0].second);
    CHECK(ids1.at(0) == direct);
    CHECK(top1 != direct);

    try {
        store.bundle_submit(owner, {});
        FAIL("empty bundle accepted");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyBundle);
    }
    CHECK_THROWS_AS(WeaveStore::unbundle(store.get(direct)), Error);
}

TEST_CASE("bundle transparency holds for sizes 1 through 100") {
    WeaveStore store;
    Address owner = test_address("weave-owner-9");
    crypto::SeededRng rng(to_bytes("weave-bundle-transparency-seed"));

    for (size_t n : {size_t(1), size_t(2), size_t(7), size_t(33), size_t(100)}) {
        std::vector<std::pair<std::vector<Tag>, Bytes>> items;
        for (size_t i = 0; i < n; ++i) {
            std::vector<Tag> tags;
            if (i % 2 == 0) tags.push_back({"Idx", std::to_string(i)});
            items.push_back({tags, rng.bytes(1 + (i * 37) % 256)});
        }
        auto [top, ids] = store.bundle_submit(owner, items);
        auto unpacked = WeaveStore::unbundle(store.get(top));
        REQUIRE(unpacked.size() == n);
        for (size_t i = 0; i < n; ++i) {
            CHECK(unpacked[i].tags == items[i].first);
            CHECK(unpacked[i].data == items[i].second);
            CHECK(unpacked[i].item_id == ids[i]);
        }
    }
}

TEST_CASE("verify_weave accepts honest chains of any shape") {
    WeaveStore store({.allow_empty_blocks = true});
    CHECK(store.verify_weave());  // no blocks at all

    store.mine_block();
    CHECK(store.verify_weave());  // genesis only

    Address owner = test_address("weave-owner-10");
    for (int i = 0; i < 10; ++i) {
        if (i % 2 == 0) store.submit(owner, {{"i", std::to_string(i)}}, blob("x"));
        store.mine_block();
    }
    std::vector<std::string> diag;
    CHECK(store.verify_weave(&diag));
    CHECK(diag.empty());
}

TEST_CASE("snapshots roundtrip and corrupt files are rejected or flagged") {
    TempFile file("permadid-weave-snapshot.bin");
    WeaveStore store;
    Address owner = test_address("weave-owner-11");

    std::vector<TxId> ids;
    for (int b = 0; b < 8; ++b) {
        for (int t = 0; t <= b % 3; ++t)
            ids.push_back(store.submit(
                owner, {{"Round", std::to_string(b)}, {"T", std::to_string(t)}},
                blob("payload-" + std::to_string(b) + "-" + std::to_string(t))));
        store.mine_block();
    }
    TxId never_sealed = store.submit(owner, {}, blob("still pending"));
    store.save(file.path);

    WeaveStore loaded = WeaveStore::load(file.path);
    CHECK(loaded.block_count() == store.block_count());
    CHECK(loaded.pending_count() == 0);
    CHECK_FALSE(loaded.has(never_sealed));  // pending pool is not persisted
    CHECK(loaded.verify_weave());
    CHECK(loaded.query({}) == store.query({}));
    for (const TxId& id : ids) {
        CHECK(loaded.get(id).data == store.get(id).data);
        CHECK(loaded.get(id).submitted_at == store.get(id).submitted_at);
    }
    CHECK(loaded.now() > loaded.get(ids.back()).submitted_at);

    // Logical time keeps advancing from where the snapshot left off.
    TxId fresh = loaded.submit(owner, {}, blob("post-load"));
    CHECK(loaded.get(fresh).submitted_at >= store.get(ids.back()).submitted_at);

    SUBCASE("bad magic") {
        std::ofstream f(file.path, std::ios::binary | std::ios::trunc);
        f << "NOTAWEAVE";
        f.close();
        try {
            WeaveStore::load(file.path);
            FAIL("bad magic accepted");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::CorruptSnapshot);
        }
    }
    SUBCASE("truncation") {
        std::ifstream in(file.path, std::ios::binary);
        std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        std::ofstream f(file.path, std::ios::binary | std::ios::trunc);
        f.write(raw.data(), std::streamsize(raw.size() / 2));
        f.close();
        CHECK_THROWS_AS(WeaveStore::load(file.path), Error);
    }
    SUBCASE("trailing garbage") {
        std::ofstream f(file.path, std::ios::binary | std::ios::app);
        f << "extra";
        f.close();
        CHECK_THROWS_AS(WeaveStore::load(file.path), Error);
    }
}

TEST_CASE("a recall id overwritten in storage is detected and named") {
    TempFile file("permadid-weave-tamper.bin");
    WeaveStore store;
    Address owner = test_address("weave-owner-12");
    for (int b = 0; b < 8; ++b) {
        store.submit(owner, {{"b", std::to_string(b)}}, blob("data"));
        store.mine_block();
    }
    Block victim = store.block_at(5);
    REQUIRE(victim.recall_id.has_value());
    store.save(file.path);

    std::ifstream in(file.path, std::ios::binary);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    // The recall id also appears earlier as some block's own id; corrupt the
    // *last* occurrence, which sits inside block 5's header.
    size_t pos = raw.rfind(*victim.recall_id);
    REQUIRE(pos != std::string::npos);
    raw[pos] = raw[pos] == 'A' ? 'B' : 'A';
    std::ofstream out(file.path, std::ios::binary | std::ios::trunc);
    out.write(raw.data(), std::streamsize(raw.size()));
    out.close();

    WeaveStore tampered = WeaveStore::load(file.path);
    std::vector<std::string> diag;
    CHECK_FALSE(tampered.verify_weave(&diag));
    REQUIRE_FALSE(diag.empty());
    bool names_height = std::any_of(diag.begin(), diag.end(), [](const std::string& d) {
        return d.find("block 5") != std::string::npos;
    });
    CHECK(names_height);
}

TEST_CASE("content addressing stays collision-free over random submissions") {
    WeaveStore store;
    crypto::SeededRng rng(to_bytes("weave-collision-check-seed"));
    std::set<TxId> seen;
    for (int i = 0; i < 500; ++i) {
        Address owner = crypto::digest_to_id(crypto::sha256(rng.bytes(8)));
        std::vector<Tag> tags{{"N", std::to_string(i)}};
        TxId id = store.submit(owner, tags, rng.bytes(1 + i % 64));
        CHECK(id.size() == 43);
        CHECK(is_base64url(id));
        seen.insert(id);
    }
    CHECK(seen.size() == 500);
}

TEST_CASE("concurrent readers run against the single writer") {
    WeaveStore store({.allow_empty_blocks = true});
    Address owner = test_address("weave-owner-13");
    TxId id = store.submit(owner, {{"K", "V"}}, blob("shared"));
    store.mine_block();

    // Bounded iterations: perpetual readers would starve the writer under a
    // reader-preferring rwlock.
    std::atomic<int> reads{0};
    std::vector<std::thread> readers;
    for (int t = 0; t < 4; ++t)
        readers.emplace_back([&] {
            for (int i = 0; i < 300; ++i) {
                if (store.get(id).data.size() == 6) ++reads;
                store.query({{"K", "V"}});
                store.verify_weave();
            }
        });
    for (int i = 0; i < 50; ++i) {
        store.submit(owner, {{"i", std::to_string(i)}}, blob("w"));
        store.mine_block();
    }
    for (auto& t : readers) t.join();
    CHECK(reads == 4 * 300);
    CHECK(store.verify_weave());
}

// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "doctest.h"

#include "redact/storage.hpp"
#include "support/temp_dir.hpp"

#include <chrono>
#include <fstream>

using namespace redact;

namespace {

Bytes key(std::uint64_t i)
{
    Bytes k(32, 0);
    for (int b = 0; b < 8; ++b) k[31 - b] = static_cast<std::uint8_t>(i >> (8 * b));
    return k;
}

} // namespace

TEST_SUITE("storage") {

TEST_CASE("put then get, overwrite, absent")
{
    Store s;
    s.put(bucket::funds_tx, key(1), to_bytes("one"));
    CHECK(s.get(bucket::funds_tx, key(1)) == to_bytes("one"));
    s.put(bucket::funds_tx, key(1), to_bytes("uno"));
    CHECK(s.get(bucket::funds_tx, key(1)) == to_bytes("uno"));
    CHECK_FALSE(s.get(bucket::funds_tx, key(2)));
    CHECK_FALSE(s.get(bucket::data_tx, key(1)));
}

TEST_CASE("unknown bucket and key width are errors")
{
    Store s;
    CHECK_THROWS_AS(s.put("nope", key(1), {}), StorageError);
    CHECK_THROWS_AS(s.get("nope", key(1)), StorageError);
    CHECK_THROWS_AS(s.put(bucket::blocks, Bytes(31), {}), StorageError);
    CHECK_NOTHROW(s.put(bucket::meta, to_bytes("tip"), to_bytes("x")));
}

TEST_CASE("get_tx_any searches the transaction buckets")
{
    Store s;
    const Digest d = Digest::from_bytes(key(7));
    s.put(bucket::data_tx, d.view(), to_bytes("body"));
    auto found = s.get_tx_any(d);
    REQUIRE(found);
    CHECK(found->bucket == "datatx");
    CHECK(found->value == to_bytes("body"));

    CHECK_FALSE(s.get_tx_any(Digest::from_bytes(key(8))));

    const Digest u = Digest::from_bytes(key(9));
    s.put(bucket::update_tx, u.view(), to_bytes("upd"));
    CHECK(s.get_tx_any(u)->bucket == "updatetx");
    // non-transaction buckets are not searched
    s.put(bucket::accounts, key(10), to_bytes("acct"));
    CHECK_FALSE(s.get_tx_any(Digest::from_bytes(key(10))));
}

TEST_CASE("flushed contents survive reopen, compaction drops stale records")
{
    test::TempDir dir;
    const auto path = dir.path() / "node.db";
    std::string before;
    {
        Store s(path);
        s.put(bucket::funds_tx, key(1), to_bytes("old"));
        s.put(bucket::funds_tx, key(1), to_bytes("new"));
        s.put(bucket::meta, to_bytes("height"), to_bytes("3"));
        s.flush();
        const auto raw_size = std::filesystem::file_size(path);
        CHECK(raw_size > 0);
        before = s.dump();
        // reopen from the flushed (uncompacted) file
        Store again(path);
        CHECK(again.dump() == before);
        again.close();
        s.close();
    }
    Store reopened(path);
    CHECK(reopened.dump() == before);
    CHECK(reopened.get(bucket::funds_tx, key(1)) == to_bytes("new"));

    std::ifstream in(path, std::ios::binary);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(raw.find("old") == std::string::npos);
}

TEST_CASE("a torn tail record is ignored on reopen")
{
    test::TempDir dir;
    const auto path = dir.path() / "torn.db";
    std::string before;
    {
        Store s(path);
        s.put(bucket::blocks, key(1), to_bytes("block"));
        s.flush();
        before = s.dump();
    }
    {
        std::ofstream out(path, std::ios::binary | std::ios::app);
        out.write("\x00\x00\x00\x07fund", 8);
    }
    Store reopened(path);
    CHECK(reopened.dump() == before);
}

TEST_CASE("dump is canonical and digest follows contents")
{
    Store a, b;
    a.put(bucket::accounts, key(2), to_bytes("x"));
    a.put(bucket::accounts, key(1), to_bytes("y"));
    b.put(bucket::accounts, key(1), to_bytes("y"));
    b.put(bucket::accounts, key(2), to_bytes("x"));
    CHECK(a.dump() == b.dump());
    CHECK(a.dump_digest() == b.dump_digest());
    CHECK(a.dump().rfind("accounts\t", 0) == 0);
    b.put(bucket::accounts, key(2), to_bytes("z"));
    CHECK(a.dump_digest() != b.dump_digest());
}

TEST_CASE("keyed lookup cost does not grow linearly with store size")
{
    auto time_lookups = [](std::size_t n) {
        Store s;
        for (std::size_t i = 0; i < n; ++i) s.put(bucket::funds_tx, key(i * 7919), to_bytes("v"));
        const auto start = std::chrono::steady_clock::now();
        std::size_t hits = 0;
        for (int rep = 0; rep < 20000; ++rep) hits += s.contains(bucket::funds_tx, key((rep % n) * 7919));
        const auto elapsed = std::chrono::steady_clock::now() - start;
        CHECK(hits == 20000);
        return std::chrono::duration<double>(elapsed).count();
    };
    const double small = time_lookups(1000);
    const double large = time_lookups(100000);
    CHECK(large / small < 3.0);
}

}

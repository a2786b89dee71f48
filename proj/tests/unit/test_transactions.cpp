// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "doctest.h"

#include "redact/transactions.hpp"
#include "support/fixtures.hpp"
#include "support/tiny_oracle.hpp"

#include <algorithm>

using namespace redact;

namespace {

// Independent serializer for FundsTx written straight from the wire rules.
Bytes reference_funds_fields(const FundsTx& t)
{
    Bytes out{0x02};
    auto len = [&](std::uint32_t n) {
        for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(n >> s));
    };
    auto be = [&](std::uint64_t v, int width) {
        len(static_cast<std::uint32_t>(width));
        for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    be(t.amount, 8);
    be(t.fee, 8);
    be(t.tx_cnt, 4);
    len(32);
    out.insert(out.end(), t.from.data(), t.from.data() + 32);
    len(32);
    out.insert(out.end(), t.to.data(), t.to.data() + 32);
    len(static_cast<std::uint32_t>(t.data.size()));
    out.insert(out.end(), t.data.begin(), t.data.end());
    return out;
}

FundsTx fixture_funds()
{
    FundsTx t;
    t.amount = 5;
    t.fee = 1;
    t.tx_cnt = 3;
    t.from = test::address_with(0xaa);
    t.to = test::address_with(0xbb);
    t.data = to_bytes("hello");
    t.check_string = {5, 9};
    return t;
}

} // namespace

TEST_SUITE("transactions") {

TEST_CASE("tx_message excludes check string and signature only")
{
    auto a = fixture_funds();
    auto b = a;
    b.check_string = {1, 2};
    b.signature = Bytes(64, 7);
    CHECK(tx_message(a) == tx_message(b));

    auto c = a;
    c.amount = 7;
    CHECK(tx_message(a) != tx_message(c));
}

TEST_CASE("canonical FundsTx bytes match the reference serializer")
{
    const auto t = fixture_funds();
    const Bytes expected = reference_funds_fields(t);
    CHECK(canonical_fields(t) == expected);
    CHECK(tx_message(t) == inner_hash(expected));
    CHECK(expected.size() == 1 + 12 + 12 + 8 + 36 + 36 + 9);
}

TEST_CASE("tiny-group tx hash composes the serializer and chameleon oracles")
{
    const auto params = chf::parameters_from_trapdoor(23, 11, 4, 7);
    const auto t = fixture_funds();
    const Digest msg = inner_hash(reference_funds_fields(t));
    const auto grp = oracle::make_group(23, 11, 4, 7);
    const std::string msg_str(msg.data(), msg.data() + 32);
    CHECK(tx_hash(t, params) == oracle::digest(grp, msg_str, 5, 9));
}

TEST_CASE("sign and verify")
{
    auto& w = test::world();
    const auto& alice = w.alice;
    const auto& bob = w.bob;
    SeededRandom rng(2);
    Transaction tx = make_funds_tx(alice, bob.address(), 5, 1, 1, to_bytes("x"), rng);
    CHECK(verify_signature(tx, alice.signing.public_key, alice.chf));
    CHECK_FALSE(verify_signature(tx, bob.signing.public_key, alice.chf));

    auto flipped = std::get<FundsTx>(tx);
    flipped.signature[10] ^= 0x01;
    CHECK_FALSE(verify_signature(flipped, alice.signing.public_key, alice.chf));

    Transaction other = make_funds_tx(alice, bob.address(), 6, 1, 2, {}, rng);
    auto swapped = std::get<FundsTx>(other);
    swapped.signature = std::get<FundsTx>(tx).signature;
    CHECK_FALSE(verify_signature(swapped, alice.signing.public_key, alice.chf));

    CHECK_THROWS_AS(sign_tx(tx, Bytes(5, 1), alice.chf), KeyError);
    CHECK_FALSE(verify_signature(tx, Bytes(3, 0), alice.chf));
}

TEST_CASE("make_update keeps the hash and the signature valid")
{
    auto& w = test::world();
    const auto& alice = w.alice;
    SeededRandom rng(4);
    Transaction original = make_data_tx(alice, w.bob.address(), 1, 1, to_bytes("{name: Alise}"), rng);
    const Digest before = tx_hash(original, alice.chf);

    auto u = make_update(original, to_bytes("{name: Alice}"), to_bytes("typo fix"), 1, alice, rng);
    CHECK(u.tx_to_update_hash == before);
    CHECK(u.issuer == alice.address());
    CHECK(verify_signature(u, alice.signing.public_key, alice.chf));

    Transaction updated = with_data(original, u.tx_to_update_data, u.tx_to_update_check_string);
    CHECK(tx_hash(updated, chf::sanitize(alice.chf)) == before);
    CHECK(to_string(data_of(updated)) == "{name: Alice}");
    CHECK(verify_signature(updated, alice.signing.public_key, alice.chf));

    // erasure is the empty-data case
    auto erase = make_update(updated, {}, to_bytes("erase"), 1, alice, rng);
    Transaction erased = with_data(updated, erase.tx_to_update_data, erase.tx_to_update_check_string);
    CHECK(data_of(erased).empty());
    CHECK(tx_hash(erased, alice.chf) == before);
}

TEST_CASE("make_update error paths")
{
    auto& w = test::world();
    SeededRandom rng(6);
    Transaction bobs = make_data_tx(w.bob, w.alice.address(), 1, 1, to_bytes("bob"), rng);
    CHECK_THROWS_AS(make_update(bobs, {}, {}, 1, w.alice, rng), TransactionError);

    ClientKeys no_trapdoor = w.alice;
    no_trapdoor.chf = chf::sanitize(no_trapdoor.chf);
    Transaction alices = make_data_tx(w.alice, w.bob.address(), 1, 1, to_bytes("a"), rng);
    CHECK_THROWS_AS(make_update(alices, {}, {}, 1, no_trapdoor, rng), chf::MissingTrapdoor);

    AggTx agg;
    CHECK_THROWS_AS(make_update(agg, {}, {}, 1, w.alice, rng), TransactionError);
}

TEST_CASE("a forced foreign collision fails hash equality")
{
    auto& w = test::world();
    SeededRandom rng(8);
    Transaction bobs = make_data_tx(w.bob, w.alice.address(), 1, 1, to_bytes("bob"), rng);
    const Digest target = tx_hash(bobs, w.bob.chf);
    const Digest old_msg = tx_message(bobs);
    const Digest new_msg = tx_message(with_data(bobs, to_bytes("owned"), check_string_of(bobs)));
    // Alice's group differs from Bob's; bring Bob's check string into her range first.
    auto bob_check = check_string_of(bobs);
    mpz_fdiv_r(bob_check.r.get_mpz_t(), bob_check.r.get_mpz_t(), w.alice.chf.q.get_mpz_t());
    mpz_fdiv_r(bob_check.s.get_mpz_t(), bob_check.s.get_mpz_t(), w.alice.chf.q.get_mpz_t());
    auto forged = chf::find_collision(w.alice.chf, old_msg.view(), bob_check, new_msg.view(), rng);
    mpz_fdiv_r(forged.r.get_mpz_t(), forged.r.get_mpz_t(), w.bob.chf.q.get_mpz_t());
    mpz_fdiv_r(forged.s.get_mpz_t(), forged.s.get_mpz_t(), w.bob.chf.q.get_mpz_t());
    CHECK(tx_hash(with_data(bobs, to_bytes("owned"), forged), w.bob.chf) != target);
}

TEST_CASE("updating an UpdateTx changes only its own data")
{
    auto& w = test::world();
    SeededRandom rng(10);
    Transaction original = make_data_tx(w.alice, w.bob.address(), 1, 1, to_bytes("v1"), rng);
    Transaction u1 = make_update(original, to_bytes("v2"), to_bytes("r"), 1, w.alice, rng);
    const Digest u1_hash = tx_hash(u1, w.alice.chf);
    auto u2 = make_update(u1, to_bytes("note"), to_bytes("annotate"), 1, w.alice, rng);
    Transaction u1_updated = with_data(u1, u2.tx_to_update_data, u2.tx_to_update_check_string);
    CHECK(tx_hash(u1_updated, w.alice.chf) == u1_hash);
    const auto& body = std::get<UpdateTx>(u1_updated);
    CHECK(to_string(body.tx_to_update_data) == "v2");
    CHECK(to_string(body.data) == "note");
}

TEST_CASE("mutating any hashed field changes tx_hash")
{
    auto& w = test::world();
    SeededRandom rng(12);
    const auto& params = w.alice.chf;
    const Transaction base = make_funds_tx(w.alice, w.bob.address(), 5, 1, 1, to_bytes("d"), rng);
    const Digest h = tx_hash(base, params);
    const auto& f = std::get<FundsTx>(base);
    std::vector<FundsTx> mutants(5, f);
    mutants[0].amount += 1;
    mutants[1].fee += 1;
    mutants[2].tx_cnt += 1;
    mutants[3].from[0] ^= 1;
    mutants[4].to[31] ^= 1;
    for (const auto& m : mutants) CHECK(tx_hash(m, params) != h);

    const Transaction acc = make_account_tx(w.alice, 2, to_bytes("acc"), rng);
    const Digest ha = tx_hash(acc, params);
    std::vector<AccountTx> acc_mutants(4, std::get<AccountTx>(acc));
    acc_mutants[0].issuer[0] ^= 1;
    acc_mutants[1].public_key[0] ^= 1;
    acc_mutants[2].fee += 1;
    acc_mutants[3].parameters.g += 1;
    for (const auto& m : acc_mutants) CHECK(tx_hash(m, params) != ha);

    const Transaction upd = make_update(base, to_bytes("n"), to_bytes("r"), 1, w.alice, rng);
    const Digest hu = tx_hash(upd, params);
    std::vector<UpdateTx> upd_mutants(6, std::get<UpdateTx>(upd));
    upd_mutants[0].tx_to_update_hash[0] ^= 1;
    upd_mutants[1].tx_to_update_check_string.r += 1;
    upd_mutants[2].tx_to_update_data.push_back('x');
    upd_mutants[3].issuer[5] ^= 1;
    upd_mutants[4].fee += 1;
    upd_mutants[5].reason.push_back('!');
    for (const auto& m : upd_mutants) CHECK(tx_hash(m, params) != hu);
}

TEST_CASE("wire encoding round-trips every variant")
{
    auto& w = test::world();
    SeededRandom rng(14);
    for (int i = 0; i < 25; ++i) {
        Bytes data(rng.uniform(40));
        rng.fill(data);
        std::vector<Transaction> txs;
        txs.push_back(make_account_tx(w.alice, rng.uniform(10), data, rng));
        txs.push_back(make_funds_tx(w.alice, w.bob.address(), rng.next_u64(), rng.uniform(10),
                                    static_cast<std::uint32_t>(rng.uniform(1000)), data, rng));
        txs.push_back(make_data_tx(w.bob, w.alice.address(), rng.uniform(10), 3, data, rng));
        txs.push_back(make_update(txs[1], data, to_bytes("reason"), 2, w.alice, rng));
        AggTx agg;
        agg.kind = i % 2 ? AggTx::Kind::Data : AggTx::Kind::Funds;
        agg.from = {w.alice.address()};
        agg.to = {w.bob.address(), w.carol.address()};
        agg.total_amount = agg.kind == AggTx::Kind::Funds ? rng.next_u64() : 0;
        if (agg.kind == AggTx::Kind::Data) agg.shared_data = data;
        agg.aggregated_hashes = {tx_hash(txs[1], w.alice.chf), tx_hash(txs[2], w.bob.chf)};
        txs.push_back(agg);
        for (const auto& tx : txs) {
            const Bytes enc = encode_tx(tx);
            CHECK(decode_tx(enc) == tx);
            CHECK(encode_tx(decode_tx(enc)) == enc);
        }
    }
    CHECK_THROWS_AS(decode_tx(from_hex("09")), DecodeError);
    Bytes truncated = encode_tx(make_data_tx(w.bob, w.alice.address(), 1, 1, {}, rng));
    truncated.pop_back();
    CHECK_THROWS_AS(decode_tx(truncated), DecodeError);
}

TEST_CASE("account tx never carries the trapdoor")
{
    auto& w = test::world();
    SeededRandom rng(16);
    auto acc = make_account_tx(w.alice, 0, {}, rng);
    CHECK_FALSE(acc.parameters.tk);
    const Bytes wire = encode_tx(acc);
    const Bytes tk = chf::encode_scalar(*w.alice.chf.tk);
    CHECK(std::search(wire.begin(), wire.end(), tk.begin(), tk.end()) == wire.end());
    CHECK(verify_signature(acc, acc.public_key, acc.parameters));
    CHECK(acc.issuer == address_of(acc.public_key));
}

TEST_CASE("client key and account records round-trip")
{
    auto& w = test::world();
    const auto back = decode_client_keys(encode_client_keys(w.alice));
    CHECK(back.signing.secret_key == w.alice.signing.secret_key);
    CHECK(back.signing.public_key == w.alice.signing.public_key);
    CHECK(back.chf == w.alice.chf);

    Account a{w.alice.address(), w.alice.signing.public_key, 100, 4, chf::sanitize(w.alice.chf)};
    CHECK(decode_account(encode_account(a)) == a);
}

}
